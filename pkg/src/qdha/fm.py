"""Fourier-Motzkin elimination for strict rational inequality systems.

A constraint is (coeffs, rhs, strict) meaning ``coeffs . x > rhs`` (strict) or
``coeffs . x >= rhs``.  Elimination combines every lower bound on a variable
with every upper bound; a combination is strict when either parent is.  The
system is feasible over the rationals exactly when no contradictory constant
constraint survives.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Constraint = tuple[tuple[Fraction, ...], Fraction, bool]


def make_constraint(coeffs: Sequence, rhs, strict: bool = True) -> Constraint:
    return (tuple(Fraction(c) for c in coeffs), Fraction(rhs), bool(strict))


def _eliminate(constraints: list[Constraint], var: int) -> list[Constraint]:
    lowers, uppers, rest = [], [], []
    for coeffs, rhs, strict in constraints:
        c = coeffs[var]
        if c > 0:
            lowers.append((coeffs, rhs, strict))
        elif c < 0:
            uppers.append((coeffs, rhs, strict))
        else:
            rest.append((coeffs, rhs, strict))
    for lc, lr, ls in lowers:
        for uc, ur, us in uppers:
            a, b = lc[var], -uc[var]
            coeffs = tuple(b * x + a * y for x, y in zip(lc, uc))
            rest.append((coeffs, b * lr + a * ur, ls or us))
    return rest


def feasible(constraints: list[Constraint], nvars: int) -> bool:
    """Whether the system admits a rational solution."""
    current = list(constraints)
    for var in range(nvars):
        current = _eliminate(current, var)
        # drop duplicates to keep the blowup in check
        current = list(dict.fromkeys(current))
    for coeffs, rhs, strict in current:
        if any(c != 0 for c in coeffs):
            raise AssertionError("elimination left a non-constant constraint")
        if strict and not (0 > rhs):
            return False
        if not strict and not (0 >= rhs):
            return False
    return True


def strictly_feasible_cone(rows: list[Sequence], nvars: int) -> bool:
    """Whether ``row . v > 0`` for all rows has a solution (full-dimensional cone)."""
    constraints = [make_constraint(r, 0, strict=True) for r in rows]
    return feasible(constraints, nvars)
