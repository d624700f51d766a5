"""Finite root systems and their affinisations, in exact rational arithmetic.

A finite root system is realized once in an ambient rational vector space, then
converted to intrinsic data: every root is stored by its integer coordinates in
the simple-root basis, and all pairings go through the Gram matrix of the simple
roots.  Points of the reflection space E are stored by their coordinates in the
simple-coroot basis, so that lattice membership and root evaluation are exact.

An affine root ``a = alpha + k`` is the affine function ``x -> <alpha, x> + k``
on E.  For a reduced system R the affine roots are ``{alpha + k : alpha in R,
k in Z}``; when R is non-reduced the divisible roots only occur at odd levels.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
RootKey = tuple[int, ...]


def vec(xs: Iterable) -> Vec:
    return tuple(Fraction(x) for x in xs)


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def solve_linear(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a square rational linear system by Gaussian elimination."""
    n = len(rows)
    m = [list(row) + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


@dataclass(frozen=True, order=True)
class AffineRoot:
    """The affine root ``alpha + level`` with ``alpha`` in simple-root coordinates."""

    alpha: RootKey
    level: int

    def __repr__(self) -> str:
        return f"AffineRoot({self.alpha}, {self.level})"


class FiniteRootSystem:
    """An irreducible finite root system with a fixed basis.

    All data is exact: roots are integer vectors in the simple-root basis and
    the scalar product is the rational Gram matrix of the simple roots.
    """

    def __init__(self, label: str, simple_ambient: list[Vec], extra_roots: list[Vec] | None = None):
        self.label = label
        self.rank = len(simple_ambient)
        self._ambient = [vec(v) for v in simple_ambient]
        # Gram matrix of the simple roots.
        self.gram = [[_dot(a, b) for b in self._ambient] for a in self._ambient]
        ambient_roots = self._reflection_closure(list(self._ambient) + [vec(v) for v in (extra_roots or [])])
        keys = sorted(self._to_key(v) for v in ambient_roots)
        self.roots: tuple[RootKey, ...] = tuple(keys)
        self._root_set = frozenset(self.roots)
        self.positive_roots = tuple(k for k in self.roots if self._key_sign(k) > 0)
        self.reduced = all(tuple(2 * c for c in k) not in self._root_set for k in self.roots)
        self.indivisible_roots = tuple(k for k in self.roots if not self._is_divisible(k))
        self.highest_root = self._find_highest()
        # cartan[i][j] = <alpha_j, alpha_i^vee>
        self.cartan = [
            [2 * self.gram[i][j] / self.gram[i][i] for j in range(self.rank)] for i in range(self.rank)
        ]
        self._simple_pairings = {
            key: tuple(self.pair_root_coroot(key, self.simple_root(i)) for i in range(self.rank))
            for key in self.roots
        }
        self.fundamental_coweights = self._fundamental_coweights()
        self.fundamental_weights = self._fundamental_weights()
        self.coxeter_number = int(self.height(self.highest_root)) + 1

    # ----- construction helpers -----

    def _reflection_closure(self, seed: list[Vec]) -> set[Vec]:
        roots = set(seed) | {tuple(-c for c in v) for v in seed}
        while True:
            new = set()
            for a in roots:
                na = _dot(a, a)
                for b in roots:
                    coef = 2 * _dot(a, b) / na
                    img = tuple(x - coef * y for x, y in zip(b, a))
                    if img not in roots:
                        new.add(img)
            if not new:
                return roots
            roots |= new

    def _to_key(self, ambient: Vec) -> RootKey:
        basis = self._ambient
        # Solve over the span of the simple roots (the ambient space may be larger).
        gm = [[_dot(a, b) for b in basis] for a in basis]
        rhs = [_dot(a, ambient) for a in basis]
        coords = solve_linear(gm, rhs)
        key = tuple(int(c) for c in coords)
        if any(Fraction(k) != c for k, c in zip(key, coords)):
            raise ValueError(f"root {ambient} is not an integer combination of the simple roots")
        return key

    def _is_divisible(self, key: RootKey) -> bool:
        if any(c % 2 for c in key):
            return False
        return tuple(c // 2 for c in key) in self._root_set

    def _key_sign(self, key: RootKey) -> int:
        if all(c >= 0 for c in key):
            return 1
        if all(c <= 0 for c in key):
            return -1
        raise ValueError(f"{key} has mixed signs; not a root of an irreducible system")

    def _find_highest(self) -> RootKey:
        best = max(self.positive_roots, key=lambda k: (self.height(k), k))
        for k in self.roots:
            if k != best and any(b < c for b, c in zip(best, k)):
                raise ValueError("no dominant highest root; system is not irreducible")
        return best

    def _fundamental_coweights(self) -> list[Vec]:
        # coords c of varpi_i^vee in the coroot basis: sum_k c_k <alpha_j, alpha_k^vee> = delta_ij
        out = []
        rows = [[self.pair_root_coroot(self.simple_root(j), self.simple_root(k)) for k in range(self.rank)]
                for j in range(self.rank)]
        for i in range(self.rank):
            rhs = [Fraction(1) if j == i else Fraction(0) for j in range(self.rank)]
            out.append(tuple(solve_linear(rows, rhs)))
        return out

    def _fundamental_weights(self) -> list[RootKey | Vec]:
        # varpi_i in the simple-root basis: <varpi_i, alpha_j^vee> = delta_ij
        out = []
        rows = [[Fraction(self.cartan[j][k]) for k in range(self.rank)] for j in range(self.rank)]
        for i in range(self.rank):
            rhs = [Fraction(1) if j == i else Fraction(0) for j in range(self.rank)]
            out.append(tuple(solve_linear(rows, rhs)))
        return out

    # ----- basic queries -----

    def simple_root(self, i: int) -> RootKey:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def is_root(self, key: RootKey) -> bool:
        return key in self._root_set

    def is_positive_root(self, key: RootKey) -> bool:
        return key in self._root_set and self._key_sign(key) > 0

    def height(self, key: RootKey) -> int:
        return sum(key)

    def inner(self, a: RootKey, b: RootKey) -> Fraction:
        return sum(
            (Fraction(a[i]) * Fraction(b[j]) * self.gram[i][j] for i in range(self.rank) for j in range(self.rank)),
            Fraction(0),
        )

    def norm2(self, a: RootKey) -> Fraction:
        return self.inner(a, a)

    def pair_root_coroot(self, a: RootKey, b: RootKey) -> Fraction:
        """``<a, b^vee> = 2(a,b)/(b,b)``; an integer for roots a, b."""
        return 2 * self.inner(a, b) / self.norm2(b)

    def coroot_coords(self, a: RootKey) -> Vec:
        """Coordinates of ``a^vee`` in the simple-coroot basis."""
        n2 = self.norm2(a)
        return tuple(Fraction(a[i]) * self.gram[i][i] / n2 for i in range(self.rank))

    def pair_root_point(self, a: RootKey, x: Vec) -> Fraction:
        """``<a, x>`` for a point x given in simple-coroot coordinates."""
        cached = getattr(self, "_simple_pairings", None)
        if cached is not None and a in cached:
            pairings = cached[a]
        else:
            pairings = tuple(self.pair_root_coroot(a, self.simple_root(i)) for i in range(self.rank))
        return sum((xi * pi for xi, pi in zip(x, pairings)), Fraction(0))

    def reflect_root(self, by: RootKey, a: RootKey) -> RootKey:
        """``s_by(a) = a - <by^vee, a> by``."""
        c = self.pair_root_coroot(a, by)
        return tuple(ai - int(c) * bi for ai, bi in zip(a, by))

    def reflect_point(self, by: RootKey, x: Vec) -> Vec:
        """Reflection of a point (coroot coordinates) in the wall of the finite root ``by``."""
        c = self.pair_root_point(by, x)
        cv = self.coroot_coords(by)
        return tuple(xi - c * vi for xi, vi in zip(x, cv))

    def in_coroot_lattice(self, x: Vec) -> bool:
        return all(Fraction(c).denominator == 1 for c in x)

    def in_coweight_lattice(self, x: Vec) -> bool:
        return all(self.pair_root_point(self.simple_root(j), x).denominator == 1 for j in range(self.rank))

    # Exact basis matrices of the four standard lattices, as rows.
    def lattice_bases(self) -> dict[str, list[Vec]]:
        simple = [vec(self.simple_root(i)) for i in range(self.rank)]
        return {
            "Q": simple,                                   # root basis, root coordinates
            "P": [vec(w) for w in self.fundamental_weights],
            "Qv": [vec(tuple(1 if j == i else 0 for j in range(self.rank))) for i in range(self.rank)],
            "Pv": [vec(w) for w in self.fundamental_coweights],
        }


_AN = re.compile(r"^A(\d+)$")


def build_finite(type_label: str) -> FiniteRootSystem:
    """Build the finite root system named by ``type_label`` (A_n, B2, C2, G2).

    The realizations are fixed: A_n lives in the sum-zero hyperplane of
    Q^{n+1}, B2/C2 in standard coordinates of Q^2, G2 inside the sum-zero
    hyperplane of Q^3.
    """
    label = type_label.strip().upper()
    m = _AN.match(label)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise ValueError(f"unknown root system label {type_label!r}")
        simple = []
        for i in range(n):
            e = [Fraction(0)] * (n + 1)
            e[i] = Fraction(1)
            e[i + 1] = Fraction(-1)
            simple.append(tuple(e))
        return FiniteRootSystem(label, simple)
    if label == "B2":
        return FiniteRootSystem(label, [vec((1, -1)), vec((0, 1))])
    if label == "C2":
        return FiniteRootSystem(label, [vec((1, -1)), vec((0, 2))])
    if label == "G2":
        return FiniteRootSystem(label, [vec((1, -1, 0)), vec((-2, 1, 1))])
    raise ValueError(f"unknown root system label {type_label!r}")


class AffineRootSystem:
    """The affinisation of a finite root system, with the basis Delta = Delta_0 + {a_0}."""

    def __init__(self, finite: FiniteRootSystem):
        self.finite = finite
        self.rank = finite.rank
        neg_theta = tuple(-c for c in finite.highest_root)
        self.a0 = AffineRoot(neg_theta, 1)
        self.delta: tuple[AffineRoot, ...] = (self.a0,) + tuple(
            AffineRoot(finite.simple_root(i), 0) for i in range(finite.rank)
        )

    def is_root(self, a: AffineRoot) -> bool:
        f = self.finite
        if not f.is_root(a.alpha):
            return False
        if f.reduced:
            return True
        half = tuple(Fraction(c, 2) for c in a.alpha)
        divisible = all(x.denominator == 1 for x in half) and f.is_root(tuple(int(x) for x in half))
        if divisible:
            return a.level % 2 == 1
        return True

    def is_positive(self, a: AffineRoot) -> bool:
        if not self.is_root(a):
            raise ValueError(f"{a} is not an affine root of {self.finite.label}")
        return a.level > 0 or (a.level == 0 and self.finite.is_positive_root(a.alpha))

    def differential(self, a: AffineRoot) -> RootKey:
        return a.alpha

    def reflect(self, a: AffineRoot, b: AffineRoot) -> AffineRoot:
        """``s_a(b) = b - <a^vee, b> a`` as affine functions."""
        c = int(self.finite.pair_root_coroot(b.alpha, a.alpha))
        return AffineRoot(
            tuple(bi - c * ai for bi, ai in zip(b.alpha, a.alpha)),
            b.level - c * a.level,
        )

    def evaluate(self, a: AffineRoot, x: Vec) -> Fraction:
        return self.finite.pair_root_point(a.alpha, x) + a.level

    def delta_coordinates(self, a: AffineRoot) -> tuple[Fraction, ...]:
        """Coordinates of ``a`` in the affine basis (a_0 first); integral for roots."""
        c0 = Fraction(a.level)
        theta = self.finite.highest_root
        rest = tuple(Fraction(ai) + c0 * ti for ai, ti in zip(a.alpha, theta))
        return (c0,) + rest

    def in_ndelta_cone(self, a: AffineRoot) -> bool:
        """Whether a lies in N*Delta or in -N*Delta."""
        coords = self.delta_coordinates(a)
        if any(c.denominator != 1 for c in coords):
            return False
        return all(c >= 0 for c in coords) or all(c <= 0 for c in coords)

    def positive_window(self, level_bound: int) -> list[AffineRoot]:
        """All positive affine roots with |level| <= level_bound, sorted."""
        if level_bound < 0:
            raise ValueError("level_bound must be >= 0")
        out = []
        for alpha in self.finite.roots:
            lo = 0 if self.finite.is_positive_root(alpha) else 1
            for k in range(lo, level_bound + 1):
                a = AffineRoot(alpha, k)
                if self.is_root(a):
                    out.append(a)
        return sorted(out)

    def window(self, level_bound: int) -> list[AffineRoot]:
        """All affine roots with |level| <= level_bound, sorted."""
        pos = self.positive_window(level_bound)
        neg = [AffineRoot(tuple(-c for c in a.alpha), -a.level) for a in pos]
        return sorted(pos + neg)

def affinise(type_label: str) -> AffineRootSystem:
    return AffineRootSystem(build_finite(type_label))
