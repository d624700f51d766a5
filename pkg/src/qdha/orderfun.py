"""Order functions: the exponent data driving all the operator algebras.

An order function is a finitely supported map ``S -> Z_{>=-1}`` attached to a
base point ``lambda_0``, invariant under the stabilizer of the base point, with
value -1 allowed only on roots vanishing at the base point.  It transports
along the orbit by ``omega_{w lambda_0}(a) = omega(w^{-1} a)``.

Its finite shadow lives on the torus orbit: for a point ``ell = exp(lambda)``
(a point of E taken modulo the coroot lattice) and an indivisible positive
root, integrating the order function over all affine roots with a fixed
differential gives the finite order function driving the finite quotient
algebra.  Both extraction recipes from deformation parameters ``h`` are exact:
the affine one reads off orders of vanishing of ``(z - h_a)/z`` at rational
points, the finite one reduces to congruences of exponents modulo 1.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .rootsys import AffineRoot, RootKey, Vec, vec
from .weyl import AffineWeylElement, AffineWeylGroup


class InvalidOrderFunction(ValueError):
    pass


class WindowTooSmall(ValueError):
    pass


def torus_point(x: Vec) -> Vec:
    """Canonical representative of a point of E modulo the coroot lattice."""
    return tuple(c - (c.numerator // c.denominator) for c in map(Fraction, x))


def torus_orbit(group: AffineWeylGroup, base: Vec) -> list[Vec]:
    """The finite Weyl orbit of a torus point, as canonical representatives."""
    seen = {torus_point(base)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for pt in frontier:
            for w in group.finite.simple:
                img = torus_point(group.finite.act_point(w, pt))
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return sorted(seen)


class OrderFunction:
    """A finitely supported order function based at ``base_point``.

    ``support`` maps affine roots to integers >= -1; roots outside the support
    have value 0.  Validation enforces stabilizer invariance and the wall
    condition for value -1.
    """

    def __init__(self, group: AffineWeylGroup, base_point: Sequence, support: Mapping[AffineRoot, int]):
        self.group = group
        self.ars = group.ars
        self.base_point = vec(base_point)
        self.support: dict[AffineRoot, int] = {
            a: int(v) for a, v in sorted(support.items()) if int(v) != 0
        }
        self.validate()

    # ----- validation -----

    def validate(self) -> None:
        ars = self.ars
        for a, v in self.support.items():
            if not ars.is_root(a):
                raise InvalidOrderFunction(f"{a} is not an affine root")
            if v < -1:
                raise InvalidOrderFunction(f"value {v} at {a} is below -1")
            if v == -1 and ars.evaluate(a, self.base_point) != 0:
                raise InvalidOrderFunction(f"value -1 at {a} but a(lambda0) != 0")
        _, stab = self.group.stabilizer(self.base_point)
        for g in stab:
            for a, v in self.support.items():
                if self.value(self.group.act_root(g, a)) != v:
                    raise InvalidOrderFunction(
                        f"not invariant under the stabilizer: {a} vs {self.group.act_root(g, a)}"
                    )

    # ----- evaluation -----

    def value(self, a: AffineRoot) -> int:
        """The extended function at any affine root."""
        return self.support.get(a, 0)

    def at(self, witness: AffineWeylElement, a: AffineRoot) -> int:
        """omega_{w lambda0}(a) = omega(w^{-1} a)."""
        return self.value(self.group.act_root(self.group.inverse(witness), a))

    def at_point(self, lam: Sequence, a: AffineRoot) -> int:
        lam = vec(lam)
        w = self.group.witness(lam, self.base_point)
        if w is None:
            raise InvalidOrderFunction(f"{lam} is not in the orbit of {self.base_point}")
        return self.at(w, a)

    def support_level_radius(self) -> int:
        if not self.support:
            return 0
        return max(abs(a.level) for a in self.support)

    def max_value(self) -> int:
        return max([v for v in self.support.values()], default=0)

    # ----- degree data -----

    def tau_degree(self, i: int, witness: AffineWeylElement) -> int:
        """deg tau_a e(lambda) = omega_lambda(a) + omega~_lambda(-a) for a = Delta[i]."""
        a = self.ars.delta[i]
        neg = AffineRoot(tuple(-c for c in a.alpha), -a.level)
        return self.at(witness, a) + self.at(witness, neg)

    def __repr__(self) -> str:
        return f"OrderFunction(base={self.base_point}, support={self.support})"


def omega_at(omega: OrderFunction, witness: AffineWeylElement, a: AffineRoot) -> int:
    if not omega.ars.is_positive(a):
        raise ValueError(f"{a} is not a positive affine root")
    return omega.at(witness, a)


def _orbit_parameter(h, rs, alpha: RootKey) -> Fraction:
    """The deformation parameter for a root, constant on length classes."""
    if isinstance(h, Mapping):
        return Fraction(h[rs.norm2(alpha)])
    return Fraction(h)


def from_ddaha_h(group: AffineWeylGroup, h, base_point: Sequence, window: int) -> OrderFunction:
    """Order function of the deformation with parameters h at the base point.

    The value at an affine root a is the order of ``(z - h_a) / z`` at
    ``z = a(lambda0)``: +1 on ``a(lambda0) = h_a != 0``, -1 on
    ``a(lambda0) = 0 != h_a``, else 0.  The support must fit strictly inside
    the level window, otherwise the window is reported as too small.
    """
    ars = group.ars
    base_point = vec(base_point)
    support: dict[AffineRoot, int] = {}
    for a in ars.window(window):
        ha = _orbit_parameter(h, ars.finite, a.alpha)
        val = ars.evaluate(a, base_point)
        order = (1 if (val == ha and ha != 0) else 0) - (1 if (val == 0 and ha != 0) else 0)
        if order:
            support[a] = order
    for a in support:
        if abs(a.level) >= window:
            raise WindowTooSmall(
                f"support reaches level {a.level}; enlarge the window beyond {window}"
            )
    return OrderFunction(group, base_point, support)


class BOrderFunction:
    """The finite order function on the torus orbit of ``exp(lambda0)``.

    Stored as a table over (canonical torus point, indivisible positive root).
    """

    def __init__(self, group: AffineWeylGroup, base_point: Sequence,
                 table: Mapping[tuple[Vec, RootKey], int]):
        self.group = group
        self.rs = group.rs
        self.base_point = vec(base_point)
        self.base_torus = torus_point(self.base_point)
        self.table = {k: int(v) for k, v in table.items()}
        self._orbit_set = frozenset(torus_orbit(group, self.base_torus))
        self.validate()

    def orbit(self) -> list[Vec]:
        return torus_orbit(self.group, self.base_torus)

    def value(self, ell: Vec, alpha: RootKey) -> int:
        pt = torus_point(ell)
        if pt not in self._orbit_set:
            raise KeyError(f"{ell} is not in the torus orbit of the base point")
        return self.table.get((pt, alpha), 0)

    def y_is_one(self, ell: Vec, alpha: RootKey) -> bool:
        """Whether Y^alpha(ell) = 1, i.e. <alpha, lambda> is an integer."""
        return self.rs.pair_root_point(alpha, ell).denominator == 1

    def validate(self) -> None:
        rs = self.rs
        fin = self.group.finite
        for (ell, alpha), v in self.table.items():
            if v < -1:
                raise InvalidOrderFunction(f"value {v} below -1 at {(ell, alpha)}")
            if v == -1:
                val = rs.pair_root_point(alpha, ell)
                doubled = tuple(2 * c for c in alpha) in rs._root_set
                if doubled:
                    if (2 * val).denominator != 1:
                        raise InvalidOrderFunction(f"-1 at {(ell, alpha)} but Y^alpha(ell) != ±1")
                elif val.denominator != 1:
                    raise InvalidOrderFunction(f"-1 at {(ell, alpha)} but Y^alpha(ell) != 1")
        # equivariance on positive pairs
        for (ell, alpha), v in self.table.items():
            for w in fin.elements:
                walpha = fin.act_root(w, alpha)
                if rs.is_positive_root(walpha):
                    key = (torus_point(fin.act_point(w, ell)), walpha)
                    if key in self.table and self.table[key] != v:
                        raise InvalidOrderFunction(f"not equivariant at {(ell, alpha)} vs {key}")


def from_ddaha_k(group: AffineWeylGroup, h, base_point: Sequence) -> BOrderFunction:
    """Finite order function of the deformation, by congruence arithmetic mod 1.

    With ``Y^alpha(ell) = exp(2 pi i <alpha, lambda>)`` and squared parameters
    ``exp(2 pi i h_alpha)``, the order of ``(z - v^2)/(z - 1)`` at Y is decided
    by congruences of the exponents modulo 1; no complex numbers are needed.
    The divisible-root branch uses ``(z - v_alpha^2)(z + v_theta)/(z^2 - 1)``.
    """
    rs = group.rs
    base_point = vec(base_point)
    bof_table: dict[tuple[Vec, RootKey], int] = {}

    def congruent(x: Fraction, y: Fraction) -> bool:
        return (x - y).denominator == 1

    indiv_pos = [a for a in rs.indivisible_roots if rs.is_positive_root(a)]
    for ell in torus_orbit(group, base_point):
        for alpha in indiv_pos:
            yexp = rs.pair_root_point(alpha, ell)            # Y^alpha(ell) = e(yexp)
            halpha = _orbit_parameter(h, rs, alpha)          # v_alpha^2 = e(h_alpha)
            doubled = tuple(2 * c for c in alpha)
            if not rs.is_root(doubled):
                order = (1 if congruent(yexp, halpha) else 0) - (1 if congruent(yexp, 0) else 0)
            else:
                # zeros at v_alpha^2 and at -v_theta = e((h_theta + 1)/2), poles at ±1
                htheta = _orbit_parameter(h, rs, doubled)
                order = (
                    (1 if congruent(yexp, halpha) else 0)
                    + (1 if congruent(yexp, Fraction(htheta + 1, 2)) else 0)
                    - (1 if congruent(yexp, 0) else 0)
                    - (1 if congruent(yexp, Fraction(1, 2)) else 0)
                )
            if order:
                bof_table[(ell, alpha)] = order
    return BOrderFunction(group, base_point, bof_table)


def integral(omega: OrderFunction, ell: Sequence, alpha: RootKey,
             gamma: Vec | None = None) -> int:
    """Sum of omega at the deep-antidominant lift over all affine roots with
    differential alpha or 2 alpha; independent of the admissible lift."""
    from .kz import choose_gamma, pregamma_point  # local import to avoid a cycle

    group = omega.group
    rs = group.rs
    if not rs.is_positive_root(alpha):
        raise ValueError("alpha must be a positive indivisible root")
    if gamma is None:
        gamma = choose_gamma(omega).gamma
    lam = pregamma_point(omega, gamma, ell)
    wit = group.witness(lam, omega.base_point)
    if wit is None:
        raise InvalidOrderFunction("lifted point is not in the orbit")
    winv = group.inverse(wit)
    total = 0
    radius = omega.support_level_radius()
    for mult in (1, 2):
        beta = tuple(mult * c for c in alpha)
        if not rs.is_root(beta):
            continue
        # omega(w^{-1}(beta + k)) is nonzero only for |k + shift| <= radius
        shift = group.act_root(winv, AffineRoot(beta, 0)).level
        lo = 0 if rs.is_positive_root(beta) else 1
        for k in range(max(lo, -radius - shift), radius - shift + 1):
            a = AffineRoot(beta, k)
            if not group.ars.is_root(a):
                continue
            total += omega.at(wit, a)
    return total


def integral_b_order_function(omega: OrderFunction, gamma: Vec | None = None) -> BOrderFunction:
    """The full finite order function obtained by integrating omega."""
    group = omega.group
    rs = group.rs
    table: dict[tuple[Vec, RootKey], int] = {}
    indiv_pos = [a for a in rs.indivisible_roots if rs.is_positive_root(a)]
    for ell in torus_orbit(group, omega.base_point):
        for alpha in indiv_pos:
            v = integral(omega, ell, alpha, gamma=gamma)
            if v:
                table[(ell, alpha)] = v
    return BOrderFunction(group, omega.base_point, table)
