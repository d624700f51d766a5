"""Idempotent truncation machinery: deep antidominant lifts and the finite quotient.

The section from the torus orbit back to the affine orbit is
``ell = w ell_0  ->  X^gamma w lambda_0`` for a translation gamma pairing at
most ``-M`` with every positive root, where M exceeds the level radius of the
order function's support.  Conjugation by ``X^gamma`` sections the finite Weyl
group into the affine one.  Coset representatives for the stabilizer of ell_0
are chosen deterministically (minimal length, then lexicographically least
word), which fixes the idempotent weight set exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .rootsys import Vec, vec
from .weyl import AffineWeylElement, AffineWeylGroup, Perm
from .orderfun import OrderFunction, torus_orbit, torus_point


@dataclass(frozen=True)
class GammaChoice:
    gamma: Vec
    margin: int


def two_rho_coroot(group: AffineWeylGroup) -> Vec:
    """The sum of all positive coroots, an element of the coroot lattice."""
    rs = group.rs
    total = [Fraction(0)] * rs.rank
    for alpha in rs.positive_roots:
        cv = rs.coroot_coords(alpha)
        total = [t + c for t, c in zip(total, cv)]
    return vec(total)


def choose_gamma(omega: OrderFunction) -> GammaChoice:
    """A deterministic deep antidominant gamma for the given order function.

    M is one more than the support level radius; gamma = -ceil(M/2) * 2rho^vee
    satisfies <alpha, gamma> <= -M for every positive root alpha.
    """
    group = omega.group
    m = omega.support_level_radius() + 1
    two_rho = two_rho_coroot(group)
    k = -(-m // 2)  # ceil(M/2)
    gamma = vec(tuple(-k * c for c in two_rho))
    check_gamma(group, gamma, m)
    return GammaChoice(gamma=gamma, margin=m)


def check_gamma(group: AffineWeylGroup, gamma: Vec, margin: int) -> None:
    rs = group.rs
    if not rs.in_coroot_lattice(gamma):
        raise ValueError("gamma must lie in the coroot lattice")
    for alpha in rs.positive_roots:
        if rs.pair_root_point(alpha, gamma) > -margin:
            raise ValueError(f"<{alpha}, gamma> > -{margin}; gamma not deep enough")


def skewed_gamma(omega: OrderFunction, i: int, factor: int = 64) -> Vec:
    """A deep gamma pairing much more with every simple root except the i-th.

    Used to witness the length inequality that makes the single finite
    reflection the shortest conjugated element.
    """
    group = omega.group
    rs = group.rs
    m = omega.support_level_radius() + 1
    k = -(-m // 2)
    base = [-k * c for c in two_rho_coroot(group)]
    # exponent of the coweight lattice modulo the coroot lattice
    index = 1
    while not all(
        rs.in_coroot_lattice(vec(tuple(index * c for c in rs.fundamental_coweights[j])))
        for j in range(rs.rank)
    ):
        index += 1
    big = factor * m * rs.coxeter_number * index
    for j in range(rs.rank):
        if j == i:
            continue
        base = [b - Fraction(big) * c for b, c in zip(base, rs.fundamental_coweights[j])]
    gamma = vec(base)
    check_gamma(group, gamma, m)
    return gamma


def coset_representatives(group: AffineWeylGroup, base_point: Vec) -> list[Perm]:
    """Deterministic representatives of W_R / W_{ell_0}, one per torus orbit point.

    Each representative is the minimal-length (then lex-least-word) finite
    element sending ell_0 to its orbit point.
    """
    base = torus_point(vec(base_point))
    chosen: dict[Vec, Perm] = {}
    fin = group.finite
    def sort_key(w):
        return (fin.length(w), fin.word(w))
    for w in sorted(fin.elements, key=sort_key):
        pt = torus_point(fin.act_point(w, base))
        if pt not in chosen:
            chosen[pt] = w
    return [chosen[pt] for pt in sorted(chosen)]


def ell_representative(group: AffineWeylGroup, base_point: Vec, ell: Sequence) -> Perm:
    """The chosen coset representative sending ell_0 to the torus point ell."""
    target = torus_point(vec(ell))
    base = torus_point(vec(base_point))
    fin = group.finite
    for w in coset_representatives(group, base_point):
        if torus_point(fin.act_point(w, base)) == target:
            return w
    raise ValueError(f"{ell} is not in the torus orbit of {base_point}")


def pregamma_group(group: AffineWeylGroup, gamma: Vec, w: Perm) -> AffineWeylElement:
    """The section of the finite Weyl group: w -> X^gamma w X^{-gamma}."""
    xg = group.translation(gamma)
    return group.compose(group.compose(xg, group.from_finite(w)), group.inverse(xg))


def pregamma_point(omega: OrderFunction, gamma: Vec, ell: Sequence) -> Vec:
    """The lift X^gamma w lambda_0 of a torus orbit point, w its chosen representative."""
    group = omega.group
    w = ell_representative(group, omega.base_point, ell)
    pt = group.finite.act_point(w, omega.base_point)
    return vec(tuple(p + g for p, g in zip(pt, gamma)))


def e_gamma_weights(omega: OrderFunction, gamma: Vec) -> list[Vec]:
    """The idempotent weight set: the lifts of the whole torus orbit, sorted."""
    return sorted(pregamma_point(omega, gamma, ell) for ell in torus_orbit(omega.group, omega.base_point))


# ----- sigma operators and the idempotent subalgebra -----

def sigma(alg, gamma: Vec, i: int, ell: Sequence):
    """sigma_alpha e(lift of ell) for the i-th finite simple root.

    The exponent is the integral of the order function at ell; the operator is
    the usual two-case one, but placed between the deep lifts of ell and of
    its reflection.  Membership in the algebra is checked downstream via the
    normal form.
    """
    from .algebra import RatOperator
    from .orderfun import integral, torus_point
    from .polyring import Poly, RatFunc

    group = alg.group
    rs = group.rs
    omega = alg.omega
    alpha = rs.simple_root(i)
    m = integral(omega, ell, alpha, gamma=gamma)
    src = pregamma_point(omega, gamma, ell)
    s = group.finite.reflection(alpha)
    ell_t = torus_point(group.finite.act_point(s, torus_point(vec(ell))))
    tgt = pregamma_point(omega, gamma, ell_t)
    ap = alg.root_poly(alpha)
    if m == -1:
        if tgt != src:
            raise ValueError("integral -1 at a point moved by the reflection")
        inv = RatFunc(Poly.const(rs.rank, 1), {ap: 1})
        return RatOperator.from_dict({
            (src, src, s): inv,
            (src, src, group.finite.identity): -inv,
        })
    return RatOperator.from_dict({(src, tgt, s): RatFunc.from_poly(ap ** m)})


def sigma_word(alg, gamma: Vec, word: Sequence[int], ell: Sequence):
    """Composition of sigma operators along a word of finite simple letters."""
    from .orderfun import torus_point

    group = alg.group
    cur = torus_point(vec(ell))
    acc = alg.idempotent(pregamma_point(alg.omega, gamma, cur))
    for i in reversed(list(word)):
        acc = alg.mul(sigma(alg, gamma, i, cur), acc)
        cur = torus_point(group.finite.act_point(group.finite.reflection(group.rs.simple_root(i)), cur))
    return acc


def sigma_element(alg, gamma: Vec, w: Perm, ell: Sequence):
    """sigma_w along the canonical finite reduced word of w."""
    return sigma_word(alg, gamma, alg.group.finite.word(w), ell)


# ----- the product formula -----

@dataclass
class ProductFormulaReport:
    w: Perm
    ell: Vec
    scalar: Fraction
    ok: bool


def product_formula_check(alg, gamma: Vec, w: Perm, ell: Sequence) -> ProductFormulaReport:
    """Compare the affine inversion product with the finite one, up to ±2^k.

    Left side: prod over the inversion set of the conjugated reflection word of
    (-db)^{omega(b)}.  Right side: prod over finite inversions of
    (-beta)^{integral omega(beta)}.  Their quotient must be a constant whose
    absolute value is a power of two.
    """
    from .orderfun import integral, torus_point
    from .polyring import Poly, RatFunc

    group = alg.group
    rs = group.rs
    omega = alg.omega
    ell = torus_point(vec(ell))
    lam = pregamma_point(omega, gamma, ell)
    gw = pregamma_group(group, gamma, w)
    lhs = RatFunc.from_poly(Poly.const(rs.rank, 1))
    for b in group.inversion_set(gw):
        m = alg.omega_value(lam, b)
        nb = -alg.root_poly(b.alpha)
        if m >= 0:
            lhs = lhs * RatFunc.from_poly(nb ** m)
        else:
            lhs = lhs * RatFunc(Poly.const(rs.rank, 1), {nb: -m})
    rhs = RatFunc.from_poly(Poly.const(rs.rank, 1))
    for beta in rs.indivisible_roots:
        if not rs.is_positive_root(beta):
            continue
        if rs.is_positive_root(group.finite.act_root(w, beta)):
            continue
        m = integral(omega, ell, beta, gamma=gamma)
        nb = -alg.root_poly(beta)
        if m >= 0:
            rhs = rhs * RatFunc.from_poly(nb ** m)
        else:
            rhs = rhs * RatFunc(Poly.const(rs.rank, 1), {nb: -m})
    if rhs.is_zero() or lhs.is_zero():
        return ProductFormulaReport(w=w, ell=ell, scalar=Fraction(0), ok=False)
    quot = lhs / rhs
    if not quot.is_constant():
        return ProductFormulaReport(w=w, ell=ell, scalar=Fraction(0), ok=False)
    c = quot.num.constant_value()
    ok = c != 0 and _is_power_of_two(abs(c))
    return ProductFormulaReport(w=w, ell=ell, scalar=c, ok=ok)


def _is_power_of_two(q: Fraction) -> bool:
    num, den = q.numerator, q.denominator
    return num & (num - 1) == 0 and den & (den - 1) == 0


# ----- the isomorphism check -----

@dataclass
class IsoReport:
    generator_images: list
    discrepancies: list
    scalars: dict

    def ok(self) -> bool:
        return not self.discrepancies


def _transport_b_operator(alg, B, gamma: Vec, op):
    """Move a finite-orbit operator to the deep lifts, block by block."""
    from .algebra import RatOperator

    omega = alg.omega
    out = {}
    for (src, tgt, u), r in op.entries:
        key = (pregamma_point(omega, gamma, src), pregamma_point(omega, gamma, tgt), u)
        out[key] = r
    return RatOperator.from_dict(out)


def iso_check(alg, B, gamma: Vec, degree_bound: int, word_bound: int) -> IsoReport:
    """Verify the generator correspondence of the finite quotient inside the
    idempotent subalgebra: products of up to ``word_bound`` generators match
    block-for-block after transport, and the sigma elements are triangular
    with constant leading coefficients over the tau basis."""
    from .polyring import Poly
    from .orderfun import torus_point

    group = alg.group
    rank = group.rs.rank
    orbit = B.orbit
    gens = []
    for ell in orbit:
        for i in range(rank):
            gens.append(("tau", i, ell))
        for m in _monomials_bounded(rank, degree_bound):
            gens.append(("poly", Poly(rank, {m: Fraction(1)}), ell))

    _b_cache: dict = {}
    _a_cache: dict = {}

    def b_gen(g):
        if g not in _b_cache:
            kind, data, ell = g
            _b_cache[g] = B.tau_letter(data, ell) if kind == "tau" else B.poly_mult(data, ell)
        return _b_cache[g]

    def a_gen(g):
        if g not in _a_cache:
            kind, data, ell = g
            if kind == "tau":
                _a_cache[g] = sigma(alg, gamma, data, ell)
            else:
                _a_cache[g] = alg.poly_mult(data, pregamma_point(alg.omega, gamma, ell))
        return _a_cache[g]

    def gen_source(g):
        return g[2]

    def gen_target(g):
        kind, data, ell = g
        if kind == "tau":
            s = group.finite.reflection(group.rs.simple_root(data))
            return torus_point(group.finite.act_point(s, ell))
        return ell

    discrepancies = []
    images = [(g, a_gen(g).entries) for g in gens]
    # grow composable words and compare the two sides on every one
    words: list[list] = [[g] for g in gens]
    for word in words:
        if _transport_b_operator(alg, B, gamma, b_gen(word[0])) != a_gen(word[0]):
            discrepancies.append(tuple(word))
    for _ in range(word_bound - 1):
        longer = []
        for word in words:
            tgt = gen_target(word[0])
            for g in gens:
                if gen_source(g) == tgt:
                    longer.append([g] + word)
        words = longer
        for word in words:
            b_side = b_gen(word[-1])
            a_side = a_gen(word[-1])
            for g in reversed(word[:-1]):
                b_side = B.mul(b_gen(g), b_side)
                a_side = alg.mul(a_gen(g), a_side)
            if _transport_b_operator(alg, B, gamma, b_side) != a_side:
                discrepancies.append(tuple(word))
    scalars = {}
    for ell in orbit:
        for w in sorted(group.finite.elements, key=lambda u: (group.finite.length(u), u)):
            op = sigma_element(alg, gamma, w, ell)
            src, coeffs = alg.normal_form_rational(op)
            bad = [g for g, f in coeffs.items() if not f.is_poly()]
            if bad:
                discrepancies.append(("membership", ell, w))
                continue
            if not coeffs:
                discrepancies.append(("vanishing", ell, w))
                continue
            top = max(coeffs, key=lambda g: (group.length(g), g.mu, g.w))
            expected = alg.element_of_entry(
                (pregamma_point(alg.omega, gamma, ell),
                 pregamma_point(alg.omega, gamma,
                                torus_point(group.finite.act_point(w, torus_point(vec(ell))))),
                 w)
            )
            lead = coeffs[top]
            if top != expected or not lead.is_constant():
                discrepancies.append(("triangularity", ell, w))
            else:
                scalars[(ell, w)] = lead.num.constant_value()
    return IsoReport(generator_images=images, discrepancies=discrepancies, scalars=scalars)


def _monomials_bounded(nvars: int, degree_bound: int):
    maxdeg = degree_bound // 2
    out = [()]
    for _ in range(nvars):
        out = [m + (e,) for m in out for e in range(maxdeg + 1)]
    return sorted(m for m in out if 0 < sum(m) <= maxdeg)


# ----- change of gamma -----

@dataclass
class GammaChangeReport:
    left_identity: bool
    right_identity: bool
    conjugation_failures: list

    def ok(self) -> bool:
        return self.left_identity and self.right_identity and not self.conjugation_failures


def gamma_change_intertwiner(alg, gamma: Vec, gamma2: Vec):
    """phi_{gamma, gamma2}: the translation intertwiner between the two lifts."""
    omega = alg.omega
    group = alg.group
    diff = vec(tuple(a - b for a, b in zip(gamma, gamma2)))
    out = alg.zero()
    for ell in torus_orbit(group, omega.base_point):
        src = pregamma_point(omega, gamma2, ell)
        out = out + alg.tau_element(group.translation(diff), src)
    return out


def e_gamma_idempotent(alg, gamma: Vec):
    out = alg.zero()
    for lam in e_gamma_weights(alg.omega, gamma):
        out = out + alg.idempotent(lam)
    return out


def gamma_change(alg, B, gamma: Vec, gamma2: Vec, degree_bound: int = 2) -> GammaChangeReport:
    """Check phi phi' = e and the conjugation factorisation on generators."""
    from .polyring import Poly

    group = alg.group
    rank = group.rs.rank
    phi12 = gamma_change_intertwiner(alg, gamma, gamma2)
    phi21 = gamma_change_intertwiner(alg, gamma2, gamma)
    left = alg.mul(phi12, phi21) == e_gamma_idempotent(alg, gamma)
    right = alg.mul(phi21, phi12) == e_gamma_idempotent(alg, gamma2)
    failures = []
    for ell in B.orbit:
        for i in range(rank):
            img1 = sigma(alg, gamma, i, ell)
            img2 = sigma(alg, gamma2, i, ell)
            conj = alg.mul(alg.mul(phi12, img2), phi21)
            if conj != img1:
                failures.append(("tau", i, ell))
        f = Poly.variable(rank, 0)
        img1 = alg.poly_mult(f, pregamma_point(alg.omega, gamma, ell))
        img2 = alg.poly_mult(f, pregamma_point(alg.omega, gamma2, ell))
        conj = alg.mul(alg.mul(phi12, img2), phi21)
        if conj != img1:
            failures.append(("poly", ell))
    return GammaChangeReport(left_identity=left, right_identity=right,
                             conjugation_failures=failures)


# ----- the kernel criterion -----

@dataclass
class KernelReport:
    vanishes_on_generic: bool
    confined_to_hyperplanes: bool
    growth_exponent: float | None
    growth_small: bool
    in_kernel: bool

    def consistent(self) -> bool:
        return (self.vanishes_on_generic == self.confined_to_hyperplanes
                == self.growth_small)


def clan_weight_character(omega: OrderFunction, sign, bound: int) -> dict[Vec, int]:
    """The indicator character of a clan: weight w lambda_0 per alcove w^{-1} nu_0."""
    from .clans import clan_of, wall_roots

    group = omega.group
    walls = wall_roots(omega)
    out: dict[Vec, int] = {}
    for g in group.ball(bound):
        if clan_of(omega, g, walls) == sign:
            out[group.act_point(g, omega.base_point)] = 1
    return out


def orbit_character(omega: OrderFunction, bound: int) -> dict[Vec, int]:
    """The character of the quotient of a weight projective: stabilizer size everywhere."""
    group = omega.group
    _, stab = group.stabilizer(omega.base_point)
    return {pt: len(stab) for pt in group.orbit_window(omega.base_point, bound)}


def hyperplane_cover_count(points, rank: int) -> int:
    """Greedy number of affine hyperplanes needed to cover the points (rank <= 2).

    In rank 2 the next line always passes through the least remaining point,
    taken with its largest parallel class; deterministic, and stable between
    growing windows exactly when the set is covered by finitely many lines.
    """
    pts = sorted(set(points))
    if rank == 1:
        return len(pts)
    if rank != 2:
        raise NotImplementedError("hyperplane cover implemented for rank <= 2")
    count = 0
    remaining = pts
    while remaining:
        if len(remaining) <= 2:
            count += 1  # one or two points lie on a single line
            break
        p = remaining[0]
        classes: dict[tuple, list] = {}
        for q in remaining[1:]:
            dx, dy = q[0] - p[0], q[1] - p[1]
            if dx == 0:
                key = (0, 1)
            else:
                s = dy / dx
                key = (1, s)
            classes.setdefault(key, []).append(q)
        best = max(classes.values(), key=len)
        covered = {p} | set(best)
        remaining = [r for r in remaining if r not in covered]
        count += 1
    return count


def kernel_clan_test(alg, gamma: Vec, character: dict, bound: int = 12,
                     growth_n: int = 60) -> KernelReport:
    """Decide kernel membership three ways and require agreement."""
    from .clans import clan_of, enumerate_clans, wall_roots
    from .modcat import gk_growth

    omega = alg.omega
    group = alg.group
    rank = group.rs.rank
    char = {vec(k): int(v) for k, v in character.items() if int(v) != 0}
    dec = enumerate_clans(omega)
    walls = dec.walls
    generic = set(dec.generic_clans())
    vanishes = True
    for g in group.ball(bound):
        if clan_of(omega, g, walls) in generic:
            if char.get(group.act_point(g, omega.base_point), 0) != 0:
                vanishes = False
                break
    # hyperplane confinement: the cover count must stabilize between two windows
    reach: dict[Vec, int] = {}
    for g in group.ball(2 * bound):
        pt = group.act_point(g, omega.base_point)
        if pt not in reach:
            reach[pt] = group.length(g)
    far = 10 ** 9
    small = [pt for pt in char if reach.get(pt, far) <= bound]
    large = [pt for pt in char if reach.get(pt, far) <= 2 * bound]
    confined = (
        hyperplane_cover_count(small, rank) == hyperplane_cover_count(large, rank)
        if char else True
    )
    report = gk_growth(group, char, growth_n)
    if report.exponent is None:
        small_growth = True
    else:
        small_growth = report.exponent <= rank - 1 + 0.1
    return KernelReport(
        vanishes_on_generic=vanishes,
        confined_to_hyperplanes=confined,
        growth_exponent=report.exponent,
        growth_small=small_growth,
        in_kernel=vanishes,
    )
