"""The (extended) affine Weyl group of an affinised root system.

Elements are pairs ``X^mu * w`` with ``mu`` a translation (coroot coordinates)
and ``w`` in the finite Weyl group.  Finite elements are stored as permutations
of the root list, so equality is by action; each element's lexicographically
least reduced word, matrices and length are cached on the group object.

Lengths come in two independent flavours: an inversion-set count obtained by
enumerating the finitely many affine roots a given element can invert, and the
closed formula

    l(w X^mu) = sum_{a in R+_red, w a < 0} |<a, mu> + 1|
              + sum_{a in R+_red, w a > 0} |<a, mu>|
              + sum_{a in R+ and 2R} |<a, mu>| / 2

together with its ``X^mu w`` variant.  The two are cross-checked in the tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .rootsys import AffineRoot, AffineRootSystem, FiniteRootSystem, RootKey, Vec, vec

Perm = tuple[int, ...]


class FiniteWeylGroup:
    """The finite Weyl group as permutations of the root list."""

    def __init__(self, rs: FiniteRootSystem):
        self.rs = rs
        self.rank = rs.rank
        n = len(rs.roots)
        self.identity: Perm = tuple(range(n))
        self._index = {key: i for i, key in enumerate(rs.roots)}
        self.simple: list[Perm] = []
        for i in range(rs.rank):
            si = rs.simple_root(i)
            self.simple.append(tuple(self._index[rs.reflect_root(si, key)] for key in rs.roots))
        self.elements: list[Perm] = []
        self._word: dict[Perm, tuple[int, ...]] = {}
        self._enumerate()
        self._point_matrix: dict[Perm, list[Vec]] = {}
        self._length: dict[Perm, int] = {}

    def _enumerate(self) -> None:
        frontier = [self.identity]
        self._word[self.identity] = ()
        self.elements.append(self.identity)
        while frontier:
            nxt = []
            for w in frontier:
                for i, s in enumerate(self.simple):
                    ws = self.compose(w, s)  # w * s_i, appends a letter on the right
                    if ws not in self._word:
                        self._word[ws] = self._word[w] + (i,)
                        self.elements.append(ws)
                        nxt.append(ws)
            frontier = nxt

    # ----- group operations -----

    def compose(self, u: Perm, v: Perm) -> Perm:
        return tuple(u[v[i]] for i in range(len(v)))

    def inverse(self, w: Perm) -> Perm:
        out = [0] * len(w)
        for i, wi in enumerate(w):
            out[wi] = i
        return tuple(out)

    def act_root(self, w: Perm, key: RootKey) -> RootKey:
        return self.rs.roots[w[self._index[key]]]

    def length(self, w: Perm) -> int:
        if w not in self._length:
            rs = self.rs
            self._length[w] = sum(
                1 for key in rs.indivisible_roots
                if rs.is_positive_root(key) and not rs.is_positive_root(self.act_root(w, key))
            )
        return self._length[w]

    def word(self, w: Perm) -> tuple[int, ...]:
        """A lexicographically least reduced word (indices into the simple roots)."""
        out = []
        cur = w
        while cur != self.identity:
            i = next(
                i for i in range(self.rank)
                if not self.rs.is_positive_root(self.act_root(self.inverse(cur), self.rs.simple_root(i)))
            )
            out.append(i)
            cur = self.compose(self.simple[i], cur)
        return tuple(out)

    def from_word(self, word: Sequence[int]) -> Perm:
        w = self.identity
        for i in word:
            w = self.compose(w, self.simple[i])
        return w

    def longest_element(self) -> Perm:
        return max(self.elements, key=self.length)

    def reflection(self, key: RootKey) -> Perm:
        return tuple(self._index[self.rs.reflect_root(key, root)] for root in self.rs.roots)

    def point_matrix(self, w: Perm) -> list[Vec]:
        """Columns of the action of w on V in simple-coroot coordinates."""
        if w not in self._point_matrix:
            rs = self.rs
            word = self.word(w)
            cols = []
            for i in range(self.rank):
                # apply w = s_{i1} ... s_{ik} to the basis vector, leftmost letter outermost
                cur = vec(tuple(1 if j == i else 0 for j in range(self.rank)))
                for letter in reversed(word):
                    cur = rs.reflect_point(rs.simple_root(letter), cur)
                cols.append(cur)
            self._point_matrix[w] = cols
        return self._point_matrix[w]

    def act_point(self, w: Perm, x: Vec) -> Vec:
        cols = self.point_matrix(w)
        return tuple(
            sum((x[i] * cols[i][j] for i in range(self.rank)), Fraction(0))
            for j in range(self.rank)
        )


@dataclass(frozen=True)
class AffineWeylElement:
    """The element ``X^mu * w`` with mu in coroot coordinates and w a root permutation."""

    mu: Vec
    w: Perm

    def is_translation(self) -> bool:
        return all(i == wi for i, wi in enumerate(self.w))


class AffineWeylGroup:
    """Operations for the affine (and extended affine) Weyl group of an affinisation."""

    def __init__(self, ars: AffineRootSystem):
        self.ars = ars
        self.rs = ars.finite
        self.rank = self.rs.rank
        self.finite = FiniteWeylGroup(self.rs)
        self.identity = AffineWeylElement(vec((0,) * self.rank), self.finite.identity)
        self._simple_affine: list[AffineWeylElement] = []
        for a in ars.delta:
            w = self.finite.reflection(a.alpha)
            mu = tuple(-Fraction(a.level) * c for c in self.rs.coroot_coords(a.alpha))
            self._simple_affine.append(AffineWeylElement(vec(mu), w))
        self._word_cache: dict[AffineWeylElement, tuple[int, ...]] = {}

    # ----- elements -----

    def simple_reflection(self, i: int) -> AffineWeylElement:
        """s_{a_i} for the affine basis, index 0 being the affine node."""
        return self._simple_affine[i]

    def translation(self, mu: Sequence) -> AffineWeylElement:
        return AffineWeylElement(vec(mu), self.finite.identity)

    def from_finite(self, w: Perm) -> AffineWeylElement:
        return AffineWeylElement(vec((0,) * self.rank), w)

    def reflection_of(self, a: AffineRoot) -> AffineWeylElement:
        w = self.finite.reflection(a.alpha)
        mu = tuple(-Fraction(a.level) * c for c in self.rs.coroot_coords(a.alpha))
        return AffineWeylElement(vec(mu), w)

    # ----- group law and actions -----

    def compose(self, u: AffineWeylElement, v: AffineWeylElement) -> AffineWeylElement:
        # (mu, w)(nu, y) = (mu + w nu, w y)
        wnu = self.finite.act_point(u.w, v.mu)
        return AffineWeylElement(
            vec(tuple(a + b for a, b in zip(u.mu, wnu))),
            self.finite.compose(u.w, v.w),
        )

    def inverse(self, g: AffineWeylElement) -> AffineWeylElement:
        wi = self.finite.inverse(g.w)
        mu = self.finite.act_point(wi, tuple(-c for c in g.mu))
        return AffineWeylElement(vec(mu), wi)

    def act_point(self, g: AffineWeylElement, x: Vec) -> Vec:
        wx = self.finite.act_point(g.w, x)
        return tuple(a + b for a, b in zip(wx, g.mu))

    def act_root(self, g: AffineWeylElement, a: AffineRoot) -> AffineRoot:
        # X^mu smashes the level: X^mu b = b - <db, mu>; the finite part permutes roots.
        beta = self.finite.act_root(g.w, a.alpha)
        shift = self.rs.pair_root_point(beta, g.mu)
        if shift.denominator != 1:
            raise ValueError("translation does not preserve the affine root lattice")
        return AffineRoot(beta, a.level - int(shift))

    def finite_part(self, g: AffineWeylElement) -> Perm:
        return g.w

    # ----- lengths -----

    def inversion_set(self, g: AffineWeylElement) -> list[AffineRoot]:
        """S+ cap g^{-1} S-, enumerated exactly.

        Per finite root the image of alpha + k is beta + (k + c) with beta and
        c read off from the image of alpha + 0, so only levels up to |c| + 1
        can invert and each test is a sign check.
        """
        out = []
        ars = self.ars
        pos = self.rs.is_positive_root
        for alpha in self.rs.roots:
            image0 = self.act_root(g, AffineRoot(alpha, 0))
            beta, c = image0.alpha, image0.level
            lo = 0 if pos(alpha) else 1
            hi = lo + abs(c) + 1
            beta_pos = pos(beta)
            for k in range(lo, hi + 1):
                a = AffineRoot(alpha, k)
                if not ars.is_root(a):
                    continue
                lvl = k + c
                if lvl < 0 or (lvl == 0 and not beta_pos):
                    out.append(a)
        return sorted(out)

    def length_inversions(self, g: AffineWeylElement) -> int:
        """#(S+ inverted by g), by direct enumeration of the inverting levels."""
        return len(self.inversion_set(g))

    def length_formula(self, g: AffineWeylElement) -> int:
        """Closed-form length, evaluated in both factorizations as a consistency check."""
        mu, w = g.mu, g.w
        # g = X^mu w
        total_a = self._length_formula_xw(mu, w)
        # g = w X^nu with nu = w^{-1} mu
        nu = self.finite.act_point(self.finite.inverse(w), mu)
        total_b = self._length_formula_wx(nu, w)
        if total_a != total_b:
            raise ArithmeticError("the two length formulas disagree; length data corrupt")
        return total_a

    def _length_formula_wx(self, mu: Vec, w: Perm) -> int:
        rs = self.rs
        total = Fraction(0)
        for alpha in rs.positive_roots:
            pairing = rs.pair_root_point(alpha, mu)
            if alpha in rs.indivisible_roots:
                walpha = self.finite.act_root(w, alpha)
                if rs.is_positive_root(walpha):
                    total += abs(pairing)
                else:
                    total += abs(pairing + 1)
            else:
                total += abs(pairing) / 2
        if total.denominator != 1:
            raise ArithmeticError("length formula gave a non-integer")
        return int(total)

    def _length_formula_xw(self, mu: Vec, w: Perm) -> int:
        rs = self.rs
        total = Fraction(0)
        for alpha in rs.positive_roots:
            pairing = rs.pair_root_point(alpha, mu)
            if alpha in rs.indivisible_roots:
                walpha = self.finite.act_root(self.finite.inverse(w), alpha)
                # alpha in R+ cap w R- means w^{-1} alpha in R-
                if rs.is_positive_root(walpha):
                    total += abs(pairing)
                else:
                    total += abs(pairing - 1)
            else:
                total += abs(pairing) / 2
        if total.denominator != 1:
            raise ArithmeticError("length formula gave a non-integer")
        return int(total)

    def length(self, g: AffineWeylElement) -> int:
        return self.length_formula(g)

    # ----- words -----

    def is_left_descent(self, g: AffineWeylElement, i: int) -> bool:
        """l(s_i g) < l(g), decided by the sign of g^{-1}(a_i)."""
        a = self.ars.delta[i]
        return not self.ars.is_positive(self.act_root(self.inverse(g), a))

    def reduced_word(self, g: AffineWeylElement) -> tuple[int, ...]:
        """The lexicographically least reduced word, stripping left descents.

        The word lists letters in group order: ``g = s_{w[0]} s_{w[1]} ...``.
        """
        if g in self._word_cache:
            return self._word_cache[g]
        out = []
        cur = g
        while cur != self.identity:
            i = next(i for i in range(len(self.ars.delta)) if self.is_left_descent(cur, i))
            out.append(i)
            cur = self.compose(self.simple_reflection(i), cur)
        word = tuple(out)
        self._word_cache[g] = word
        return word

    def from_word(self, word: Sequence[int]) -> AffineWeylElement:
        g = self.identity
        for i in word:
            g = self.compose(g, self.simple_reflection(i))
        return g

    # ----- minimal coset representatives and b_w -----

    def min_coset_rep(self, mu: Sequence) -> AffineWeylElement:
        """theta(mu) = X^mu w_mu, the shortest element of X^mu W_R.

        ``w_mu`` is characterised through its inverse: for positive roots a,
        ``w_mu^{-1} a < 0`` exactly when ``<a, mu> > 0``.  The inverse is found
        by the greedy antidominant walk, every step of which crosses a wall
        pairing strictly positively with mu.
        """
        mu = vec(mu)
        if not self.rs.in_coweight_lattice(mu):
            raise ValueError("mu must lie in the coweight lattice")
        x = mu
        w = self.finite.identity
        while True:
            i = next(
                (i for i in range(self.rank) if self.rs.pair_root_point(self.rs.simple_root(i), x) > 0),
                None,
            )
            if i is None:
                break
            x = self.rs.reflect_point(self.rs.simple_root(i), x)
            w = self.finite.compose(self.finite.simple[i], w)
        return AffineWeylElement(mu, self.finite.inverse(w))

    def b_w(self, w: Perm) -> Vec:
        """The coweight sum over left descents of w: b_w = sum w^{-1} w0 varpi_a."""
        rs = self.rs
        w0 = self.finite.longest_element()
        winv = self.finite.inverse(w)
        total = [Fraction(0)] * self.rank
        for i in range(self.rank):
            # s_i w < w iff w^{-1} alpha_i < 0
            if not rs.is_positive_root(self.finite.act_root(winv, rs.simple_root(i))):
                img = self.finite.act_point(self.finite.compose(winv, w0), rs.fundamental_coweights[i])
                total = [t + c for t, c in zip(total, img)]
        return vec(total)

    # ----- stabilizers, orbits, witnesses -----

    def vanishing_roots(self, lam: Vec) -> list[AffineRoot]:
        """Positive affine roots vanishing at lam (one per wall through lam)."""
        out = []
        for alpha in self.rs.positive_roots:
            v = self.rs.pair_root_point(alpha, lam)
            if v.denominator == 1:
                a = AffineRoot(alpha, -int(v))
                if self.ars.is_root(a):
                    out.append(a)
        return sorted(out)

    def stabilizer(self, lam: Vec) -> tuple[list[AffineWeylElement], list[AffineWeylElement]]:
        """Generating reflections and the full (finite) stabilizer of a point."""
        lam = vec(lam)
        gens = [self.reflection_of(a) for a in self.vanishing_roots(lam)]
        elements = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = self.compose(s, g)
                    if h not in elements:
                        elements.add(h)
                        nxt.append(h)
            frontier = nxt
        return gens, sorted(elements, key=lambda g: (self.length(g), g.mu, g.w))

    def to_fundamental_domain(self, lam: Vec) -> tuple[Vec, AffineWeylElement]:
        """The representative of lam in the closed fundamental alcove, with g: g lam = rep."""
        lam = vec(lam)
        g = self.identity
        cur = lam
        while True:
            i = next(
                (i for i, a in enumerate(self.ars.delta) if self.ars.evaluate(a, cur) < 0),
                None,
            )
            if i is None:
                return cur, g
            s = self.simple_reflection(i)
            cur = self.act_point(s, cur)
            g = self.compose(s, g)

    def witness(self, lam: Vec, lam0: Vec) -> AffineWeylElement | None:
        """Some w with w lam0 = lam, or None if lam is not in the orbit of lam0."""
        rep1, g1 = self.to_fundamental_domain(vec(lam))
        rep0, g0 = self.to_fundamental_domain(vec(lam0))
        if rep1 != rep0:
            return None
        return self.compose(self.inverse(g1), g0)

    def ball(self, length_bound: int) -> list[AffineWeylElement]:
        """All elements of length <= length_bound, ordered by (length, discovery).

        Results are cached incrementally: growing the bound extends the last
        breadth-first frontier instead of restarting.
        """
        if not hasattr(self, "_ball_seen"):
            self._ball_seen = {self.identity: 0}
            self._ball_order = [self.identity]
            self._ball_frontier = [self.identity]
            self._ball_radius = 0
        for n in range(self._ball_radius + 1, length_bound + 1):
            nxt = []
            for g in self._ball_frontier:
                for i in range(len(self.ars.delta)):
                    h = self.compose(self.simple_reflection(i), g)
                    if h not in self._ball_seen and self.is_left_descent(h, i):
                        self._ball_seen[h] = n
                        self._ball_order.append(h)
                        nxt.append(h)
            self._ball_frontier = nxt
            self._ball_radius = n
        if length_bound >= self._ball_radius:
            return list(self._ball_order)
        return [g for g in self._ball_order if self._ball_seen[g] <= length_bound]

    def orbit_window(self, lam0: Vec, length_bound: int) -> dict[Vec, AffineWeylElement]:
        """All distinct w lam0 with l(w) <= bound, each with a minimal-length witness."""
        lam0 = vec(lam0)
        out: dict[Vec, AffineWeylElement] = {}
        for g in self.ball(length_bound):
            pt = self.act_point(g, lam0)
            if pt not in out:
                out[pt] = g
        return out
