"""Exact matrix realization: scalars, generators, and finite-field oracles.

All arithmetic is exact: rationals, odd prime fields, or quadratic
extensions of either (for the unitary families, where the Galois
conjugation is the extension automorphism).  The Gram form is the
antidiagonal identity throughout; membership is M^T J M = J with
determinant one for the orthogonal families and conj(M)^T J M = J for
the unitary ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import BesselDatum, GroupDatum, GroupKind, LeviDatum, RangeError
from .roots import Root, RootKind, positive_roots
from .weyl import CapExceeded, SignedPerm


class BadParameter(ValueError):
    """A scalar parameter violates the constraint of its generator."""


class NotInUell(ValueError):
    """chi-coordinates were requested for a matrix outside U_ell."""


class WittFailure(RuntimeError):
    """A normalization or identity guaranteed by the theory failed."""


# ---------------------------------------------------------------------------
# Exact scalar rings


class RationalRing:
    """The rationals with trivial conjugation."""

    name = "Q"
    has_conjugation = False

    zero = Fraction(0)
    one = Fraction(1)

    def of(self, k) -> Fraction:
        return Fraction(k)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError
        return Fraction(1) / a

    def conj(self, a):
        return a

    def is_zero(self, a) -> bool:
        return a == 0

    def rand(self, rng):
        return Fraction(rng.randint(-6, 6), rng.randint(1, 4))

    def half(self):
        return Fraction(1, 2)


class PrimeField:
    """F_q for an odd prime q, elements 0..q-1."""

    has_conjugation = False

    def __init__(self, q: int):
        if q < 3 or q % 2 == 0 or any(q % p == 0 for p in range(3, int(q ** 0.5) + 1, 2)):
            raise RangeError(f"q must be an odd prime, got {q}")
        self.q = q
        self.name = f"F{q}"
        self.zero = 0
        self.one = 1

    def of(self, k) -> int:
        if isinstance(k, Fraction):
            return (k.numerator * pow(k.denominator, -1, self.q)) % self.q
        return k % self.q

    def add(self, a, b):
        return (a + b) % self.q

    def sub(self, a, b):
        return (a - b) % self.q

    def mul(self, a, b):
        return (a * b) % self.q

    def neg(self, a):
        return (-a) % self.q

    def inv(self, a):
        if a % self.q == 0:
            raise ZeroDivisionError
        return pow(a, -1, self.q)

    def conj(self, a):
        return a

    def is_zero(self, a) -> bool:
        return a % self.q == 0

    def rand(self, rng):
        return rng.randrange(self.q)

    def half(self):
        return pow(2, -1, self.q)

    def least_nonsquare(self) -> int:
        squares = {(x * x) % self.q for x in range(1, self.q)}
        return next(d for d in range(2, self.q) if d not in squares)


class QuadExt:
    """base(gamma) with gamma^2 = d and conj(gamma) = -gamma; d a non-square."""

    has_conjugation = True

    def __init__(self, base, d=None):
        self.base = base
        if d is None:
            d = base.of(-1) if isinstance(base, RationalRing) else base.least_nonsquare()
        self.d = d
        self.name = f"{base.name}(sqrt {d})"
        self.zero = (base.zero, base.zero)
        self.one = (base.one, base.zero)
        self.gamma = (base.zero, base.one)

    def of(self, k):
        return (self.base.of(k), self.base.zero)

    def add(self, a, b):
        return (self.base.add(a[0], b[0]), self.base.add(a[1], b[1]))

    def sub(self, a, b):
        return (self.base.sub(a[0], b[0]), self.base.sub(a[1], b[1]))

    def mul(self, a, b):
        B = self.base
        return (B.add(B.mul(a[0], b[0]), B.mul(self.d, B.mul(a[1], b[1]))),
                B.add(B.mul(a[0], b[1]), B.mul(a[1], b[0])))

    def neg(self, a):
        return (self.base.neg(a[0]), self.base.neg(a[1]))

    def inv(self, a):
        B = self.base
        norm = B.sub(B.mul(a[0], a[0]), B.mul(self.d, B.mul(a[1], a[1])))
        ninv = B.inv(norm)
        return (B.mul(a[0], ninv), B.neg(B.mul(a[1], ninv)))

    def conj(self, a):
        return (a[0], self.base.neg(a[1]))

    def is_zero(self, a) -> bool:
        return self.base.is_zero(a[0]) and self.base.is_zero(a[1])

    def rand(self, rng):
        return (self.base.rand(rng), self.base.rand(rng))

    def rand_trace_zero(self, rng):
        return (self.base.zero, self.base.rand(rng))

    def half(self):
        return (self.base.half(), self.base.zero)


def ring_for(group: GroupDatum, q: int | None = None):
    """The default exact ring: rationals (q None) or F_q, extended for unitary."""
    base = RationalRing() if q is None else PrimeField(q)
    return QuadExt(base) if group.kind.is_unitary else base


# ---------------------------------------------------------------------------
# Matrices


@dataclass(frozen=True)
class ExactMatrix:
    group: GroupDatum
    ring: object
    entries: tuple[tuple[object, ...], ...]

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        assert self.group == other.group and self.ring is other.ring
        return ExactMatrix(self.group, self.ring,
                           _mat_mul(self.ring, self.entries, other.entries))

    def inverse(self) -> "ExactMatrix":
        return ExactMatrix(self.group, self.ring, _mat_inv(self.ring, self.entries))

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.entries[i - 1][j - 1]  # 1-based, matching the index conventions

    def render(self) -> str:
        return "\n".join("[" + ", ".join(_render_scalar(x) for x in row) + "]"
                         for row in self.entries)


def _render_scalar(x) -> str:
    if isinstance(x, tuple):
        return f"{x[0]}+{x[1]}g"
    return str(x)


def _mat_identity(ring, size: int):
    return tuple(tuple(ring.one if i == j else ring.zero for j in range(size))
                 for i in range(size))


def _mat_mul(ring, A, B):
    size = len(A)
    Bt = list(zip(*B))
    out = []
    for row in A:
        out_row = []
        for col in Bt:
            acc = ring.zero
            for a, b in zip(row, col):
                if not ring.is_zero(a) and not ring.is_zero(b):
                    acc = ring.add(acc, ring.mul(a, b))
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def _mat_scale_add(ring, A, B, c):
    """A + c * B."""
    return tuple(tuple(ring.add(a, ring.mul(c, b)) for a, b in zip(ra, rb))
                 for ra, rb in zip(A, B))


def _mat_inv(ring, A):
    size = len(A)
    work = [list(row) + [ring.one if i == j else ring.zero for j in range(size)]
            for i, row in enumerate(A)]
    for col in range(size):
        pivot = next(k for k in range(col, size) if not ring.is_zero(work[k][col]))
        work[col], work[pivot] = work[pivot], work[col]
        pinv = ring.inv(work[col][col])
        work[col] = [ring.mul(pinv, x) for x in work[col]]
        for k in range(size):
            if k != col and not ring.is_zero(work[k][col]):
                f = work[k][col]
                work[k] = [ring.sub(a, ring.mul(f, b))
                           for a, b in zip(work[k], work[col])]
    return tuple(tuple(row[size:]) for row in work)


def _mat_det(ring, A):
    size = len(A)
    work = [list(row) for row in A]
    det = ring.one
    for col in range(size):
        pivot = next((k for k in range(col, size) if not ring.is_zero(work[k][col])), None)
        if pivot is None:
            return ring.zero
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = ring.neg(det)
        det = ring.mul(det, work[col][col])
        pinv = ring.inv(work[col][col])
        for k in range(col + 1, size):
            if not ring.is_zero(work[k][col]):
                f = ring.mul(work[k][col], pinv)
                work[k] = [ring.sub(a, ring.mul(f, b))
                           for a, b in zip(work[k], work[col])]
    return det


def _dagger(ring, A):
    size = len(A)
    return tuple(tuple(ring.conj(A[j][i]) for j in range(size)) for i in range(size))


def gram(ring, size: int):
    return tuple(tuple(ring.one if i + j == size - 1 else ring.zero
                       for j in range(size)) for i in range(size))


def grid_in_group(ring, entries, unitary: bool, check_det: bool) -> bool:
    size = len(entries)
    J = gram(ring, size)
    left = _dagger(ring, entries) if unitary else tuple(zip(*entries))
    if _mat_mul(ring, _mat_mul(ring, left, J), entries) != J:
        return False
    if check_det and _mat_det(ring, entries) != ring.one:
        return False
    return True


def in_group(M: ExactMatrix) -> bool:
    unitary = M.group.kind.is_unitary
    return grid_in_group(M.ring, M.entries, unitary, check_det=not unitary)


def matrix(group: GroupDatum, ring, entries) -> ExactMatrix:
    return ExactMatrix(group, ring, tuple(tuple(row) for row in entries))


def identity_matrix(group: GroupDatum, ring) -> ExactMatrix:
    return ExactMatrix(group, ring, _mat_identity(ring, group.r0))


# ---------------------------------------------------------------------------
# Generators


def _root_positions(size: int, r: int, root: Root) -> list[tuple[int, int]]:
    """Matrix support of the root vector inside an antidiagonal form of
    the given size; `r` is the rank (size = 2r or 2r+1)."""
    def prime(i: int) -> int:
        return size + 1 - i
    i, j, neg = root.i, root.j, root.neg
    if root.kind is RootKind.DIFF:
        a, b = (i, j) if not neg else (j, i)
        return [(a, b), (prime(b), prime(a))]
    if root.kind is RootKind.SUM:
        if not neg:
            return [(i, prime(j)), (j, prime(i))]
        return [(prime(j), i), (prime(i), j)]
    if root.kind is RootKind.SHORT:
        c = r + 1
        if not neg:
            return [(i, c), (c, prime(i))]
        return [(c, i), (prime(i), c)]
    if not neg:
        return [(i, prime(i))]
    return [(prime(i), i)]


def _root_grid(ring, size: int, r: int, unitary: bool, root: Root, t):
    """The nilpotent t X_alpha as a raw grid."""
    if root.kind is RootKind.SHORT and size % 2 == 0:
        raise BadParameter("short roots need an odd-size form")
    if root.kind is RootKind.LONG:
        if not unitary:
            raise BadParameter("long roots exist only for the unitary families")
        if not ring.is_zero(ring.add(t, ring.conj(t))):
            raise BadParameter("the long-root parameter must have trace zero")
    grid = [[ring.zero] * size for _ in range(size)]
    pos = _root_positions(size, r, root)
    grid[pos[0][0] - 1][pos[0][1] - 1] = t
    if len(pos) == 2:
        grid[pos[1][0] - 1][pos[1][1] - 1] = ring.neg(ring.conj(t))
    return tuple(tuple(row) for row in grid)


def _exp_grid(ring, N):
    """exp(N) for N nilpotent of order <= 3 (needs characteristic != 2)."""
    size = len(N)
    I = _mat_identity(ring, size)
    N2 = _mat_mul(ring, N, N)
    out = _mat_scale_add(ring, I, N, ring.one)
    out = _mat_scale_add(ring, out, N2, ring.half())
    assert all(ring.is_zero(x) for row in _mat_mul(ring, N2, N) for x in row)
    return out


def root_vector(group: GroupDatum, ring, root: Root, t) -> ExactMatrix:
    """The nilpotent t X_alpha (not a group element)."""
    _check_ring(group, ring)
    return ExactMatrix(group, ring,
                       _root_grid(ring, group.r0, group.r,
                                  group.kind.is_unitary, root, t))


def unipotent(group: GroupDatum, ring, root: Root, t) -> ExactMatrix:
    """The exact group element exp(t X_alpha)."""
    _check_ring(group, ring)
    N = _root_grid(ring, group.r0, group.r, group.kind.is_unitary, root, t)
    M = ExactMatrix(group, ring, _exp_grid(ring, N))
    assert in_group(M), f"unipotent({root}, t) fell outside the group"
    return M


def _check_ring(group: GroupDatum, ring) -> None:
    if group.kind.is_unitary and not ring.has_conjugation:
        raise BadParameter("unitary groups need a quadratic-extension ring")
    if group.kind.is_orthogonal and ring.has_conjugation:
        raise BadParameter("orthogonal groups use the base ring")


def n_of_x(ring, bessel: BesselDatum, xs) -> ExactMatrix:
    """The unipotent n(x) for an x-vector of length s.

    The corner entry is the unique solution of the single membership
    condition: * = -(sum_j x_j conj(x_{s+1-j})) / 2; that sum is fixed by
    conjugation, so the solution lands in the right trace class.
    """
    group = bessel.group
    _check_ring(group, ring)
    s, ell, r0 = bessel.s, bessel.ell, group.r0
    xs = tuple(xs)
    if len(xs) != s:
        raise RangeError(f"x must have length s = {s}, got {len(xs)}")
    grid = [list(row) for row in _mat_identity(ring, r0)]
    for j, x in enumerate(xs, start=1):
        grid[ell][ell + j] = x
        grid[ell + (s + 1 - j)][r0 - ell - 1] = ring.neg(ring.conj(x))
    acc = ring.zero
    for j, x in enumerate(xs, start=1):
        acc = ring.add(acc, ring.mul(x, ring.conj(xs[s - j])))
    grid[ell][r0 - ell - 1] = ring.neg(ring.mul(acc, ring.half()))
    M = ExactMatrix(group, ring, tuple(tuple(row) for row in grid))
    assert in_group(M), "n(x) fell outside the group"
    return M


def perm_rep(ring, w: SignedPerm) -> ExactMatrix:
    """A signed permutation matrix representing w.

    All signs +1, except that for SO(2r+1) an odd permutation is repaired
    by a -1 in the central entry (the smallest self-paired choice); SO(2r)
    elements are automatically even.  Membership is asserted.
    """
    group = w.group
    _check_ring(group, ring)
    r0 = group.r0
    grid = [[ring.zero] * r0 for _ in range(r0)]
    for i in range(1, r0 + 1):
        grid[w(i) - 1][i - 1] = ring.one
    M = ExactMatrix(group, ring, tuple(tuple(row) for row in grid))
    if group.kind.is_orthogonal and _mat_det(ring, M.entries) != ring.one:
        assert r0 % 2 == 1
        mid = r0 // 2
        grid[mid][mid] = ring.neg(grid[mid][mid])
        M = ExactMatrix(group, ring, tuple(tuple(row) for row in grid))
    assert in_group(M), f"perm_rep({w}) fell outside the group"
    return M


# ---------------------------------------------------------------------------
# chi-coordinates and identity checks


def in_u_ell(M: ExactMatrix, bessel: BesselDatum) -> bool:
    ring, r0, ell, ell0 = M.ring, M.group.r0, bessel.ell, bessel.ell0
    for i in range(1, r0 + 1):
        for j in range(1, r0 + 1):
            v = M[i, j]
            if i == j:
                if v != ring.one:
                    return False
            elif i > j:
                if not ring.is_zero(v):
                    return False
            elif ell < i <= ell + ell0 and ell < j <= ell + ell0:
                if not ring.is_zero(v):
                    return False
    return True


def chi_coords(M: ExactMatrix, bessel: BesselDatum) -> tuple:
    """Additive coordinates of the character on U_ell."""
    if not in_u_ell(M, bessel):
        raise NotInUell("chi-coordinates need an element of U_ell")
    ring, ell = M.ring, bessel.ell
    coords = [M[i, i + 1] for i in range(1, ell)]
    acc = ring.zero
    for j, aj in enumerate(bessel.a, start=1):
        if aj != 0:
            acc = ring.add(acc, ring.mul(ring.of(aj), M[ell, ell + j]))
    coords.append(acc)
    return tuple(coords)


def in_parabolic(M: ExactMatrix, levi: LeviDatum) -> bool:
    """Preservation of the standard partial flag (block upper-triangular)."""
    ring, r0, n = M.ring, M.group.r0, levi.n
    for i in range(n + 1, r0 + 1):
        for j in range(1, n + 1):
            if not ring.is_zero(M[i, j]):
                return False
    for i in range(r0 - n + 1, r0 + 1):
        for j in range(1, r0 - n + 1):
            if not ring.is_zero(M[i, j]):
                return False
    return True


@dataclass(frozen=True)
class CommutationReport:
    alpha0: Root
    coordinate: int          # the x-coordinate index s0 matched by alpha0
    shift: object            # observed last-coordinate shift of chi
    expected: object         # conj(y) * t up to the recorded sign
    sign: int                # the consistent sign: shift = sign * conj(y) * t
    matrix_identity: bool    # n(x) p n(x)^-1 == p * exp(shift X_beta) exactly

    @property
    def ok(self) -> bool:
        return True


def _alpha0_root(bessel: BesselDatum, k0: int | None, sign: int) -> Root:
    ell = bessel.ell
    if k0 is None:
        return Root.short(ell)
    return Root.sum(ell, k0) if sign > 0 else Root.diff(ell, k0)


def _alpha0_column(bessel: BesselDatum, alpha0: Root) -> int:
    """The x-coordinate index matched by alpha0.

    X_{alpha0} has its row-ell entry in column b; conjugation by n(x)
    couples it to the mirror entry -conj(x_{s+2+ell-b}) of n(x).
    """
    group, ell = bessel.group, bessel.ell
    if alpha0.kind is RootKind.SHORT:
        col = group.r + 1
    elif alpha0.kind is RootKind.DIFF:
        col = alpha0.j
    else:
        col = group.prime(alpha0.j)
    return bessel.s + 2 + ell - col


def verify_commutation(ring, levi: LeviDatum, bessel: BesselDatum,
                       xs, k0: int | None, sign: int, t) -> CommutationReport:
    """Check n(x) (I + t X_{alpha0}) n(x)^-1 against the beta-shift law.

    The chi-coordinates of the conjugate must differ from those of the
    original exactly in the last coordinate, by +/- conj(y) t where y is
    the x-coordinate in the column matched by alpha0.
    """
    group = bessel.group
    alpha0 = _alpha0_root(bessel, k0, sign)
    s0 = _alpha0_column(bessel, alpha0)
    if not 1 <= s0 <= bessel.s:
        raise RangeError(f"{alpha0} does not match any x-coordinate")
    nx = n_of_x(ring, bessel, xs)
    p = unipotent(group, ring, alpha0, t)
    lhs = nx * p * nx.inverse()
    base = chi_coords(p, bessel)
    conj = chi_coords(lhs, bessel)
    if conj[:-1] != base[:-1]:
        raise WittFailure("the conjugate moved a frozen chi-coordinate")
    shift = ring.sub(conj[-1], base[-1])
    y = tuple(xs)[s0 - 1]
    expected = ring.mul(ring.conj(y), t)
    if shift == expected:
        obs_sign = 1
    elif shift == ring.neg(expected):
        obs_sign = -1
    else:
        raise WittFailure(f"shift {shift} is not +/- conj(y) t = {expected}")
    beta = Root.sum(bessel.ell, bessel.ell + 1)
    rhs = p * unipotent(group, ring, beta, shift)
    return CommutationReport(alpha0, s0, shift, expected, obs_sign,
                             matrix_identity=lhs.entries == rhs.entries)


def verify_w0_normalizes(ring, levi: LeviDatum, bessel: BesselDatum, xs) -> bool:
    """w0^-1 n(x) w0 lies in P, so the x-layer collapses on the last coset."""
    from .weyl import w0_maximal
    w0 = perm_rep(ring, w0_maximal(levi))
    conj = w0.inverse() * n_of_x(ring, bessel, xs) * w0
    return in_parabolic(conj, levi)


# ---------------------------------------------------------------------------
# Finite-field oracles


def _middle_generators(ring, size: int, unitary: bool):
    """Generators (as raw grids) of the isometry group of the antidiagonal
    form of the given size over a finite ring: root unipotents and torus."""
    k = size // 2
    odd = size % 2 == 1
    grids = []
    roots: list[Root] = []
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            for neg in (False, True):
                roots.append(Root.diff(i, j, neg))
                roots.append(Root.sum(i, j, neg))
        if odd:
            roots.append(Root.short(i))
            roots.append(Root.short(i, neg=True))
        if unitary:
            roots.append(Root.long(i))
            roots.append(Root.long(i, neg=True))
    units = [x for x in _ring_units(ring)]
    for root in roots:
        for t in units:
            if root.kind is RootKind.LONG:
                if ring.is_zero(ring.add(t, ring.conj(t))):
                    if not ring.is_zero(t):
                        grids.append(_exp_grid(ring, _root_grid(ring, size, k, unitary, root, t)))
                continue
            grids.append(_exp_grid(ring, _root_grid(ring, size, k, unitary, root, t)))
    for i in range(1, k + 1):
        for t in units:
            if ring.is_zero(ring.sub(t, ring.one)) or ring.is_zero(t):
                continue
            try:
                tinv = ring.inv(ring.conj(t)) if unitary else ring.inv(t)
            except ZeroDivisionError:
                continue
            grid = [list(row) for row in _mat_identity(ring, size)]
            grid[i - 1][i - 1] = t
            grid[size - i][size - i] = tinv
            grids.append(tuple(tuple(row) for row in grid))
    return grids


def _ring_units(ring):
    if isinstance(ring, PrimeField):
        return [x for x in range(ring.q)]
    if isinstance(ring, QuadExt) and isinstance(ring.base, PrimeField):
        return [(a, b) for a in range(ring.base.q) for b in range(ring.base.q)]
    raise RangeError("finite enumeration needs a finite ring")


def _bfs_closure(ring, gens, cap: int):
    size = len(gens[0])
    ident = _mat_identity(ring, size)
    seen = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for M in frontier:
            for S in gens:
                P = _mat_mul(ring, M, S)
                if P not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(f"group closure exceeds cap {cap}")
                    seen.add(P)
                    new.append(P)
        frontier = new
    return seen


def chi_vector_action(grid, a, ring):
    """The action of a middle-block isometry on the coordinate vector of chi."""
    return tuple(
        _dot(ring, row, a) for row in grid
    )


def _dot(ring, row, vec):
    acc = ring.zero
    for x, y in zip(row, vec):
        if not ring.is_zero(x) and not ring.is_zero(y):
            acc = ring.add(acc, ring.mul(x, y))
    return acc


def _is_normal_shape(ring, a) -> bool:
    # delta = a[0] may be zero here: the isotropic class normalizes to
    # (0, ..., 0, 1).  A nonzero delta is required of a Bessel character,
    # not of the normalization itself.
    return all(ring.is_zero(x) for x in a[1:-1]) and a[-1] == ring.one


def witt_normalize(q: int, ell0: int, a, unitary: bool = False,
                   cap: int = 500_000):
    """Carry a nonzero coordinate vector to the (delta, 0, ..., 0, 1) shape.

    Breadth-first orbit search under the middle isometry group over F_q.
    Returns (g, a_normalized, delta) with g an exact matrix of the middle
    group; raises :class:`WittFailure` if the orbit misses every normal
    shape (which would contradict the normalization guarantee).
    """
    base = PrimeField(q)
    ring = QuadExt(base) if unitary else base
    a = tuple(ring.of(x) if not (unitary and isinstance(x, tuple)) else x for x in a)
    if len(a) != ell0:
        raise RangeError(f"a must have length ell0 = {ell0}")
    if all(ring.is_zero(x) for x in a):
        raise RangeError("a must be nonzero")
    gens = _middle_generators(ring, ell0, unitary)
    ident = _mat_identity(ring, ell0)
    if _is_normal_shape(ring, a):
        return matrix_like(ring, ident), a, a[0]
    seen = {a: None}
    frontier = [a]
    while frontier:
        new = []
        for vec in frontier:
            for gi, g in enumerate(gens):
                img = chi_vector_action(g, vec, ring)
                if img not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(f"orbit exceeds cap {cap}")
                    seen[img] = (vec, gi)
                    if _is_normal_shape(ring, img):
                        total = ident
                        node = img
                        path = []
                        while seen[node] is not None:
                            prev, gidx = seen[node]
                            path.append(gidx)
                            node = prev
                        for gidx in path:  # path runs newest to oldest
                            total = _mat_mul(ring, total, gens[gidx])
                        assert chi_vector_action(total, a, ring) == img
                        return matrix_like(ring, total), img, img[0]
                    new.append(img)
        frontier = new
    raise WittFailure(f"no normal shape in the orbit of {a}")


@dataclass(frozen=True)
class MiddleMatrix:
    ring: object
    entries: tuple


def matrix_like(ring, entries) -> MiddleMatrix:
    return MiddleMatrix(ring, tuple(tuple(row) for row in entries))


def m_chi_stabilizer(q: int, ell0: int, a, unitary: bool = False,
                     cap: int = 200_000) -> list[MiddleMatrix]:
    """All middle-block isometries fixing the coordinate vector of chi.

    Full enumeration of the middle group by closure, then the pointwise
    stabilizer; closure under products is asserted.
    """
    base = PrimeField(q)
    ring = QuadExt(base) if unitary else base
    a = tuple(ring.of(x) if not (unitary and isinstance(x, tuple)) else x for x in a)
    gens = _middle_generators(ring, ell0, unitary)
    grp = _bfs_closure(ring, gens, cap)
    stab = [g for g in grp if chi_vector_action(g, a, ring) == a]
    stab_set = set(stab)
    for g in stab:
        for h in stab:
            if _mat_mul(ring, g, h) not in stab_set:
                raise WittFailure("stabilizer is not closed under products")
    return [matrix_like(ring, g) for g in sorted(stab)]


# ---------------------------------------------------------------------------
# Finite-group double-coset oracle


@dataclass(frozen=True)
class OracleReport:
    group_order: int
    num_cosets: int
    coset_sizes: tuple[int, ...]
    coverage: bool                       # every element reached from a seed
    seed_labels: tuple[tuple[str, int], ...]   # (label, coset id) per seed
    equal_norm_merged: bool


def coset_oracle(q: int, levi: LeviDatum, bessel: BesselDatum,
                 group_cap: int = 200_000) -> OracleReport:
    """Enumerate G(F_q), partition into R_chi \\ G / P, and check coverage.

    Every double coset must contain n(x) w for a canonical representative w
    and some x over F_q, and x-vectors of equal norm must land in the same
    coset.  Intended for the smallest configuration (odd orthogonal rank 2,
    q = 3); capped.
    """
    from .weyl import coset_reps
    group = levi.group
    ring = ring_for(group, q)
    if group.kind.is_unitary:
        raise RangeError("the finite oracle is implemented for the orthogonal families")
    r0, r, n, ell, s = group.r0, group.r, levi.n, bessel.ell, bessel.s

    def unip(root: Root, t) -> tuple:
        return _exp_grid(ring, _root_grid(ring, r0, r, False, root, ring.of(t)))

    units = [t for t in range(1, q)]
    all_roots = positive_roots(group)
    gens = []
    for root in all_roots:
        for t in units:
            gens.append(unip(root, t))
            gens.append(unip(root.negate(), t))
    for i in range(1, r + 1):
        for t in units:
            if t == 1:
                continue
            grid = [list(row) for row in _mat_identity(ring, r0)]
            grid[i - 1][i - 1] = ring.of(t)
            grid[r0 - i][r0 - i] = ring.inv(ring.of(t))
            gens.append(tuple(tuple(row) for row in grid))
    G = _bfs_closure(ring, gens, group_cap)

    # R_chi generators: U_ell root groups plus the middle stabilizer of chi
    middle_sys = {root for root in all_roots
                  if root.i > ell and (root.j == 0 or root.j > ell)}
    r_gens = []
    for root in all_roots:
        if root not in middle_sys:
            for t in units:
                r_gens.append(unip(root, t))
    stab = m_chi_stabilizer(q, bessel.ell0, bessel.a)
    for g in stab:
        grid = [list(row) for row in _mat_identity(ring, r0)]
        for i in range(bessel.ell0):
            for j in range(bessel.ell0):
                grid[ell + i][ell + j] = g.entries[i][j]
        r_gens.append(tuple(tuple(row) for row in grid))

    # P generators: Levi (GL_n block and the G(m) block) plus Sigma_P+ roots
    from .roots import sigma_P_plus
    p_gens = []
    for root in sigma_P_plus(levi):
        for t in units:
            p_gens.append(unip(root, t))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                for t in units:
                    p_gens.append(unip(Root.diff(i, j) if i < j
                                       else Root.diff(j, i, neg=True), t))
    for root in all_roots:
        if root.i > n and (root.j == 0 or root.j > n):
            for t in units:
                p_gens.append(unip(root, t))
                p_gens.append(unip(root.negate(), t))
    for i in range(1, r + 1):
        for t in units:
            if t == 1:
                continue
            grid = [list(row) for row in _mat_identity(ring, r0)]
            grid[i - 1][i - 1] = ring.of(t)
            grid[r0 - i][r0 - i] = ring.inv(ring.of(t))
            p_gens.append(tuple(tuple(row) for row in grid))

    coset_of: dict = {}
    sizes: list[int] = []
    seeds: list[tuple[tuple[int, ...], str, int]] = []

    def close_orbit(seed, cid) -> int:
        count = 0
        frontier = [seed]
        coset_of[seed] = cid
        count += 1
        while frontier:
            new = []
            for M in frontier:
                for S in r_gens:
                    P2 = _mat_mul(ring, S, M)
                    if P2 not in coset_of:
                        coset_of[P2] = cid
                        count += 1
                        new.append(P2)
                for S in p_gens:
                    P2 = _mat_mul(ring, M, S)
                    if P2 not in coset_of:
                        coset_of[P2] = cid
                        count += 1
                        new.append(P2)
            frontier = new
        return count

    xs_all = list(itertools.product(range(q), repeat=s))
    next_id = 0
    for w in coset_reps(levi):
        wm = perm_rep(ring, w).entries
        for xs in xs_all:
            seed = _mat_mul(ring, n_of_x(ring, bessel, [ring.of(x) for x in xs]).entries, wm)
            if seed not in coset_of:
                sizes.append(close_orbit(seed, next_id))
                next_id += 1
            seeds.append((xs, w.to_cycle_string(), coset_of[seed]))

    coverage = len(coset_of) == len(G) and all(M in coset_of for M in G)

    # equal-norm x-vectors must share a coset, for every w
    merged = True
    by_w: dict[str, dict[int, set[int]]] = {}
    for xs, wname, cid in seeds:
        norm = sum(v * v for v in xs) % q
        by_w.setdefault(wname, {}).setdefault(norm, set()).add(cid)
    for norms in by_w.values():
        if any(len(v) > 1 for v in norms.values()):
            merged = False
    labels = tuple((f"x={xs} w={wname}", cid) for xs, wname, cid in seeds)
    return OracleReport(len(G), next_id, tuple(sizes), coverage,
                        labels, merged)
