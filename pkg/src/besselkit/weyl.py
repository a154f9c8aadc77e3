"""Signed-permutation Weyl groups realized inside S_{r0}.

Elements are stored as full images of 1..r0 subject to w(i') = w(i)' where
i' = r0 + 1 - i.  For SO(2r) the number of sign changes is even.  The
module provides enumeration, parabolic membership, canonical coset
representatives, and the disjoint-transposition normal form of a coset
representative, built by explicit rewriting (cycle splitting followed by
sign-change absorption), never by searching the coset.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterator

from .core import GroupDatum, GroupKind, LeviDatum, RangeError

DEFAULT_CAP = 10 ** 8


class MixedGroup(ValueError):
    """Two elements of different groups were combined."""


class CapExceeded(RuntimeError):
    """An enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class SignedPerm:
    group: GroupDatum
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        r0 = self.group.r0
        img = self.image
        if len(img) != r0 or sorted(img) != list(range(1, r0 + 1)):
            raise ValueError(f"image must be a bijection of 1..{r0}: {img}")
        for i in range(1, r0 + 1):
            if img[r0 - i] != r0 + 1 - img[i - 1]:
                raise ValueError(f"image does not commute with the involution: {img}")
        if self.group.kind is GroupKind.SO_EVEN:
            r = self.group.r
            if sum(1 for i in range(r) if img[i] > r) % 2:
                raise ValueError(f"odd number of sign changes in SO(2r): {img}")

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def __mul__(self, other: "SignedPerm") -> "SignedPerm":
        return compose(self, other)

    def inverse(self) -> "SignedPerm":
        inv = [0] * len(self.image)
        for i, v in enumerate(self.image, start=1):
            inv[v - 1] = i
        return SignedPerm(self.group, tuple(inv))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image, start=1))

    def sign_changes(self) -> int:
        r = self.group.r
        return sum(1 for i in range(1, r + 1) if self.image[i - 1] > r)

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles of the underlying permutation of 1..r0."""
        seen: set[int] = set()
        out = []
        for start in range(1, self.group.r0 + 1):
            if start in seen or self(start) == start:
                continue
            cyc = [start]
            seen.add(start)
            t = self(start)
            while t != start:
                cyc.append(t)
                seen.add(t)
                t = self(t)
            out.append(tuple(cyc))
        return out

    def to_cycle_string(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(i) for i in c) + ")" for c in cyc)

    def __str__(self) -> str:
        return self.to_cycle_string()


def identity(group: GroupDatum) -> SignedPerm:
    return SignedPerm(group, tuple(range(1, group.r0 + 1)))


def compose(u: SignedPerm, v: SignedPerm) -> SignedPerm:
    """(u o v)(i) = u(v(i))."""
    if u.group != v.group:
        raise MixedGroup(f"cannot compose over {u.group} and {v.group}")
    return SignedPerm(u.group, tuple(u.image[x - 1] for x in v.image))


def inverse(w: SignedPerm) -> SignedPerm:
    return w.inverse()


def from_cycles(group: GroupDatum, cycles: list[tuple[int, ...]]) -> SignedPerm:
    img = list(range(1, group.r0 + 1))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a - 1] = b
    return SignedPerm(group, tuple(img))


def parse_cycle_string(group: GroupDatum, text: str) -> SignedPerm:
    """Parse e.g. "(1 9)(2 8)"; "()" and the empty string give the identity."""
    text = text.strip()
    if text in ("", "()"):
        return identity(group)
    if not re.fullmatch(r"(\(\s*\d+(\s+\d+)*\s*\))+", text):
        raise ValueError(f"bad cycle notation: {text!r}")
    cycles = [tuple(int(t) for t in chunk.split())
              for chunk in re.findall(r"\(([^()]*)\)", text)]
    return from_cycles(group, cycles)


def _mirrored_cycles(group: GroupDatum, cycle: tuple[int, ...]) -> list[tuple[int, ...]]:
    """A cycle on 1..r together with its mirror on the primed indices."""
    mirror = tuple(group.prime(i) for i in cycle)
    if set(mirror) == set(cycle):
        return [cycle]
    return [cycle, mirror]


def transposition_pair(group: GroupDatum, a: int, b: int) -> SignedPerm:
    """The Weyl element acting as (a b) on 1..r, i.e. (a b)(b' a') in S_{r0}."""
    return from_cycles(group, _mirrored_cycles(group, (a, b)))


def sign_change(group: GroupDatum, i: int) -> SignedPerm:
    """The sign change c_i = (i i')."""
    return from_cycles(group, [(i, group.prime(i))])


def sign_changes_product(group: GroupDatum, indices: tuple[int, ...]) -> SignedPerm:
    """The product of the disjoint sign changes c_i over the given indices.

    Built in one step: for SO(2r) the individual factors are not Weyl
    elements, only even products are.
    """
    img = list(range(1, group.r0 + 1))
    for i in indices:
        img[i - 1] = group.prime(i)
        img[group.prime(i) - 1] = i
    return SignedPerm(group, tuple(img))


def weyl_order(group: GroupDatum) -> int:
    r = group.r
    order = (2 ** r) * math.factorial(r)
    if group.kind is GroupKind.SO_EVEN:
        order //= 2
    return order


def enumerate_weyl(group: GroupDatum, cap: int | None = None) -> Iterator[SignedPerm]:
    """Yield every Weyl element exactly once, lexicographically by image."""
    cap = DEFAULT_CAP if cap is None else cap
    if weyl_order(group) > cap:
        raise CapExceeded(f"|W| = {weyl_order(group)} exceeds cap {cap}")
    r, r0 = group.r, group.r0
    center = r + 1 if r0 % 2 else None
    so_even = group.kind is GroupKind.SO_EVEN

    image = [0] * r0
    used = [False] * (r0 + 1)

    def fill(pos: int, signs: int) -> Iterator[SignedPerm]:
        if pos > r:
            if so_even and signs % 2:
                return
            if center is not None:
                image[center - 1] = center
            for i in range(1, r + 1):
                image[r0 - i] = r0 + 1 - image[i - 1]
            yield SignedPerm(group, tuple(image))
            return
        for v in range(1, r0 + 1):
            if v == center or used[v] or used[r0 + 1 - v]:
                continue
            if so_even and pos == r:
                # last free slot: the remaining pair fixes parity
                if (signs + (1 if v > r else 0)) % 2:
                    continue
            image[pos - 1] = v
            used[v] = True
            yield from fill(pos + 1, signs + (1 if v > r else 0))
            used[v] = False

    yield from fill(1, 0)


def in_levi_weyl(w: SignedPerm, levi: LeviDatum) -> bool:
    """Membership in W_M = S_n x W(G(m)) inside W."""
    n = levi.n
    r = w.group.r
    if any(w(i) > n for i in range(1, n + 1)):
        return False
    if w.group.kind is GroupKind.SO_EVEN:
        if sum(1 for k in range(n + 1, r + 1) if w(k) > r) % 2:
            return False
    return True


def _canonical_rep_for_gl_image(levi: LeviDatum, values: list[int]) -> SignedPerm | None:
    """Lexicographically least w with w({1..n}) equal to the given value set.

    Returns None only in the degenerate SO(2r) full-GL case when the sign
    parity of the value set is odd (no such Weyl element exists).
    """
    group = levi.group
    r, r0, n = group.r, group.r0, levi.n
    center = r + 1 if r0 % 2 else None
    so_even = group.kind is GroupKind.SO_EVEN

    image = [0] * r0
    taken = [False] * (r0 + 1)
    signs = 0
    for pos, v in enumerate(sorted(values), start=1):
        image[pos - 1] = v
        taken[v] = taken[r0 + 1 - v] = True
        if v > r:
            signs += 1

    pool = [v for v in range(1, r0 + 1) if not taken[v] and v != center]
    free = list(range(n + 1, r + 1))
    for idx, pos in enumerate(free):
        last = idx == len(free) - 1
        for v in pool:
            if taken[v]:
                continue
            if so_even and last and (signs + (1 if v > r else 0)) % 2:
                continue
            image[pos - 1] = v
            taken[v] = taken[r0 + 1 - v] = True
            if v > r:
                signs += 1
            break
        else:
            return None
    if so_even and signs % 2:
        return None  # full-GL Levi with odd sign parity
    if center is not None:
        image[center - 1] = center
    for i in range(1, r + 1):
        image[r0 - i] = r0 + 1 - image[i - 1]
    return SignedPerm(group, tuple(image))


def coset_reps(levi: LeviDatum, cap: int | None = None) -> list[SignedPerm]:
    """Canonical (lexicographically least) representatives of W/W_M.

    One representative per left coset; for n <= r-1 there are exactly
    2^n * C(r, n) of them.
    """
    cap = DEFAULT_CAP if cap is None else cap
    group = levi.group
    r, n = group.r, levi.n
    count = (2 ** n) * math.comb(r, n)
    if count > cap:
        raise CapExceeded(f"|W/W_M| = {count} exceeds cap {cap}")
    reps = []
    for support in itertools.combinations(range(1, r + 1), n):
        for primed in itertools.product((False, True), repeat=n):
            values = [group.prime(v) if p else v for v, p in zip(support, primed)]
            rep = _canonical_rep_for_gl_image(levi, values)
            if rep is not None:
                reps.append(rep)
    reps.sort(key=lambda w: w.image)
    return reps


def gl_image_set(w: SignedPerm, levi: LeviDatum) -> frozenset[int]:
    """w({1..n}), the complete invariant of the left coset w W_M."""
    return frozenset(w(i) for i in range(1, levi.n + 1))


def canonical_rep(w: SignedPerm, levi: LeviDatum) -> SignedPerm:
    """The canonical representative of the coset w W_M."""
    rep = _canonical_rep_for_gl_image(levi, sorted(gl_image_set(w, levi)))
    assert rep is not None
    return rep


def same_coset(u: SignedPerm, v: SignedPerm, levi: LeviDatum) -> bool:
    return in_levi_weyl(compose(u.inverse(), v), levi)


# ---------------------------------------------------------------------------
# Normal form (disjoint transpositions, with the SO(2r) tail)


@dataclass(frozen=True)
class DPrime:
    d0: int


@dataclass(frozen=True)
class FourCycle:
    """The cycle (i0 j0' i0' j0), or its inverse orientation (i0 j0 i0' j0').

    The inverse orientation does occur: some SO(2r) cosets contain no
    representative with the standard orientation (smallest instance at
    r = 3, n = 2), so both are accepted as valid normal-form tails.
    """

    i0: int
    j0: int
    inverted: bool = False


@dataclass(frozen=True)
class CosetNormalForm:
    levi: LeviDatum
    bar_pairs: tuple[int, ...]                # indices a with factor (a a')
    cross_pairs: tuple[tuple[int, int], ...]  # (b, c) with factor (b c)(c' b')
    w2: DPrime | FourCycle | None = None

    def reconstruct(self) -> SignedPerm:
        group = self.levi.group
        cycles: list[tuple[int, ...]] = []
        for a in self.bar_pairs:
            cycles.append((a, group.prime(a)))
        for b, c in self.cross_pairs:
            cycles.append((b, c))
            cycles.append((group.prime(c), group.prime(b)))
        if isinstance(self.w2, DPrime):
            cycles.append((self.w2.d0, group.prime(self.w2.d0)))
        elif isinstance(self.w2, FourCycle):
            i0, j0 = self.w2.i0, self.w2.j0
            if self.w2.inverted:
                cycles.append((i0, j0, group.prime(i0), group.prime(j0)))
            else:
                cycles.append((i0, group.prime(j0), group.prime(i0), j0))
        return from_cycles(group, cycles)


def parse_shape(w: SignedPerm, levi: LeviDatum) -> CosetNormalForm | None:
    """Parse w as a normal-form element, or return None.

    Accepts exactly: disjoint factors (a a') with a <= n, (b c)(c' b') with
    b <= n < c <= r0 - n, and for SO(2r) at most one extra (d0 d0') with
    n < d0 <= r or one four-cycle (either orientation); everything else
    fixed.
    """
    group = levi.group
    r, r0, n = group.r, group.r0, levi.n
    so_even = group.kind is GroupKind.SO_EVEN
    bars: list[int] = []
    crosses: list[tuple[int, int]] = []
    w2: DPrime | FourCycle | None = None
    seen: set[int] = set()
    for i in range(1, r0 + 1):
        if i in seen or w(i) == i:
            continue
        orbit = [i]
        t = w(i)
        while t != i:
            orbit.append(t)
            t = w(t)
        seen.update(orbit)
        seen.update(group.prime(x) for x in orbit)
        if len(orbit) == 2:
            a, b = orbit
            if b == group.prime(a):
                if a > r0 // 2:
                    a = b
                if a <= n:
                    bars.append(a)
                elif so_even and a <= r and w2 is None:
                    w2 = DPrime(a)
                else:
                    return None
            else:
                lo, hi = min(a, b), max(a, b)
                if lo <= n < hi <= r0 - n:
                    crosses.append((lo, hi))
                else:
                    return None
        elif len(orbit) == 4 and so_even and w2 is None:
            i0 = min(orbit)
            if i0 > n:
                return None
            nxt = w(i0)
            if nxt == group.prime(i0):
                return None
            j0 = nxt if nxt <= r else group.prime(nxt)
            if not (n < j0 <= r):
                return None
            inverted = nxt == j0
            expected = (i0, j0, group.prime(i0), group.prime(j0)) if inverted \
                else (i0, group.prime(j0), group.prime(i0), j0)
            t = i0
            for e in expected[1:]:
                t = w(t)
                if t != e:
                    return None
            w2 = FourCycle(i0, j0, inverted)
        else:
            return None
    return CosetNormalForm(levi, tuple(sorted(bars)), tuple(sorted(crosses)), w2)


def _unsigned(w: SignedPerm) -> list[int]:
    """The underlying permutation of 1..r (index 0 unused)."""
    r, r0 = w.group.r, w.group.r0
    out = [0] * (r + 1)
    for i in range(1, r + 1):
        v = w(i)
        out[i] = v if v <= r else r0 + 1 - v
    return out


def _unsigned_cycles(s: list[int]) -> list[list[int]]:
    r = len(s) - 1
    seen: set[int] = set()
    cycles = []
    for i in range(1, r + 1):
        if i in seen or s[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        t = s[i]
        while t != i:
            cyc.append(t)
            seen.add(t)
            t = s[t]
        cycles.append(cyc)
    return cycles


def normal_form(w: SignedPerm, levi: LeviDatum) -> CosetNormalForm:
    """Rewrite w mod W_M into normal form.

    Follows the constructive proof: first split companion cycles of the
    unsigned part by right-multiplying with W_M transpositions until only
    alternating two-cycles remain, then absorb sign changes, pairing them
    inside W_M where the SO(2r) parity demands it.  Total on W.
    """
    group = levi.group
    r, n = group.r, levi.n
    so_even = group.kind is GroupKind.SO_EVEN
    u = w

    def side(x: int) -> bool:
        return x <= n

    # Phase 1a: shrink any cycle with two adjacent entries on the same side.
    while True:
        s = _unsigned(u)
        move = None
        for cyc in _unsigned_cycles(s):
            for idx in range(len(cyc)):
                a, b = cyc[idx], cyc[(idx + 1) % len(cyc)]
                if side(a) == side(b):
                    move = (a, b)
                    break
            if move:
                break
        if move is None:
            break
        u = compose(u, transposition_pair(group, *move))

    # Phase 1b: split alternating cycles of length >= 4 into two-cycles.
    while True:
        s = _unsigned(u)
        long_cycle = next((c for c in _unsigned_cycles(s) if len(c) >= 4), None)
        if long_cycle is None:
            break
        if not side(long_cycle[0]):
            long_cycle = long_cycle[1:] + long_cycle[:1]
        # (a1 .. at) * (a1 a_{t-1} a_{t-3} .. a3) = (a1 at)(a2 a3)(a4 a5)...
        sigma = [long_cycle[0]] + [long_cycle[k] for k in range(len(long_cycle) - 2, 1, -2)]
        u = compose(u, from_cycles(group, _mirrored_cycles(group, tuple(sigma))))

    # Phase 2: absorb sign changes.
    s = _unsigned(u)
    signed = {s[i] for i in range(1, r + 1) if u(i) > r}
    pairs = []
    for cyc in _unsigned_cycles(s):
        a, b = cyc
        pairs.append((a, b) if side(a) else (b, a))
    one_signed = [(x, y) for x, y in pairs if (x in signed) != (y in signed)]
    mid_fixed = [d for d in range(n + 1, r + 1) if s[d] == d]
    dark = sorted(d for d in mid_fixed if d in signed)    # carry (d d')
    free = sorted(d for d in mid_fixed if d not in signed)

    if not so_even:
        for _, y in one_signed:
            u = compose(u, sign_change(group, y))
        for d in dark:
            u = compose(u, sign_change(group, d))
    elif dark or free:
        toggles = [y for _, y in one_signed]
        if (len(one_signed) + len(dark)) % 2:
            d0 = min(dark + free)
            if d0 in dark:
                toggles += [d for d in dark if d != d0]
            else:
                toggles += dark + [d0]
        else:
            toggles += dark
        assert len(toggles) % 2 == 0
        for t1, t2 in zip(toggles[0::2], toggles[1::2]):
            u = compose(u, sign_changes_product(group, (t1, t2)))
    else:
        # No spare middle index: repair pairs against each other.
        x_only = sorted((x, y) for x, y in one_signed if x in signed)
        y_only = sorted((x, y) for x, y in one_signed if y in signed)
        while x_only and y_only:
            x1, y1 = x_only.pop(0)
            x2, y2 = y_only.pop(0)
            move = compose(transposition_pair(group, x1, x2),
                           transposition_pair(group, y1, y2))
            u = compose(u, move)
        rest = x_only or y_only
        while len(rest) >= 2:
            (_, y1), (_, y2) = rest.pop(0), rest.pop(0)
            u = compose(u, sign_changes_product(group, (y1, y2)))
        # a single leftover pair stays as the four-cycle tail

    nf = parse_shape(u, levi)
    if nf is None:
        raise AssertionError(f"normal form rewriting failed for {w}")
    if not same_coset(nf.reconstruct(), w, levi):
        raise AssertionError(f"normal form left the coset of {w}")
    return nf


# ---------------------------------------------------------------------------
# Distinguished elements


def w0_maximal(levi: LeviDatum) -> SignedPerm:
    """The longest element of W/W_M: (1 r0)(2 r0-1)...(n r0+1-n), with the
    extra factor (r r+1) for SO(2r) and odd n."""
    group = levi.group
    flips = set(range(1, levi.n + 1))
    if group.kind is GroupKind.SO_EVEN and levi.n % 2:
        flips ^= {group.r}  # (r r+1) = (r r'); cancels at the full-GL Levi
    img = list(range(1, group.r0 + 1))
    for i in flips:
        img[i - 1] = group.prime(i)
        img[group.prime(i) - 1] = i
    return SignedPerm(group, tuple(img))
