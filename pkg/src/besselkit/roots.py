"""Classical roots on the coordinates e_1..e_r and the Weyl action.

Roots are stored canonically: the positive member (smaller index first for
differences, unordered pair for sums) plus a sign bit.  The Weyl group acts
through the S_{r0} picture via w . e_i = e_{w(i)}, with e_{i'} = -e_i.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .core import BesselDatum, GroupDatum, GroupKind, LeviDatum, RangeError
from .weyl import SignedPerm


class RootKind(enum.Enum):
    DIFF = "diff"    # e_i - e_j
    SUM = "sum"      # e_i + e_j
    SHORT = "short"  # e_i
    LONG = "long"    # 2e_i


_KIND_ORDER = {RootKind.DIFF: 0, RootKind.SUM: 1, RootKind.SHORT: 2, RootKind.LONG: 3}


@dataclass(frozen=True, order=False)
class Root:
    kind: RootKind
    i: int
    j: int = 0
    neg: bool = False

    def __post_init__(self) -> None:
        if self.kind in (RootKind.DIFF, RootKind.SUM):
            if not (0 < self.i < self.j):
                raise ValueError(f"canonical pair roots need i < j: {self}")
        else:
            if self.i <= 0 or self.j != 0:
                raise ValueError(f"bad index data: {self}")

    @staticmethod
    def diff(i: int, j: int, neg: bool = False) -> "Root":
        if i == j:
            raise ValueError("e_i - e_i is not a root")
        if i > j:
            i, j, neg = j, i, not neg
        return Root(RootKind.DIFF, i, j, neg)

    @staticmethod
    def sum(i: int, j: int, neg: bool = False) -> "Root":
        if i == j:
            raise ValueError("use Root.long for 2e_i")
        if i > j:
            i, j = j, i
        return Root(RootKind.SUM, i, j, neg)

    @staticmethod
    def short(i: int, neg: bool = False) -> "Root":
        return Root(RootKind.SHORT, i, neg=neg)

    @staticmethod
    def long(i: int, neg: bool = False) -> "Root":
        return Root(RootKind.LONG, i, neg=neg)

    def negate(self) -> "Root":
        return Root(self.kind, self.i, self.j, not self.neg)

    @property
    def is_positive(self) -> bool:
        return not self.neg

    def sort_key(self) -> tuple[int, int, int, int]:
        return (_KIND_ORDER[self.kind], self.i, self.j, int(self.neg))

    def vector(self, r: int) -> tuple[Fraction, ...]:
        v = [Fraction(0)] * r
        if self.kind is RootKind.DIFF:
            v[self.i - 1], v[self.j - 1] = Fraction(1), Fraction(-1)
        elif self.kind is RootKind.SUM:
            v[self.i - 1] = v[self.j - 1] = Fraction(1)
        elif self.kind is RootKind.SHORT:
            v[self.i - 1] = Fraction(1)
        else:
            v[self.i - 1] = Fraction(2)
        if self.neg:
            v = [-x for x in v]
        return tuple(v)

    def __str__(self) -> str:
        if self.kind is RootKind.DIFF:
            body = f"e{self.i}-e{self.j}"
        elif self.kind is RootKind.SUM:
            body = f"e{self.i}+e{self.j}"
        elif self.kind is RootKind.SHORT:
            body = f"e{self.i}"
        else:
            body = f"2e{self.i}"
        if not self.neg:
            return body
        return f"-({body})" if self.kind in (RootKind.DIFF, RootKind.SUM) else f"-{body}"


def parse_root(text: str) -> Root:
    text = text.strip().replace(" ", "")
    neg = False
    if text.startswith("-(") and text.endswith(")"):
        neg, text = True, text[2:-1]
    elif text.startswith("-"):
        neg, text = True, text[1:]
    if text.startswith("2e"):
        return Root.long(int(text[2:]), neg)
    if "+" in text:
        a, b = text.split("+")
        return Root.sum(int(a[1:]), int(b[1:]), neg)
    if "-" in text[1:]:
        a, b = text[1:].split("-")
        return Root.diff(int(a), int(b[1:]), neg)
    return Root.short(int(text[1:]), neg)


def _signed_image(w: SignedPerm, i: int) -> tuple[int, int]:
    """w . e_i = sign * e_index in the 1..r coordinates."""
    r, r0 = w.group.r, w.group.r0
    v = w(i)
    return (v, 1) if v <= r else (r0 + 1 - v, -1)


def act(w: SignedPerm, root: Root) -> Root:
    """The linear action of w on a root; the image is again a root."""
    r = w.group.r
    if root.i > r or root.j > r:
        raise RangeError(f"{root} has indices beyond rank {r}")
    sign = -1 if root.neg else 1
    if root.kind in (RootKind.DIFF, RootKind.SUM):
        a, sa = _signed_image(w, root.i)
        b, sb = _signed_image(w, root.j)
        if root.kind is RootKind.DIFF:
            sb = -sb
        sa, sb = sign * sa, sign * sb
        # now the image is sa*e_a + sb*e_b with a != b
        if sa == 1 and sb == 1:
            return Root.sum(a, b)
        if sa == -1 and sb == -1:
            return Root.sum(a, b, neg=True)
        if sa == 1:
            return Root.diff(a, b)
        return Root.diff(b, a)
    a, sa = _signed_image(w, root.i)
    neg = sign * sa == -1
    if root.kind is RootKind.SHORT:
        return Root.short(a, neg)
    return Root.long(a, neg)


def simple_roots(group: GroupDatum) -> list[Root]:
    """The simple system: e_i - e_{i+1} plus the last root by family."""
    r = group.r
    delta = [Root.diff(i, i + 1) for i in range(1, r)]
    if group.kind is GroupKind.SO_EVEN:
        delta.append(Root.sum(r - 1, r))
    elif group.kind is GroupKind.U_EVEN:
        delta.append(Root.long(r))
    else:
        delta.append(Root.short(r))
    return delta


def positive_roots(group: GroupDatum) -> list[Root]:
    r = group.r
    kind = group.kind
    out: list[Root] = []
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            out.append(Root.diff(i, j))
            out.append(Root.sum(i, j))
    if kind in (GroupKind.SO_ODD, GroupKind.U_ODD):
        out.extend(Root.short(i) for i in range(1, r + 1))
    if kind in (GroupKind.U_ODD, GroupKind.U_EVEN):
        out.extend(Root.long(i) for i in range(1, r + 1))
    return sorted(out, key=Root.sort_key)


def sigma_P_plus(levi: LeviDatum) -> list[Root]:
    """Positive roots in the unipotent radical of P = MN, sorted canonically."""
    group = levi.group
    r, n = group.r, levi.n
    kind = group.kind
    out: list[Root] = []
    for i in range(1, n + 1):
        for j in range(n + 1, r + 1):
            out.append(Root.diff(i, j))
            out.append(Root.sum(i, j))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            out.append(Root.sum(i, j))
    if kind in (GroupKind.SO_ODD, GroupKind.U_ODD):
        out.extend(Root.short(i) for i in range(1, n + 1))
    if kind in (GroupKind.U_ODD, GroupKind.U_EVEN):
        out.extend(Root.long(i) for i in range(1, n + 1))
    return sorted(out, key=Root.sort_key)


def bessel_X(bessel: BesselDatum) -> list[Root]:
    """The support of the character: alpha_1..alpha_ell and beta = e_ell + e_{ell+1}.

    In the Whittaker limit the support is the full simple system.
    """
    if bessel.whittaker:
        return simple_roots(bessel.group)
    ell = bessel.ell
    if ell >= bessel.group.r:
        raise RangeError(f"ell = {ell} must be below the rank")
    out = [Root.diff(i, i + 1) for i in range(1, ell + 1)]
    out.append(Root.sum(ell, ell + 1))
    return out


def linearly_independent(roots: list[Root], r: int) -> bool:
    """Exact rank test over the rationals."""
    rows = [list(root.vector(r)) for root in roots]
    rank = 0
    for col in range(r):
        pivot = next((k for k in range(rank, len(rows)) if rows[k][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for k in range(len(rows)):
            if k != rank and rows[k][col] != 0:
                f = rows[k][col] / rows[rank][col]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[rank])]
        rank += 1
    return rank == len(roots)
