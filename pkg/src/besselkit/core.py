"""Configuration data shared by every other module.

Four families of classical groups are covered: split SO(2r+1) and SO(2r),
and quasi-split U(2r+1) and U(2r).  A configuration fixes the group, a
maximal-parabolic block size n (Levi GL_n x G(m)), and a Bessel rank ell1.
All derived quantities (r0, ell, ell0, s, the character coordinate vector)
are computed here once and consumed everywhere else.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction


class RangeError(ValueError):
    """A configuration parameter is outside its allowed range."""


class GroupKind(enum.Enum):
    SO_ODD = "so-odd"
    SO_EVEN = "so-even"
    U_ODD = "u-odd"
    U_EVEN = "u-even"

    @property
    def is_orthogonal(self) -> bool:
        return self in (GroupKind.SO_ODD, GroupKind.SO_EVEN)

    @property
    def is_unitary(self) -> bool:
        return not self.is_orthogonal

    @property
    def doubles_rank(self) -> bool:
        """True when r0 = 2r (the SO(2r) and U(2r) families)."""
        return self in (GroupKind.SO_EVEN, GroupKind.U_EVEN)

    @classmethod
    def from_name(cls, name: str) -> "GroupKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise RangeError(f"unknown group kind {name!r}; expected one of "
                         f"{[k.value for k in cls]}")


@dataclass(frozen=True)
class GroupDatum:
    """A group family together with its rank r >= 2."""

    kind: GroupKind
    r: int

    def __post_init__(self) -> None:
        if not isinstance(self.r, int) or isinstance(self.r, bool):
            raise RangeError(f"rank must be an integer, got {self.r!r}")
        if self.r < 2:
            raise RangeError(f"rank must be at least 2, got {self.r}")

    @property
    def r0(self) -> int:
        return 2 * self.r if self.kind.doubles_rank else 2 * self.r + 1

    def prime(self, i: int) -> int:
        """The index involution i -> r0 + 1 - i on 1..r0."""
        if not 1 <= i <= self.r0:
            raise RangeError(f"index {i} outside 1..{self.r0}")
        return self.r0 + 1 - i


@dataclass(frozen=True)
class LeviDatum:
    """Block size n of the GL factor of a maximal parabolic, M = GL_n x G(m).

    The degenerate Levi GL_r (m = 0, the Whittaker limit) is rejected by
    the public constructor and only available through ``whittaker_config``.
    """

    group: GroupDatum
    n: int
    full_gl: bool = False

    def __post_init__(self) -> None:
        r = self.group.r
        if not isinstance(self.n, int) or isinstance(self.n, bool):
            raise RangeError(f"n must be an integer, got {self.n!r}")
        if self.full_gl:
            if self.n != r:
                raise RangeError("full GL Levi requires n = r")
            return
        if not 1 <= self.n <= r - 1:
            raise RangeError(f"n must satisfy 1 <= n <= r-1 = {r - 1}, got {self.n}")

    @property
    def m(self) -> int:
        return self.group.r - self.n


@dataclass(frozen=True)
class BesselDatum:
    """Bessel rank ell1 and the coordinate data of the character chi.

    The coordinate vector ``a`` has length ell0 and the normalized shape
    (delta, 0, ..., 0, 1) with delta nonzero.  The rank-0 Whittaker limit
    (ell = r) is rejected here and only available through
    ``whittaker_config``.
    """

    group: GroupDatum
    ell1: int
    delta: Fraction | int = 1
    whittaker: bool = False

    def __post_init__(self) -> None:
        r = self.group.r
        if not isinstance(self.ell1, int) or isinstance(self.ell1, bool):
            raise RangeError(f"ell1 must be an integer, got {self.ell1!r}")
        if self.whittaker:
            if self.ell1 != 0:
                raise RangeError("the Whittaker limit requires ell1 = 0")
            return
        if not 1 <= self.ell1 <= r - 1:
            raise RangeError(
                f"ell1 must satisfy 1 <= ell1 <= r-1 = {r - 1}, got {self.ell1}")
        if self.delta == 0:
            raise RangeError("delta must be nonzero")

    @property
    def ell(self) -> int:
        return self.group.r - self.ell1

    @property
    def ell0(self) -> int:
        return self.group.r0 - 2 * self.ell

    @property
    def s(self) -> int:
        """Length of the x-vector parametrizing double cosets (ell0 - 2)."""
        return self.ell0 - 2

    @property
    def a(self) -> tuple:
        if self.ell0 < 2:
            return ()
        return (self.delta,) + (0,) * (self.ell0 - 2) + (1,)


def check_compatible(levi: LeviDatum, bessel: BesselDatum) -> None:
    """Enforce the pairing constraint ell1 <= m, equivalently ell >= n."""
    if levi.group != bessel.group:
        raise RangeError("Levi and Bessel data belong to different groups")
    if bessel.whittaker or levi.full_gl:
        if not (bessel.whittaker and levi.full_gl):
            raise RangeError("Whittaker data must be paired with the full GL Levi")
        return
    if bessel.ell1 > levi.m:
        raise RangeError(
            f"ell1 = {bessel.ell1} exceeds m = {levi.m} (need ell1 <= m)")


def make_config(kind: GroupKind | str, r: int, n: int, ell1: int,
                delta: Fraction | int = 1) -> tuple[GroupDatum, LeviDatum, BesselDatum]:
    """Build and validate a full configuration triple.

    Raises :class:`RangeError` naming the violated constraint; no partially
    constructed datum ever escapes.
    """
    if isinstance(kind, str):
        kind = GroupKind.from_name(kind)
    group = GroupDatum(kind, r)
    levi = LeviDatum(group, n)
    bessel = BesselDatum(group, ell1, delta=delta)
    check_compatible(levi, bessel)
    return group, levi, bessel


def whittaker_config(kind: GroupKind | str, r: int) -> tuple[GroupDatum, LeviDatum, BesselDatum]:
    """The rank-0 limit: Levi GL_r, ell = r, generic character on all of U."""
    if isinstance(kind, str):
        kind = GroupKind.from_name(kind)
    group = GroupDatum(kind, r)
    levi = LeviDatum(group, r, full_gl=True)
    bessel = BesselDatum(group, 0, whittaker=True)
    return group, levi, bessel
