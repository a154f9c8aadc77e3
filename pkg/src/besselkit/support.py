"""The obstruction calculus: classify every coset and verify the rule suite.

Every double coset is represented by a canonical Weyl coset representative
w together with the two-point classification of the x-parameter (zero /
nonzero).  A coset is killed for x = 0 by a root alpha in Sigma_P+ with
w(alpha) in X, and for all x by one with w(alpha) in X minus {alpha_ell}.
The remaining cosets fall into the sum case (killed through an index k0),
the residual case parsed by the rule-2.17 shape (killed through the final
root image), and the rule-2.8 shape whose x = 0 class is a rank-reduction
case rather than a verified obstruction.  Exactly one coset, the longest
element, survives.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import BesselDatum, GroupDatum, GroupKind, LeviDatum, RangeError
from .roots import Root, RootKind, act, bessel_X, linearly_independent, sigma_P_plus
from .weyl import (CosetNormalForm, DPrime, FourCycle, SignedPerm, canonical_rep,
                   coset_reps, normal_form, same_coset, w0_maximal)


class ClassificationGap(RuntimeError):
    """A coset fits none of the classification cases."""


class WitnessNotFound(RuntimeError):
    """A guaranteed obstruction witness is missing (a reportable discrepancy)."""


class CaseTag(enum.Enum):
    P1 = "p1"
    P2 = "p2"
    ALPHA_ELL_SUM = "alpha-ell-sum"
    ALPHA_ELL_OTHER = "alpha-ell-other"
    SHAPE_28 = "shape-2.8"
    W0 = "w0"


class XZeroStatus(enum.Enum):
    OBSTRUCTED = "obstructed"
    RANK_REDUCTION = "rank-reduction"
    SURVIVOR = "survivor"


class XNonzeroStatus(enum.Enum):
    OBSTRUCTED = "obstructed"
    OBSTRUCTED_K0 = "obstructed-k0"
    OBSTRUCTED_FINAL_ROOT = "obstructed-final-root"
    SURVIVOR = "survivor"
    NO_NONZERO_X = "no-nonzero-x"   # s = 0: the x != 0 class is empty


@dataclass(frozen=True)
class Shape28Data:
    """Parse of the rule-2.8 shape (bars 1..i0, crosses into the far window).

    ``dprime`` extends the displayed shape: for SO(2r) a disjoint (d d')
    factor is forced on odd-parity cosets and does occur, with d as low as
    ell - 1 (verified exhaustively).  ``x1`` is the transported root set
    whose linear independence underlies the rank-reduction argument.
    """

    i0: int
    a_values: tuple[int, ...]
    dprime: int | None
    x1: tuple[Root, ...]

    @property
    def paper_exact(self) -> bool:
        return self.dprime is None


@dataclass(frozen=True)
class Shape217Data:
    """Parse of the rule-2.17 shape.

    ``paper_exact`` records whether the coset matches the rule verbatim:
    no four-cycle tail and any (d d') factor confined to ell+2 <= d <= r.
    Both relaxations occur in practice and are accepted structurally.
    """

    n1: int
    k_values: tuple[int, ...]
    dprime: int | None
    four_cycle: FourCycle | None

    @property
    def paper_exact(self) -> bool:
        return self.four_cycle is None


@dataclass(frozen=True)
class K0Result:
    k0: int | None          # None when the short root e_ell is used instead
    sign: int               # +1 / -1; 0 for the short root
    witness: Root           # the root of Sigma_P+ carried into position

    @property
    def short_root(self) -> bool:
        return self.k0 is None


@dataclass(frozen=True)
class FinalRootResult:
    """The image datum w(alpha) = e_ell +/- e_k.

    The stated range is ell+2 <= k <= r; the boundary value k = ell+1
    (image alpha_ell itself) occurs on part of the rule-2.17 class.
    """

    k: int
    sign: int
    witness: Root


@dataclass(frozen=True)
class XZeroVerdict:
    status: XZeroStatus
    witness: Root | None = None
    shape: Shape28Data | None = None


@dataclass(frozen=True)
class XNonzeroVerdict:
    status: XNonzeroStatus
    witness: Root | None = None
    k: int | None = None
    sign: int | None = None
    in_paper_range: bool | None = None


@dataclass(frozen=True)
class SupportVerdict:
    coset: SignedPerm
    case_tag: CaseTag
    x_zero: XZeroVerdict
    x_nonzero: XNonzeroVerdict

    @property
    def is_survivor(self) -> bool:
        return (self.x_zero.status is XZeroStatus.SURVIVOR
                or self.x_nonzero.status is XNonzeroStatus.SURVIVOR)


# ---------------------------------------------------------------------------
# Elementary predicates


def _alpha_ell(bessel: BesselDatum) -> Root:
    return Root.diff(bessel.ell, bessel.ell + 1)


def obstruction_x_zero(w: SignedPerm, levi: LeviDatum, bessel: BesselDatum) -> Root | None:
    """Least alpha in Sigma_P+ with w(alpha) in X, if any."""
    X = set(bessel_X(bessel))
    for alpha in sigma_P_plus(levi):
        if act(w, alpha) in X:
            return alpha
    return None


def obstruction_x_nonzero(w: SignedPerm, levi: LeviDatum, bessel: BesselDatum) -> Root | None:
    """Least alpha in Sigma_P+ with w(alpha) in X minus {alpha_ell}."""
    X = set(bessel_X(bessel))
    if not bessel.whittaker:
        X.discard(_alpha_ell(bessel))
    for alpha in sigma_P_plus(levi):
        if act(w, alpha) in X:
            return alpha
    return None


@dataclass(frozen=True)
class SumCase:
    i: int
    j: int


class AlphaEllCase(enum.Enum):
    NOT_THIS_CASE = "not-this-case"
    OTHER = "other"


def alpha_ell_case(w: SignedPerm, levi: LeviDatum, bessel: BesselDatum) -> SumCase | AlphaEllCase:
    """Classify cosets with w(Sigma_P+) meeting X exactly in alpha_ell."""
    X = set(bessel_X(bessel))
    al = _alpha_ell(bessel)
    hits = [(alpha, act(w, alpha)) for alpha in sigma_P_plus(levi)
            if act(w, alpha) in X]
    if len(hits) != 1 or hits[0][1] != al:
        return AlphaEllCase.NOT_THIS_CASE
    pre = hits[0][0]
    if pre.kind is RootKind.SUM and not pre.neg and pre.j <= levi.n:
        return SumCase(pre.i, pre.j)
    return AlphaEllCase.OTHER


def find_k0(w: SignedPerm, levi: LeviDatum, bessel: BesselDatum) -> K0Result:
    """The index k0 carrying the sum-case obstruction for x != 0.

    Scans k = ell+2..r with signs +/- for a root alpha in Sigma_P+ with
    w(alpha) = e_ell +/- e_k; when the range is exhausted (it is empty at
    ell = r-1) the short root e_ell serves instead for the odd families,
    matching the single central x-coordinate.  Requires s >= 1: for s = 0
    there is no nonzero x and no obstruction to produce.
    """
    case = alpha_ell_case(w, levi, bessel)
    if not isinstance(case, SumCase):
        raise RangeError("find_k0 requires a sum-case coset")
    if bessel.s < 1:
        raise RangeError("find_k0 requires s >= 1 (a nonzero x must exist)")
    sp = set(sigma_P_plus(levi))
    ell, r = bessel.ell, levi.group.r
    winv = w.inverse()
    for k in range(ell + 2, r + 1):
        for sign in (1, -1):
            target = Root.sum(ell, k) if sign > 0 else Root.diff(ell, k)
            alpha = act(winv, target)
            if alpha in sp:
                return K0Result(k, sign, alpha)
    if levi.group.kind in (GroupKind.SO_ODD, GroupKind.U_ODD):
        alpha = act(winv, Root.short(ell))
        if alpha in sp:
            return K0Result(None, 0, alpha)
    raise WitnessNotFound(f"no k0 for sum-case coset {w}")


def final_root_image(w: SignedPerm, levi: LeviDatum, bessel: BesselDatum) -> FinalRootResult:
    """The asserted image e_ell +/- e_k obstructing x != 0 on a parsed shape.

    Scans for a root of Sigma_P+ carried by w onto e_ell +/- e_k, preferring
    the stated range ell+2 <= k <= r; the boundary value k = ell+1 (image
    alpha_ell itself) occurs on part of the rule-2.17 class and is returned
    with ``in_paper_range`` False.
    """
    if shape_28(w, levi, bessel) is None and shape_217(w, levi, bessel) is None:
        raise RangeError("final_root_image requires a rule-2.8 or rule-2.17 shape")
    sp = set(sigma_P_plus(levi))
    ell, r = bessel.ell, levi.group.r
    winv = w.inverse()
    for k in range(ell + 2, r + 1):
        for sign in (1, -1):
            target = Root.sum(ell, k) if sign > 0 else Root.diff(ell, k)
            alpha = act(winv, target)
            if alpha in sp:
                return FinalRootResult(k, sign, alpha)
    for sign in (-1, 1):
        target = Root.diff(ell, ell + 1) if sign < 0 else Root.sum(ell, ell + 1)
        alpha = act(winv, target)
        if alpha in sp:
            return FinalRootResult(ell + 1, sign, alpha)
    raise WitnessNotFound(f"no final root image for {w}")


# ---------------------------------------------------------------------------
# Shape parsers (run on the normal-form representative of the coset)


def _normal_form_element(w: SignedPerm, levi: LeviDatum) -> tuple[CosetNormalForm, SignedPerm]:
    nf = normal_form(w, levi)
    return nf, nf.reconstruct()


def shape_28(w: SignedPerm, levi: LeviDatum, bessel: BesselDatum) -> Shape28Data | None:
    """Parse the coset of w as a rule-2.8 shape, or return None.

    Bars occupy a prefix 1..i0 with i0 < n, every remaining GL index is
    crossed into the window |a| >= ell+2, and for SO(2r) one disjoint
    (d d') factor may remain.  On success the transported root set x1 is
    computed and certified linearly independent.
    """
    group, n, r, ell = levi.group, levi.n, levi.group.r, bessel.ell
    nf, u = _normal_form_element(w, levi)
    i0 = len(nf.bar_pairs)
    if nf.bar_pairs != tuple(range(1, i0 + 1)) or i0 >= n:
        return None
    if isinstance(nf.w2, FourCycle):
        return None
    if sorted(b for b, _ in nf.cross_pairs) != list(range(i0 + 1, n + 1)):
        return None
    a_values = tuple(c for _, c in sorted(nf.cross_pairs))
    for c in a_values:
        if min(c, group.prime(c)) < ell + 2:
            return None
    if u(n) == group.prime(n):
        return None
    x1 = [Root.diff(k, k + 1) for k in range(n + 1, ell + 1)]
    x1.append(Root.sum(ell, ell + 1))
    x1.append(act(u, Root.diff(n, n + 1)))
    if not linearly_independent(x1, r):
        raise WitnessNotFound(f"x1 set for {w} is linearly dependent")
    dprime = nf.w2.d0 if isinstance(nf.w2, DPrime) else None
    return Shape28Data(i0, a_values, dprime, tuple(x1))


def shape_217(w: SignedPerm, levi: LeviDatum, bessel: BesselDatum) -> Shape217Data | None:
    """Parse the coset of w as a rule-2.17 shape, or return None.

    Bars occupy a prefix 1..n1, the remaining GL indices are crossed into
    the window ell+1 <= k <= (ell+1)', and the primed end (ell+1)' is hit,
    either by a cross or by a four-cycle with j0 = ell+1.  The verbatim
    rule forbids the four-cycle and confines any (d d') factor to
    d >= ell+2; both relaxations occur and are flagged via ``paper_exact``.
    """
    group, n, r, ell = levi.group, levi.n, levi.group.r, bessel.ell
    nf, _ = _normal_form_element(w, levi)
    n1 = len(nf.bar_pairs)
    if nf.bar_pairs != tuple(range(1, n1 + 1)):
        return None
    four = nf.w2 if isinstance(nf.w2, FourCycle) else None
    dprime = nf.w2.d0 if isinstance(nf.w2, DPrime) else None
    gl_used = sorted([b for b, _ in nf.cross_pairs] + ([four.i0] if four else []))
    if gl_used != list(range(n1 + 1, n + 1)) or not gl_used:
        return None
    k_values = tuple(c for _, c in sorted(nf.cross_pairs))
    lp = group.prime(ell + 1)
    for c in k_values:
        if not ell + 1 <= c <= lp:
            return None
    if lp not in k_values and not (four is not None and four.j0 == ell + 1):
        return None
    if dprime is not None and not (ell + 2 <= dprime <= r):
        # outside the verbatim window; occurs for SO(2r), still this shape
        pass
    return Shape217Data(n1, k_values, dprime, four)


def shape_217_verbatim(data: Shape217Data, levi: LeviDatum, bessel: BesselDatum) -> bool:
    if data.four_cycle is not None:
        return False
    if data.dprime is not None and not (bessel.ell + 2 <= data.dprime <= levi.group.r):
        return False
    return levi.group.prime(bessel.ell + 1) in data.k_values


# ---------------------------------------------------------------------------
# Full classification


def classify(levi: LeviDatum, bessel: BesselDatum,
             cap: int | None = None) -> list[SupportVerdict]:
    """One verdict per canonical coset representative.

    The survivor set is asserted to be exactly the longest-element coset
    and rank-reduction verdicts to occur exactly on rule-2.8 shapes; a
    coset fitting no case raises :class:`ClassificationGap`.
    """
    if bessel.whittaker or levi.full_gl:
        return classify_whittaker(levi, bessel, cap=cap)
    group = levi.group
    sp = sigma_P_plus(levi)
    X = set(bessel_X(bessel))
    al = _alpha_ell(bessel)
    w0 = canonical_rep(w0_maximal(levi), levi)
    has_x = bessel.s >= 1
    verdicts: list[SupportVerdict] = []
    for w in coset_reps(levi, cap=cap):
        hits = [(alpha, act(w, alpha)) for alpha in sp if act(w, alpha) in X]
        p1 = hits[0][0] if hits else None
        p2 = next((alpha for alpha, image in hits if image != al), None)
        if w == w0:
            if hits:
                raise ClassificationGap(f"longest coset {w} is obstructed")
            verdicts.append(SupportVerdict(
                w, CaseTag.W0,
                XZeroVerdict(XZeroStatus.SURVIVOR),
                XNonzeroVerdict(XNonzeroStatus.SURVIVOR) if has_x
                else XNonzeroVerdict(XNonzeroStatus.NO_NONZERO_X)))
            continue
        if p2 is not None:
            verdicts.append(SupportVerdict(
                w, CaseTag.P2,
                XZeroVerdict(XZeroStatus.OBSTRUCTED, witness=p1),
                XNonzeroVerdict(XNonzeroStatus.OBSTRUCTED, witness=p2)))
            continue
        if p1 is not None:
            case = alpha_ell_case(w, levi, bessel)
            if isinstance(case, SumCase):
                if has_x:
                    k0 = find_k0(w, levi, bessel)
                    xnz = XNonzeroVerdict(
                        XNonzeroStatus.OBSTRUCTED_K0, witness=k0.witness,
                        k=k0.k0, sign=k0.sign,
                        in_paper_range=not k0.short_root)
                else:
                    xnz = XNonzeroVerdict(XNonzeroStatus.NO_NONZERO_X)
                verdicts.append(SupportVerdict(
                    w, CaseTag.ALPHA_ELL_SUM,
                    XZeroVerdict(XZeroStatus.OBSTRUCTED, witness=p1), xnz))
                continue
            if case is AlphaEllCase.OTHER:
                if shape_217(w, levi, bessel) is None:
                    raise ClassificationGap(
                        f"residual coset {w} does not fit the rule-2.17 shape")
                if has_x:
                    fr = final_root_image(w, levi, bessel)
                    xnz = XNonzeroVerdict(
                        XNonzeroStatus.OBSTRUCTED_FINAL_ROOT, witness=fr.witness,
                        k=fr.k, sign=fr.sign,
                        in_paper_range=fr.k >= bessel.ell + 2)
                else:
                    xnz = XNonzeroVerdict(XNonzeroStatus.NO_NONZERO_X)
                verdicts.append(SupportVerdict(
                    w, CaseTag.ALPHA_ELL_OTHER,
                    XZeroVerdict(XZeroStatus.OBSTRUCTED, witness=p1), xnz))
                continue
            raise ClassificationGap(f"coset {w} fits no case")  # unreachable
        data = shape_28(w, levi, bessel)
        if data is None:
            raise ClassificationGap(
                f"unobstructed coset {w} does not fit the rule-2.8 shape")
        fr = final_root_image(w, levi, bessel)
        verdicts.append(SupportVerdict(
            w, CaseTag.SHAPE_28,
            XZeroVerdict(XZeroStatus.RANK_REDUCTION, shape=data),
            XNonzeroVerdict(XNonzeroStatus.OBSTRUCTED_FINAL_ROOT,
                            witness=fr.witness, k=fr.k, sign=fr.sign,
                            in_paper_range=fr.k >= bessel.ell + 2)))
    survivors = [v for v in verdicts if v.is_survivor]
    if len(survivors) != 1 or survivors[0].coset != w0:
        raise ClassificationGap(f"survivor set is not the longest coset: "
                                f"{[str(v.coset) for v in survivors]}")
    return verdicts


def classify_whittaker(levi: LeviDatum, bessel: BesselDatum,
                       cap: int | None = None) -> list[SupportVerdict]:
    """The rank-0 limit: Levi GL_r, support on all simple roots, no x layer."""
    if not (bessel.whittaker and levi.full_gl):
        raise RangeError("classify_whittaker needs the Whittaker configuration")
    sp = sigma_P_plus(levi)
    X = set(bessel_X(bessel))
    w0 = canonical_rep(w0_maximal(levi), levi)
    verdicts: list[SupportVerdict] = []
    for w in coset_reps(levi, cap=cap):
        witness = next((alpha for alpha in sp if act(w, alpha) in X), None)
        if w == w0:
            if witness is not None:
                raise ClassificationGap(f"longest coset {w} is obstructed")
            verdicts.append(SupportVerdict(
                w, CaseTag.W0, XZeroVerdict(XZeroStatus.SURVIVOR),
                XNonzeroVerdict(XNonzeroStatus.NO_NONZERO_X)))
        elif witness is not None:
            verdicts.append(SupportVerdict(
                w, CaseTag.P1,
                XZeroVerdict(XZeroStatus.OBSTRUCTED, witness=witness),
                XNonzeroVerdict(XNonzeroStatus.NO_NONZERO_X)))
        else:
            raise ClassificationGap(f"unobstructed non-longest coset {w}")
    return verdicts


# ---------------------------------------------------------------------------
# Rule suite


LEMMA_IDS = ("2.7", "2.8a", "2.8b", "2.9", "2.10", "2.11", "2.12",
             "2.13", "2.14a", "2.14b", "2.15", "2.16", "2.17")


@dataclass(frozen=True)
class LemmaReport:
    lemma_id: str
    instances: int
    counterexamples: tuple[tuple[SignedPerm, str], ...]

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    @property
    def vacuous(self) -> bool:
        return self.instances == 0


def verify_lemma(lemma_id: str, levi: LeviDatum, bessel: BesselDatum,
                 cap: int | None = None) -> LemmaReport:
    """Check one classification rule verbatim over all coset representatives.

    The hypothesis class is evaluated per coset; conclusions are checked on
    the normal-form element.  A failing rule is data, not an error: the
    report carries every counterexample.
    """
    return verify_lemmas((lemma_id,), levi, bessel, cap=cap)[lemma_id]


def verify_lemmas(lemma_ids: tuple[str, ...], levi: LeviDatum, bessel: BesselDatum,
                  cap: int | None = None) -> dict[str, LemmaReport]:
    """Check several rules in one pass over the coset list."""
    for lemma_id in lemma_ids:
        if lemma_id not in LEMMA_IDS:
            raise RangeError(f"unknown rule id {lemma_id!r}")
    profiles = []
    for w in coset_reps(levi, cap=cap):
        nf, u = _normal_form_element(w, levi)
        empty = obstruction_x_zero(w, levi, bessel) is None
        other = alpha_ell_case(w, levi, bessel) is AlphaEllCase.OTHER
        profiles.append((w, nf, u, empty, other))
    return {lemma_id: _check_lemma(lemma_id, levi, bessel, profiles)
            for lemma_id in lemma_ids}


def _check_lemma(lemma_id: str, levi: LeviDatum, bessel: BesselDatum,
                 profiles: list) -> LemmaReport:
    group, n, r, ell = levi.group, levi.n, levi.group.r, bessel.ell
    prime = group.prime
    instances = 0
    bad: list[tuple[SignedPerm, str]] = []

    def record(w: SignedPerm, msg: str) -> None:
        bad.append((w, msg))

    for w, nf, u, empty, other in profiles:
        if lemma_id == "2.7":
            if group.kind is GroupKind.SO_EVEN and isinstance(nf.w2, FourCycle):
                instances += 1
                if empty:
                    record(w, "four-cycle coset meets the support in nothing")
        elif lemma_id in ("2.8a", "2.8b", "2.9", "2.10"):
            if not empty:
                continue
            if lemma_id == "2.9" and u(n) == prime(n):
                continue
            instances += 1
            if lemma_id == "2.8a":
                for k in range(n + 1, ell + 1):
                    if u(k) <= n:
                        record(w, f"w({k}) = {u(k)} <= n")
                        break
            elif lemma_id == "2.8b":
                for i in range(1, n + 1):
                    if u(i) == i:
                        record(w, f"w fixes {i}")
                        break
            elif lemma_id == "2.9":
                for k in range(n + 1, ell + 1):
                    if u(k) != k:
                        record(w, f"w({k}) = {u(k)} != {k}")
                        break
            else:
                for i in range(2, n + 1):
                    if u(i) == prime(i) and u(i - 1) != prime(i - 1):
                        record(w, f"w({i}) = {i}' but w({i - 1}) != {i - 1}'")
                        break
        elif lemma_id in ("2.11", "2.12", "2.13", "2.14a", "2.14b",
                          "2.15", "2.16", "2.17"):
            if not other:
                continue
            instances += 1
            if lemma_id == "2.11":
                if u(ell) != ell:
                    record(w, f"w(ell) = {u(ell)} != {ell}")
            elif lemma_id == "2.12":
                uinv = u.inverse()
                for k in range(n + 1, ell):
                    if uinv(k) <= n:
                        record(w, f"w^-1({k}) = {uinv(k)} <= n")
                        break
            elif lemma_id == "2.13":
                if u(n) == n:
                    record(w, "w fixes n")
            elif lemma_id == "2.14a":
                for i in range(1, n + 1):
                    if u(i) == i:
                        record(w, f"w fixes {i}")
                        break
            elif lemma_id == "2.14b":
                for i0 in range(1, n + 1):
                    if u(i0) == prime(i0) and any(u(i) != prime(i)
                                                  for i in range(1, i0 + 1)):
                        record(w, f"bar at {i0} without bar prefix")
                        break
            elif lemma_id == "2.15":
                v = u(n)
                va = v if v <= r else prime(v)
                if not n + 1 <= va <= r:
                    record(w, f"w(n) = {v} outside the middle")
            elif lemma_id == "2.16":
                for k in range(n + 1, ell):
                    if u(k) != k:
                        record(w, f"w({k}) = {u(k)} != {k}")
                        break
            else:
                data = shape_217(w, levi, bessel)
                if data is None:
                    record(w, "does not fit the rule-2.17 shape at all")
                elif not shape_217_verbatim(data, levi, bessel):
                    record(w, f"shape tail outside the verbatim rule: {data}")
    return LemmaReport(lemma_id, instances, tuple(bad))
