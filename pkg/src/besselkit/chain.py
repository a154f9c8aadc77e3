"""Langlands factorization of Weyl elements between associate simple subsets.

A subset theta of the simple system determines a standard parabolic; an
element carrying theta onto theta' factors into elementary pieces
w_i = w_long(theta_i + alpha_i) * w_long(theta_i), and the unipotent root
sets decompose accordingly.  Everything here is verified, not assumed:
the product identity, the disjoint root-set decomposition, and length
additivity are all checked exhaustively by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import GroupDatum, GroupKind, RangeError
from .roots import Root, RootKind, act, positive_roots, simple_roots
from .weyl import (CapExceeded, DEFAULT_CAP, SignedPerm, compose, enumerate_weyl,
                   identity, sign_change, transposition_pair, weyl_order)


class ChainStuck(RuntimeError):
    """No admissible simple root while the remainder is nontrivial."""


def reflection(group: GroupDatum, root: Root) -> SignedPerm:
    """The reflection in a root, as a signed permutation."""
    if root.kind is RootKind.DIFF:
        return transposition_pair(group, root.i, root.j)
    if root.kind is RootKind.SUM:
        return transposition_pair(group, root.i, group.prime(root.j))
    return sign_change(group, root.i)


def theta_key(theta: tuple[Root, ...]) -> tuple:
    return tuple(sorted(r.sort_key() for r in theta))


def normalize_theta(group: GroupDatum, theta) -> tuple[Root, ...]:
    delta = set(simple_roots(group))
    out = tuple(sorted(set(theta), key=Root.sort_key))
    for root in out:
        if root not in delta:
            raise RangeError(f"{root} is not a simple root of this group")
    return out


def theta_positive(group: GroupDatum, theta: tuple[Root, ...]) -> frozenset[Root]:
    """Positive roots in the rational span of theta."""
    r = group.r
    ech: list[list[Fraction]] = []
    for root in theta:
        v = list(root.vector(r))
        for row in ech:
            col = next(c for c in range(r) if row[c] != 0)
            if v[col] != 0:
                f = v[col] / row[col]
                v = [a - f * b for a, b in zip(v, row)]
        if any(x != 0 for x in v):
            ech.append(v)

    def member(vec) -> bool:
        v = list(vec)
        for row in ech:
            col = next(c for c in range(r) if row[c] != 0)
            if v[col] != 0:
                f = v[col] / row[col]
                v = [a - f * b for a, b in zip(v, row)]
        return all(x == 0 for x in v)

    return frozenset(a for a in positive_roots(group) if member(a.vector(r)))


def weyl_subgroup(group: GroupDatum, theta: tuple[Root, ...],
                  cap: int | None = None) -> list[SignedPerm]:
    """The parabolic subgroup W_theta, generated by the reflections of theta."""
    cap = DEFAULT_CAP if cap is None else cap
    gens = [reflection(group, root) for root in theta]
    seen = {identity(group).image: identity(group)}
    frontier = list(seen.values())
    while frontier:
        new = []
        for w in frontier:
            for s in gens:
                v = compose(w, s)
                if v.image not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(f"|W_theta| exceeds cap {cap}")
                    seen[v.image] = v
                    new.append(v)
        frontier = new
    return sorted(seen.values(), key=lambda w: w.image)


def inversion_count(w: SignedPerm, roots: frozenset[Root]) -> int:
    return sum(1 for a in roots if act(w, a).neg)


_LONGEST_CACHE: dict[tuple, SignedPerm] = {}


def longest_element(group: GroupDatum, theta, cap: int | None = None) -> SignedPerm:
    """The longest element of W_theta (argmax of inversions over theta-positives)."""
    theta = normalize_theta(group, theta)
    key = (group, theta_key(theta))
    hit = _LONGEST_CACHE.get(key)
    if hit is not None:
        return hit
    pos = theta_positive(group, theta)
    best = None
    best_inv = -1
    ties = 0
    for w in weyl_subgroup(group, theta, cap=cap):
        inv = inversion_count(w, pos)
        if inv > best_inv:
            best, best_inv, ties = w, inv, 1
        elif inv == best_inv:
            ties += 1
    assert best is not None and ties == 1, "longest element must be unique"
    _LONGEST_CACHE[key] = best
    return best


def weyl_between(group: GroupDatum, theta, theta_prime,
                 cap: int | None = None) -> list[SignedPerm]:
    """All w with w(theta) = theta' as root sets (the full list, unquotiented)."""
    theta = normalize_theta(group, theta)
    theta_prime = normalize_theta(group, theta_prime)
    target = set(theta_prime)
    out = []
    for w in enumerate_weyl(group, cap=cap):
        if {act(w, a) for a in theta} == target:
            out.append(w)
    return out


@dataclass(frozen=True)
class ChainStep:
    theta: tuple[Root, ...]
    alpha: Root
    w_i: SignedPerm
    w_prime: SignedPerm      # the remainder before this step


def langlands_chain(theta, theta_prime, w: SignedPerm,
                    cap: int | None = None) -> list[ChainStep]:
    """Factor w in W(theta, theta') into elementary steps.

    At each step the least simple root alpha outside theta_i with negative
    image under the remainder is adjoined; the elementary factor is
    w_long(theta_i + alpha) * w_long(theta_i).  The empty chain is returned
    for w = 1.  Raises :class:`ChainStuck` on a discrepancy (never observed;
    a nontrivial remainder always sends some simple root negative, and it
    cannot lie in theta_i).
    """
    group = w.group
    theta = normalize_theta(group, theta)
    theta_prime = normalize_theta(group, theta_prime)
    if {act(w, a) for a in theta} != set(theta_prime):
        raise RangeError("w does not carry theta onto theta'")
    delta = simple_roots(group)
    steps: list[ChainStep] = []
    theta_i = theta
    w_rem = w
    bound = 2 * len(positive_roots(group)) + 1
    while not w_rem.is_identity():
        if len(steps) >= bound:
            raise ChainStuck(f"chain for {w} did not terminate")
        alpha = next((a for a in delta
                      if a not in theta_i and act(w_rem, a).neg), None)
        if alpha is None:
            raise ChainStuck(f"no admissible simple root for remainder {w_rem}")
        delta_i = normalize_theta(group, theta_i + (alpha,))
        w_i = compose(longest_element(group, delta_i, cap=cap),
                      longest_element(group, theta_i, cap=cap))
        steps.append(ChainStep(theta_i, alpha, w_i, w_rem))
        image = tuple(act(w_i, a) for a in theta_i)
        if any(a.neg for a in image) or not set(image) <= set(delta_i):
            raise ChainStuck(f"elementary factor left the simple system: {w_i}")
        theta_i = normalize_theta(group, image)
        w_rem = compose(w_rem, w_i.inverse())
    if set(theta_i) != set(theta_prime):
        raise ChainStuck(f"chain ended at {theta_i}, expected {theta_prime}")
    return steps


def root_set_N(w: SignedPerm, theta, cap: int | None = None) -> frozenset[Root]:
    """Positive roots outside the theta-span sent negative by w."""
    group = w.group
    theta = normalize_theta(group, theta)
    span = theta_positive(group, theta)
    return frozenset(a for a in positive_roots(group)
                     if a not in span and act(w, a).neg)


@dataclass(frozen=True)
class DecompositionReport:
    ok: bool
    failures: tuple[str, ...]
    step_sizes: tuple[int, ...]


def verify_decomposition(chain: list[ChainStep]) -> DecompositionReport:
    """Check the step-wise root-set decomposition along a chain.

    For every step i the remainder's root set must be the disjoint union of
    the factor's root set and the pullback of the next remainder's; sizes
    must therefore be additive along the chain.
    """
    failures: list[str] = []
    sizes: list[int] = []
    for idx, step in enumerate(chain):
        r_rem = root_set_N(step.w_prime, step.theta)
        r_fac = root_set_N(step.w_i, step.theta)
        sizes.append(len(r_fac))
        if idx + 1 < len(chain):
            nxt = chain[idx + 1]
            r_next = root_set_N(nxt.w_prime, nxt.theta)
        else:
            r_next = frozenset()
        pulled = frozenset(act(step.w_i.inverse(), a) for a in r_next)
        if r_fac & pulled:
            failures.append(f"step {idx}: factor and pulled-back sets meet")
        if r_fac | pulled != r_rem:
            failures.append(f"step {idx}: union mismatch "
                            f"({len(r_fac)} + {len(pulled)} vs {len(r_rem)})")
    return DecompositionReport(not failures, tuple(failures), tuple(sizes))


def chain_product(chain: list[ChainStep], group: GroupDatum) -> SignedPerm:
    """The product w_{n-1} ... w_1 of the elementary factors."""
    out = identity(group)
    for step in chain:
        out = compose(step.w_i, out)
    return out


def chain_to_json(chain: list[ChainStep]) -> list[dict]:
    return [{
        "theta": [str(a) for a in step.theta],
        "alpha": str(step.alpha),
        "w_cycles": step.w_i.to_cycle_string(),
    } for step in chain]
