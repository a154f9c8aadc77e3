"""Batch command-line front end.

Subcommands run classifications, rule suites, chain factorizations, matrix
identity checks, and the finite-field double-coset oracle, and emit
machine-readable reports (JSON by default, CSV for tables).  Exit codes:
0 verified, 1 counterexample found (report attached), 2 usage error.
Reports are byte-identical for identical flags and seed; timing is only
emitted on request.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
import time

from .chain import chain_to_json, langlands_chain, root_set_N, verify_decomposition, weyl_between
from .core import GroupDatum, GroupKind, RangeError, make_config, whittaker_config
from .matgroup import (PrimeField, RationalRing, coset_oracle, n_of_x, perm_rep,
                       ring_for, unipotent, verify_commutation,
                       verify_w0_normalizes, witt_normalize)
from .roots import Root, positive_roots, simple_roots
from .support import (LEMMA_IDS, CaseTag, ClassificationGap, SupportVerdict,
                      XNonzeroStatus, XZeroStatus, classify, verify_lemmas)
from .weyl import CapExceeded

SCHEMA_VERSION = "1"


def _report_skeleton(command: str, config: dict) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "cosets": [],
        "survivors": [],
        "lemmas": [],
        "chains": [],
        "matchecks": [],
        "counterexamples": [],
        "timing": None,
    }


def _emit(report: dict, args, t0: float) -> int:
    if getattr(args, "timing", False):
        report["timing"] = {"seconds": round(time.time() - t0, 3)}
    if getattr(args, "format", "json") == "csv":
        _emit_csv(report)
    else:
        json.dump(report, sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
    return 1 if report["counterexamples"] else 0


def _emit_csv(report: dict) -> None:
    out = sys.stdout
    if report["cosets"]:
        out.write("coset,case_tag,x0_verdict,xnz_verdict,witness\n")
        for row in report["cosets"]:
            out.write("{coset},{case_tag},{x0_verdict},{xnz_verdict},{witness}\n"
                      .format(**row))
    elif report["lemmas"]:
        out.write("lemma,group,r,n,ell1,instances,passed\n")
        for row in report["lemmas"]:
            out.write("{lemma},{group},{r},{n},{ell1},{instances},{passed}\n"
                      .format(**row))


def _cap(args) -> int | None:
    env = os.environ.get("BESSEL_CAP")
    if env is not None:
        return int(env)
    return getattr(args, "cap", None)


def _verdict_rows(verdicts: list[SupportVerdict]) -> list[dict]:
    rows = []
    for v in verdicts:
        witness = v.x_zero.witness or v.x_nonzero.witness
        rows.append({
            "coset": v.coset.to_cycle_string(),
            "case_tag": v.case_tag.value,
            "x0_verdict": v.x_zero.status.value,
            "xnz_verdict": v.x_nonzero.status.value,
            "witness": str(witness) if witness is not None else "",
            "k": v.x_nonzero.k,
            "sign": v.x_nonzero.sign,
            "in_paper_range": v.x_nonzero.in_paper_range,
        })
    return rows


def cmd_classify(args) -> int:
    t0 = time.time()
    if args.whittaker:
        group, levi, bessel = whittaker_config(args.group, args.rank)
    else:
        if args.n is None or args.ell1 is None:
            raise RangeError("--n and --ell1 are required without --whittaker")
        group, levi, bessel = make_config(args.group, args.rank, args.n, args.ell1)
    config = {"group": args.group, "r": args.rank, "n": levi.n, "ell1": bessel.ell1,
              "whittaker": args.whittaker}
    report = _report_skeleton("classify", config)
    try:
        verdicts = classify(levi, bessel, cap=_cap(args))
    except ClassificationGap as exc:
        report["counterexamples"].append({"kind": "classification-gap", "detail": str(exc)})
        return _emit(report, args, t0)
    report["cosets"] = _verdict_rows(verdicts)
    report["survivors"] = [v.coset.to_cycle_string() for v in verdicts if v.is_survivor]
    if report["survivors"] != [w.coset.to_cycle_string()
                               for w in verdicts if w.case_tag is CaseTag.W0]:
        report["counterexamples"].append({"kind": "survivor-mismatch"})
    return _emit(report, args, t0)


def _sweep_configs(args):
    groups = ([k.value for k in GroupKind] if args.groups == "all"
              else args.groups.split(","))
    for name in groups:
        for r in range(args.rank_min, args.rank_max + 1):
            for n in range(1, r):
                for ell1 in range(1, r - n + 1):
                    yield make_config(name, r, n, ell1)


def cmd_verify(args) -> int:
    t0 = time.time()
    ids = LEMMA_IDS if args.lemma == "all" else (args.lemma,)
    for lemma_id in ids:
        if lemma_id not in LEMMA_IDS:
            raise RangeError(f"unknown rule id {lemma_id!r}")
    config = {"lemma": args.lemma, "groups": args.groups,
              "rank_min": args.rank_min, "rank_max": args.rank_max}
    report = _report_skeleton("verify", config)
    for group, levi, bessel in _sweep_configs(args):
        results = verify_lemmas(tuple(ids), levi, bessel, cap=_cap(args))
        for lemma_id in ids:
            res = results[lemma_id]
            report["lemmas"].append({
                "lemma": lemma_id, "group": group.kind.value, "r": group.r,
                "n": levi.n, "ell1": bessel.ell1,
                "instances": res.instances, "passed": res.passed,
                "vacuous": res.vacuous,
            })
            for w, msg in res.counterexamples:
                report["counterexamples"].append({
                    "kind": "lemma", "lemma": lemma_id,
                    "group": group.kind.value, "r": group.r,
                    "n": levi.n, "ell1": bessel.ell1,
                    "coset": w.to_cycle_string(), "detail": msg,
                })
    return _emit(report, args, t0)


def _parse_theta(group: GroupDatum, text: str) -> tuple[Root, ...]:
    delta = simple_roots(group)
    if text.strip() in ("", "none"):
        return ()
    out = []
    for token in text.split(","):
        idx = int(token)
        if not 1 <= idx <= len(delta):
            raise RangeError(f"simple-root index {idx} outside 1..{len(delta)}")
        out.append(delta[idx - 1])
    return tuple(out)


def cmd_chain(args) -> int:
    t0 = time.time()
    group = GroupDatum(GroupKind.from_name(args.group), args.rank)
    theta = _parse_theta(group, args.theta)
    theta_prime = _parse_theta(group, args.theta_prime)
    config = {"group": args.group, "r": args.rank,
              "theta": args.theta, "theta_prime": args.theta_prime}
    report = _report_skeleton("chain", config)
    for w in weyl_between(group, theta, theta_prime, cap=_cap(args)):
        chain = langlands_chain(theta, theta_prime, w, cap=_cap(args))
        decomp = verify_decomposition(chain)
        entry = {
            "w": w.to_cycle_string(),
            "steps": chain_to_json(chain),
            "root_set_size": len(root_set_N(w, theta)),
            "decomposition_ok": decomp.ok,
        }
        report["chains"].append(entry)
        if not decomp.ok:
            report["counterexamples"].append({
                "kind": "chain", "w": w.to_cycle_string(),
                "failures": list(decomp.failures),
            })
    return _emit(report, args, t0)


def cmd_matcheck(args) -> int:
    t0 = time.time()
    rng = random.Random(args.seed)
    config = {"identity": args.identity, "q": args.q, "trials": args.trials,
              "seed": args.seed, "group": args.group, "r": args.rank}
    report = _report_skeleton("matcheck", config)
    group, levi, bessel = make_config(args.group, args.rank, args.n, args.ell1)
    q = args.q if args.q else None
    ring = ring_for(group, q)

    if args.identity == "commutation":
        signs = set()
        ell, r = bessel.ell, group.r
        choices = [(k, s) for k in range(ell + 2, r + 1) for s in (1, -1)]
        if group.kind in (GroupKind.SO_ODD, GroupKind.U_ODD):
            choices.append((None, 0))
        for trial in range(args.trials):
            xs = [ring.rand(rng) for _ in range(bessel.s)]
            t = ring.of(1 + rng.randrange(5))
            for k0, sign in choices:
                res = verify_commutation(ring, levi, bessel, xs, k0, sign, t)
                signs.add(res.sign)
                report["matchecks"].append({
                    "trial": trial, "alpha0": str(res.alpha0),
                    "sign": res.sign, "matrix_identity": res.matrix_identity,
                })
        if len(signs) > 1:
            report["counterexamples"].append({"kind": "commutation-sign",
                                              "signs": sorted(signs)})
    elif args.identity == "w0":
        for trial in range(args.trials):
            xs = [ring.rand(rng) for _ in range(bessel.s)]
            ok = verify_w0_normalizes(ring, levi, bessel, xs)
            report["matchecks"].append({"trial": trial, "in_parabolic": ok})
            if not ok:
                report["counterexamples"].append({"kind": "w0", "trial": trial})
    elif args.identity == "membership":
        from .matgroup import in_group
        roots = positive_roots(group)
        for trial in range(args.trials):
            root = roots[rng.randrange(len(roots))]
            if root.kind.value == "long":
                t = ring.mul(ring.gamma, ring.of(1 + rng.randrange(5)))
            else:
                t = ring.rand(rng)
            ok = in_group(unipotent(group, ring, root, t))
            ok = ok and in_group(n_of_x(ring, bessel,
                                        [ring.rand(rng) for _ in range(bessel.s)]))
            report["matchecks"].append({"trial": trial, "root": str(root), "ok": ok})
            if not ok:
                report["counterexamples"].append({"kind": "membership", "trial": trial})
    else:
        raise RangeError(f"unknown identity {args.identity!r}")
    return _emit(report, args, t0)


def cmd_oracle(args) -> int:
    t0 = time.time()
    group, levi, bessel = make_config(args.group, args.rank, args.n, args.ell1)
    config = {"group": args.group, "r": args.rank, "n": args.n,
              "ell1": args.ell1, "q": args.q}
    report = _report_skeleton("oracle", config)
    res = coset_oracle(args.q, levi, bessel, group_cap=_cap(args) or 200_000)
    report["matchecks"].append({
        "group_order": res.group_order,
        "num_cosets": res.num_cosets,
        "coset_sizes": list(res.coset_sizes),
        "coverage": res.coverage,
        "equal_norm_merged": res.equal_norm_merged,
        "seeds": [{"label": lab, "coset": cid} for lab, cid in res.seed_labels],
    })
    if not res.coverage:
        report["counterexamples"].append({"kind": "oracle-coverage"})
    if not res.equal_norm_merged:
        report["counterexamples"].append({"kind": "oracle-norm"})
    return _emit(report, args, t0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="besselkit",
        description="Exhaustive verification of the coset combinatorics "
                    "behind Bessel-model support.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, need_levi=True):
        p.add_argument("--group", required=True,
                       choices=[k.value for k in GroupKind])
        p.add_argument("--rank", type=int, required=True)
        if need_levi:
            p.add_argument("--n", type=int, default=None)
            p.add_argument("--ell1", type=int, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--cap", type=int, default=None)
        p.add_argument("--timing", action="store_true")

    p = sub.add_parser("classify", help="run the full coset classification")
    add_common(p)
    p.add_argument("--whittaker", action="store_true",
                   help="rank-0 limit: Levi GL_r, support on all simple roots")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run the classification-rule suite")
    p.add_argument("--lemma", default="all",
                   help=f"rule id ({', '.join(LEMMA_IDS)}) or 'all'")
    p.add_argument("--groups", default="all",
                   help="comma-separated group kinds, or 'all'")
    p.add_argument("--rank-min", type=int, default=2)
    p.add_argument("--rank-max", type=int, default=4)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--timing", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chain", help="factor Weyl elements between simple subsets")
    add_common(p, need_levi=False)
    p.add_argument("--theta", required=True,
                   help="comma-separated simple-root indices, or 'none'")
    p.add_argument("--theta-prime", required=True, dest="theta_prime")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("matcheck", help="exact matrix identity checks")
    add_common(p)
    p.add_argument("--identity", required=True,
                   choices=("commutation", "w0", "membership"))
    p.add_argument("--q", type=int, default=0,
                   help="odd prime for F_q; 0 for the rationals")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_matcheck)

    p = sub.add_parser("oracle", help="finite-field double-coset oracle")
    add_common(p)
    p.add_argument("--q", type=int, default=3)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (RangeError, CapExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
