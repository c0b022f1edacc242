"""Command-line entry point.

Exit status is 0 exactly when every asserted property holds.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .bump import build_bump, write_profile_csv
from .errors import InfeasibleError, InvalidArgument, MomentViolation, ResourceLimit
from .io import load_measure
from .kernel import build_kernel
from .measures import DiscreteMeasure1D, DiscreteMeasureND, as_1d
from .sliced import DirectionBudget, max_sliced
from .transport import w1_1d, w1_exact
from .zolotarev import zeta_p_1d


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def _two_inputs(args) -> tuple:
    if not args.input or len(args.input) != 2:
        raise InvalidArgument("pass exactly two --input files")
    return load_measure(args.input[0]), load_measure(args.input[1])


def _as_line(m) -> DiscreteMeasure1D:
    return m if isinstance(m, DiscreteMeasure1D) else as_1d(m)


def _as_cloud(m) -> DiscreteMeasureND:
    if isinstance(m, DiscreteMeasureND):
        return m
    if m.has_density:
        raise InvalidArgument("this command needs atomic inputs")
    return DiscreteMeasureND(m.locations[:, None], m.weights)


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------
def cmd_dist(args) -> int:
    mu, nu = _two_inputs(args)
    if args.metric == "w1":
        if isinstance(mu, DiscreteMeasure1D) or (isinstance(mu, DiscreteMeasureND) and mu.dim == 1):
            value = w1_1d(_as_line(mu), _as_line(nu))
        else:
            value = w1_exact(mu, nu).cost
        _emit({"metric": "w1", "value": value}, args.out)
    else:
        value = zeta_p_1d(_as_line(mu) - _as_line(nu), args.p)
        _emit({"metric": "zeta", "p": args.p, "value": value}, args.out)
    return 0


def cmd_oracle(args) -> int:
    mu, nu = _two_inputs(args)
    plan = w1_exact(_as_cloud(mu), _as_cloud(nu))
    _emit({"cost": plan.cost, "dual_value": plan.dual_value,
           "flows": [list(f) for f in plan.flows]}, args.out)
    return 0


def cmd_sliced(args) -> int:
    mu, nu = _two_inputs(args)
    budget = DirectionBudget(n_directions=args.budget)
    r = max_sliced(_as_cloud(mu), _as_cloud(nu), args.p, budget, seed=args.seed)
    _emit({"value": r.value, "argmax_theta": r.argmax_theta.tolist(), "n_directions": r.n_directions,
           "refinement_iters": r.refinement_iters, "seed": r.seed}, args.out)
    return 0


def cmd_kernel(args) -> int:
    if args.action == "build":
        k = build_kernel(args.p, args.d)
        if args.out:
            Path(args.out).write_text(k.to_json() + "\n", encoding="utf-8")
        print(k.to_json())
        return 0
    return _run_campaign("kernel_audit", args)


def cmd_bump(args) -> int:
    if args.action == "build":
        b = build_bump(args.p)
        payload = {"p": b.p, "normalizer": str(b.a_p), "v_coeffs": [str(c) for c in b.v_coeffs]}
        if args.out:
            write_profile_csv(b, args.out)
        print(json.dumps(payload, indent=2))
        return 0
    return _run_campaign("bump_audit", args)


def _run_campaign(kind: str, args) -> int:
    cfg = harness.ExperimentConfig(
        kind=kind, seed=args.seed, p=args.p, q=args.q, d=args.d, n_atoms=args.n,
        n_trials=args.trials, budget=DirectionBudget(n_directions=args.budget))
    report = harness.run(cfg)
    if args.out:
        paths = harness.write_outputs(report, args.out)
        print(f"wrote {', '.join(str(p) for p in paths.values())}", file=sys.stderr)
    summary = report["summary"]
    for name, ok in summary["properties"].items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    if "mode" in summary:
        print(f"mode: {summary['mode']}")
    if summary.get("max_implied_constant") is not None:
        print(f"max implied constant: {summary['max_implied_constant']:.6g}")
    return 0 if summary["passed"] else 1


def cmd_verify(args) -> int:
    kind = {"thm11": "thm11", "thm12": "thm12", "lemmas": "lemma_suite"}[args.target]
    return _run_campaign(kind, args)


# -----------------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", help="measure JSON file (repeat for two)")
    common.add_argument("--p", type=int, default=1, help="order (default 1)")
    common.add_argument("--q", type=float, default=2.0, help="moment exponent (default 2)")
    common.add_argument("--d", type=int, default=2, help="dimension (default 2)")
    common.add_argument("--n", type=int, default=8, help="atoms per measure (default 8)")
    common.add_argument("--trials", type=int, default=100, help="campaign trials (default 100)")
    common.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    common.add_argument("--budget", type=int, default=512, help="random directions (default 512)")
    common.add_argument("--out", help="output file (campaigns: JSON path, CSV written alongside)")

    parser = argparse.ArgumentParser(prog="cramer-wold", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", parents=[common], help="distance between two measures")
    p.add_argument("metric", choices=["w1", "zeta"])
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("sliced", parents=[common], help="max-sliced distance")
    p.set_defaults(func=cmd_sliced)

    p = sub.add_parser("kernel", parents=[common], help="smoothing kernel")
    p.add_argument("action", choices=["build", "audit"])
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("bump", parents=[common], help="radial cutoff function")
    p.add_argument("action", choices=["build", "audit"])
    p.set_defaults(func=cmd_bump)

    p = sub.add_parser("verify", parents=[common], help="verification campaigns")
    p.add_argument("target", choices=["thm11", "thm12", "lemmas"])
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="exact transport plan")
    p.add_argument("metric", choices=["w1"])
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgument, MomentViolation, ResourceLimit, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
