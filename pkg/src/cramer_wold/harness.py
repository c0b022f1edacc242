"""
Verification campaigns.

Each campaign turns an ``ExperimentConfig`` into a report dictionary with
per-trial (or per-instance) rows and a summary of asserted properties. Rows
depend only on the config and the trial index, so reports are reproducible;
wall-clock data lives in the top-level ``timing`` and ``timestamp`` entries,
which are the only fields that differ between identical runs.

Campaign kinds
--------------
thm11
    Kantorovich distance against the max-sliced distance with its exponent.
thm12
    Zolotarev version. Full check for p = 1 and for d = 1; for p >= 2 in
    higher dimensions only the chain ``S <= moment upper bound`` is asserted.
lemma_suite
    Kernel, smoothing, bump, Fourier and moment-bound audits together; each
    is also available alone.
"""
from __future__ import annotations

import csv
import datetime as _dt
import io as _io
import json
import os
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from itertools import product
from pathlib import Path
from time import perf_counter
from typing import Callable

import numpy as np
import scipy

from . import bounds
from .bump import build_bump, certify_derivative_bound, end_derivatives, seam_check
from .errors import InvalidArgument
from .io import SCHEMA_VERSION, dump_report, measure_to_dict
from .kernel import build_kernel, convolve_1d, kernel_radial_moment, smoothing_bound_explicit, \
    smoothing_bound_kernel_tv
from .measures import (DiscreteMeasureND, abs_moment, moment_matched_pairs, project, sample_points,
                       sample_weights, total_variation)
from .sliced import DirectionBudget, max_sliced, sphere_directions
from .spectral import check_fourier_bound, frequency_grid, kernel_char_fn_1d
from .transport import w1_exact
from .zolotarev import zeta_p_1d

THREADS_ENV = "CW_THREADS"
KINDS = ("thm11", "thm12", "lemma_suite", "kernel_audit", "smoothing_audit", "bump_audit",
         "spectral_audit", "moment_bound_audit")
TRIVIAL_S = 1e-12
TRIVIAL_LHS = 1e-9
CALIBRATION_HEADROOM = 2.0
PARTIAL_LABEL = "lower-bound consistency, not full verification"


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int
    p: int = 1
    q: float = 2.0
    d: int = 2
    n_atoms: int = 8
    n_trials: int = 100
    budget: DirectionBudget = field(default_factory=DirectionBudget)
    law: str = "gaussian"
    weights: str = "dirichlet"
    output: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown campaign {self.kind!r}; choose from {KINDS}")
        if self.seed is None or int(self.seed) != self.seed or self.seed < 0:
            raise InvalidArgument("a nonnegative integer seed is required")
        if self.kind in ("thm11", "thm12"):
            if not 1 <= self.d <= 4:
                raise InvalidArgument("campaigns run for 1 <= d <= 4")
            if not 1 <= self.n_atoms <= 64:
                raise InvalidArgument("campaigns run for 1 <= n <= 64 atoms")
            if not self.q > self.p:
                raise InvalidArgument("need q > p")
            if self.n_trials < 1:
                raise InvalidArgument("need at least one trial")

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("output")
        return out


def trial_seed(master: int, index: int) -> int:
    """Per-trial seed derived from the master seed and the trial index."""
    return int(np.random.SeedSequence([master, index]).generate_state(1, np.uint64)[0] >> 1)


def environment() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def n_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map_trials(fn: Callable[[int], tuple[dict, float]], n: int) -> tuple[list[dict], dict]:
    """Run ``fn`` over trial indices; rows are collected by index regardless of threading."""
    k = n_threads()
    if k == 1:
        results = [fn(i) for i in range(n)]
    else:
        with ThreadPoolExecutor(max_workers=k) as pool:
            results = list(pool.map(fn, range(n)))
    rows = [r for r, _ in results]
    timing = {str(i): t for i, (_, t) in enumerate(results)}
    return rows, timing


# -----------------------------------------------------------------------------
# Calibration
# -----------------------------------------------------------------------------
def calibration_key(kind: str, p: int, q: float, d: int, n: int, law: str, weights: str) -> str:
    return f"{kind}/p={p}/q={q:g}/d={d}/n={n}/law={law}/weights={weights}"


def load_calibration() -> dict:
    text = resources.files("cramer_wold").joinpath("data/calibration.json").read_text(encoding="utf-8")
    return json.loads(text)["thresholds"]


def _threshold(cfg: ExperimentConfig) -> float | None:
    entry = load_calibration().get(
        calibration_key(cfg.kind, cfg.p, cfg.q, cfg.d, cfg.n_atoms, cfg.law, cfg.weights))
    return None if entry is None else float(entry["max_implied_constant"])


# -----------------------------------------------------------------------------
# Projection campaigns
# -----------------------------------------------------------------------------
def _moment_root(mu, nu, q: float) -> float:
    return max(abs_moment(mu, q), abs_moment(nu, q)) ** (1.0 / q)


def _random_pair(cfg: ExperimentConfig, seed: int):
    rng = np.random.default_rng(seed)
    n, d = cfg.n_atoms, cfg.d
    mu = DiscreteMeasureND(sample_points(rng, n, d, cfg.law), sample_weights(rng, n, cfg.weights), True)
    nu = DiscreteMeasureND(sample_points(rng, n, d, cfg.law), sample_weights(rng, n, cfg.weights), True)
    return mu, nu


def _projection_row(cfg: ExperimentConfig, index: int, seed: int, mu, nu, lhs: float,
                    p: int, full: bool) -> dict:
    sl = max_sliced(mu, nu, p, cfg.budget, seed=seed % 2**32)
    S = sl.value
    b = _moment_root(mu, nu, cfg.q)
    params = bounds.BoundParams(p, cfg.q, cfg.d, b)
    if cfg.kind == "thm11":
        beta = bounds.beta_w1(cfg.q, cfg.d)
        factor = bounds.rhs_w1(params, S, 1.0)
    else:
        beta = bounds.beta_zeta(p, cfg.q, cfg.d)
        factor = bounds.rhs_zeta(params, S, 1.0) / cfg.d**p
    row = {
        "index": index, "seed": seed, "S": S, "b": b, "beta": beta, "rhs_factor": factor,
        "argmax_theta": sl.argmax_theta.tolist(),
    }
    if full:
        scale = max(1.0, abs(lhs))
        row["lhs"] = lhs
        row["contraction"] = bool(lhs >= S - 1e-12 * scale)
        if S <= TRIVIAL_S:
            row["status"] = "trivial" if lhs <= TRIVIAL_LHS else "flagged"
            row["implied_constant"] = None
        else:
            row["status"] = "ok"
            if cfg.kind == "thm11":
                c = bounds.implied_constant_w1(lhs, params, S)
            else:
                c = bounds.implied_constant_zeta(lhs, params, S)
            row["implied_constant"] = c
    else:
        upper = bounds.zeta_moment_bound(abs_moment(mu - nu, p), p, cfg.d)
        row["moment_upper"] = upper
        row["chain_holds"] = bool(S <= upper * (1 + 1e-12))
        # zeta_p >= S, so this is a lower bound on the constant the inequality needs
        row["implied_constant_lower"] = (
            bounds.implied_constant_zeta(S, params, S) if S > TRIVIAL_S else None)
        row["status"] = "ok" if row["chain_holds"] else "flagged"
    return row


def run_projection_campaign(cfg: ExperimentConfig) -> dict:
    """Campaign for ``thm11`` and ``thm12`` configs."""
    p = 1 if cfg.kind == "thm11" else cfg.p
    full = p == 1 or cfg.d == 1
    if p == 1:
        seeds = [trial_seed(cfg.seed, i) for i in range(cfg.n_trials)]
        pairs = [None] * cfg.n_trials
    else:
        pairs, seeds = moment_matched_pairs(cfg.seed, cfg.n_trials, cfg.d, p, cfg.n_atoms,
                                            law=cfg.law, weights=cfg.weights)

    def trial(i: int):
        t0 = perf_counter()
        mu, nu = pairs[i] if pairs[i] is not None else _random_pair(cfg, seeds[i])
        if not full:
            lhs = float("nan")
        elif p == 1:
            lhs = w1_exact(mu, nu).cost
        else:
            lhs = zeta_p_1d(project(mu, [1.0]) - project(nu, [1.0]), p)
        row = _projection_row(cfg, i, seeds[i], mu, nu, lhs, p, full)
        if row["status"] == "flagged":
            row["replay"] = {"mu": measure_to_dict(mu), "nu": measure_to_dict(nu)}
        return row, perf_counter() - t0

    rows, timing = _map_trials(trial, cfg.n_trials)
    props: dict[str, bool] = {}
    summary: dict = {"mode": "full verification" if full else PARTIAL_LABEL}
    if full:
        props["projection_contraction"] = all(r["contraction"] for r in rows)
        props["degenerate_branch"] = all(r["status"] != "flagged" for r in rows)
        cs = [r["implied_constant"] for r in rows if r["status"] == "ok"]
        props["implied_constant_finite"] = all(np.isfinite(c) for c in cs)
        if cs:
            summary["max_implied_constant"] = float(np.max(cs))
            summary["median_implied_constant"] = float(np.median(cs))
        thr = _threshold(cfg)
        summary["calibration_threshold"] = thr
        if thr is not None and cs:
            props["implied_constant_calibrated"] = bool(max(cs) <= CALIBRATION_HEADROOM * thr)
    else:
        props["sliced_below_moment_bound"] = all(r["chain_holds"] for r in rows)
    summary["properties"] = props
    return _assemble(cfg, rows, summary, timing)


# -----------------------------------------------------------------------------
# Audits
# -----------------------------------------------------------------------------
def _row(suite: str, name: str, instance: dict, metrics: dict, passed: bool) -> dict:
    return {"suite": suite, "name": name, "instance": instance, "metrics": metrics, "passed": bool(passed)}


def kernel_audit(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for p, d in product(range(1, 7), range(1, 6)):
        k = build_kernel(p, d)
        moments = [abs(float(np.sum(k.weights * k.radii**j))) for j in range(1, p)]
        m = {
            "mass_error": abs(float(k.weights.sum()) - 1.0),
            "max_moment_residual": max(moments, default=0.0),
            "exact_radial_moments": [kernel_radial_moment(k, j) for j in range(1, p)],
            "sum_abs_weights": float(np.abs(k.weights).sum()),
            "max_abs_weight": float(np.abs(k.weights).max()),
            "tv": k.tv_norm,
            "tv_bound": k.tv_bound,
            "density_sup": k.density_sup,
            "density_bound": k.density_bound,
        }
        ok = (m["mass_error"] <= 1e-10 and m["max_moment_residual"] <= 1e-9
              and all(v == 0.0 for v in m["exact_radial_moments"])
              and m["tv"] <= m["sum_abs_weights"] + 1e-12 <= k.tv_bound + 1e-12
              and m["max_abs_weight"] <= k.weight_bound and k.density_sup <= k.density_bound)
        rows.append(_row("kernel", f"p={p},d={d}", {"p": p, "d": d}, m, ok))
    return rows


SMOOTHING_EPS = (0.5, 0.1, 0.01)
SLOPE_EPS = tuple(np.geomspace(1e-3, 1e-2, 6).tolist())


def _line_pairs(seed: int, count: int, p: int, n: int = 8):
    pairs, seeds = moment_matched_pairs(seed, count, 1, p, n)
    return [project(mu, [1.0]) - project(nu, [1.0]) for mu, nu in pairs], seeds


def smoothing_audit(cfg: ExperimentConfig, count: int = 20) -> list[dict]:
    rows = []
    for p in (1, 2, 3):
        k = build_kernel(p, 1)
        lams, seeds = _line_pairs(cfg.seed, count, p)
        for lam, s in zip(lams, seeds):
            tv = total_variation(lam)
            for eps in SMOOTHING_EPS:
                z = zeta_p_1d(convolve_1d(lam, k, eps) - lam, p)
                b1 = smoothing_bound_kernel_tv(p, eps, tv, k.tv_norm)
                b2 = smoothing_bound_explicit(p, eps, tv)
                rows.append(_row("smoothing", f"p={p},eps={eps:g}", {"p": p, "eps": eps, "pair_seed": s},
                                 {"zeta": z, "kernel_tv_bound": b1, "explicit_bound": b2},
                                 z <= b1 * (1 + 1e-9) and z <= b2 * (1 + 1e-9)))
        for lam, s in list(zip(lams, seeds))[:5]:
            zs = [zeta_p_1d(convolve_1d(lam, k, e) - lam, p) for e in SLOPE_EPS]
            slope = float(np.polyfit(np.log(SLOPE_EPS), np.log(zs), 1)[0])
            rows.append(_row("smoothing_slope", f"p={p}", {"p": p, "pair_seed": s, "eps": list(SLOPE_EPS)},
                             {"slope": slope, "required": p - 0.1}, slope >= p - 0.1))
    return rows


def bump_audit(cfg: ExperimentConfig, samples: int = 200) -> list[dict]:
    rows = []
    for p, d in product(range(1, 4), range(1, 4)):
        b = build_bump(p)
        for m in range(p + 1):
            for gamma in product(range(m + 1), repeat=d):
                if sum(gamma) != m:
                    continue
                r = certify_derivative_bound(b, d, gamma, samples, cfg.seed)
                rows.append(_row("bump_derivative", f"p={p},d={d},gamma={gamma}",
                                 {"p": p, "d": d, "gamma": list(gamma), "seed": cfg.seed, "samples": samples},
                                 {"max_estimate": r.max_estimate, "bound": r.bound, "slack": r.slack},
                                 r.passed))
    direction = sphere_directions(cfg.seed, 1, 3)[0]
    for p in range(1, 7):
        b = build_bump(p)
        for radius, order in product((0.5, 1.0), range(min(p, 3) + 1)):
            s = seam_check(b, radius, order, direction)
            rows.append(_row("bump_seam", f"p={p},r={radius},order={order}",
                             {"p": p, "radius": radius, "order": order, "direction": direction.tolist()},
                             {"inside": s.inside, "outside": s.outside, "scale": s.scale}, s.passed))
        ends = end_derivatives(b)
        rows.append(_row("bump_exact_ends", f"p={p}", {"p": p},
                         {"last_nonzero": [float(ends[-1][0]), float(ends[-1][1])]},
                         all(a == 0 and c == 0 for a, c in ends[:-1]) and ends[-1][0] != 0))
    # a bump one order less smooth must show a jump in the next derivative
    for p in (2, 3):
        s = seam_check(build_bump(p - 1), 0.5, p, direction)
        rows.append(_row("bump_negative_control", f"p={p - 1},order={p}", {"p": p - 1, "order": p},
                         {"inside": s.inside, "outside": s.outside, "scale": s.scale}, not s.passed))
    return rows


def spectral_audit(cfg: ExperimentConfig, count: int = 20) -> list[dict]:
    rows = []
    grid1 = frequency_grid(1)
    for p in (1, 2, 3, 4):
        pairs, seeds = moment_matched_pairs(cfg.seed, count, 1, p, 8)
        for (mu, nu), s in zip(pairs, seeds):
            M = zeta_p_1d(project(mu, [1.0]) - project(nu, [1.0]), p)
            r = check_fourier_bound(mu, nu, p, grid1, M)
            rows.append(_row("fourier_d1", f"p={p}", {"p": p, "pair_seed": s},
                             {"sup_zeta": M, "max_ratio": r.max_ratio}, r.passed))
    grid2 = frequency_grid(2, n_moduli=40, n_directions=12, seed=cfg.seed)
    for p, n in ((1, 6), (2, 6)):
        pairs, seeds = moment_matched_pairs(cfg.seed, 5, 2, p, n)
        for (mu, nu), s in zip(pairs, seeds):
            M = max_sliced(mu, nu, p, cfg.budget, seed=cfg.seed).value
            r = check_fourier_bound(mu, nu, p, grid2, M, slack=0.02)
            rows.append(_row("fourier_d2", f"p={p}", {"p": p, "pair_seed": s, "slack": 0.02},
                             {"sup_zeta_search": M, "max_ratio": r.max_ratio}, r.passed))
    t = np.linspace(-20.0, 20.0, 81)
    for p in range(1, 7):
        k = build_kernel(p, 1)
        errs = [float(np.max(np.abs(kernel_char_fn_1d(k, e * t) - 1.0))) for e in (1e-1, 1e-2, 1e-3)]
        rows.append(_row("kernel_transform_limit", f"p={p}", {"p": p, "eps": [1e-1, 1e-2, 1e-3]},
                         {"max_deviation": errs},
                         errs[0] >= errs[1] >= errs[2] and errs[2] < 1e-3))
    return rows


def moment_bound_audit(cfg: ExperimentConfig, count: int = 100) -> list[dict]:
    rows = []
    for p in (1, 2, 3, 4):
        lams, seeds = _line_pairs(cfg.seed, count, p, n=8 if p < 4 else 12)
        for lam, s in zip(lams, seeds):
            z = zeta_p_1d(lam, p)
            ub = bounds.zeta_moment_bound(abs_moment(lam, p), p, 1)
            rows.append(_row("moment_bound", f"p={p}", {"p": p, "pair_seed": s},
                             {"zeta": z, "bound": ub}, z <= ub * (1 + 1e-12)))
    return rows


AUDITS = {
    "kernel_audit": kernel_audit,
    "smoothing_audit": smoothing_audit,
    "bump_audit": bump_audit,
    "spectral_audit": spectral_audit,
    "moment_bound_audit": moment_bound_audit,
}


def run_audit(cfg: ExperimentConfig) -> dict:
    names = list(AUDITS) if cfg.kind == "lemma_suite" else [cfg.kind]
    rows, timing = [], {}
    for name in names:
        t0 = perf_counter()
        rows.extend(AUDITS[name](cfg))
        timing[name] = perf_counter() - t0
    props: dict[str, bool] = {}
    for r in rows:
        props[r["suite"]] = props.get(r["suite"], True) and r["passed"]
    return _assemble(cfg, rows, {"properties": props}, timing)


# -----------------------------------------------------------------------------
# Reports
# -----------------------------------------------------------------------------
def _assemble(cfg: ExperimentConfig, rows: list[dict], summary: dict, timing: dict) -> dict:
    summary["passed"] = all(summary["properties"].values())
    summary["environment"] = environment()
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "rows": rows,
        "summary": summary,
        "timing": timing,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def run(cfg: ExperimentConfig) -> dict:
    if cfg.kind in ("thm11", "thm12"):
        return run_projection_campaign(cfg)
    return run_audit(cfg)


def failed_rows(report: dict) -> list[dict]:
    out = []
    for r in report["rows"]:
        if r.get("passed") is False or r.get("status") == "flagged" or r.get("contraction") is False:
            out.append(r)
    return out


def rows_to_csv(report: dict) -> str:
    """One flat line per row; nested values are JSON-encoded."""
    rows = report["rows"]
    cols: list[str] = []
    for r in rows:
        for key in r:
            if key not in cols and key != "replay":
                cols.append(key)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([json.dumps(r[c], sort_keys=True) if isinstance(r.get(c), (dict, list)) else
                    ("" if r.get(c) is None else repr(r[c]) if isinstance(r.get(c), float) else r[c])
                    for c in cols])
    return buf.getvalue()


def write_outputs(report: dict, out) -> dict[str, Path]:
    """Write ``<out>.json``, ``<out>.csv`` and one replay file per failed row."""
    base = Path(out)
    if base.suffix == ".json":
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    paths = {"json": base.with_suffix(".json"), "csv": base.with_suffix(".csv")}
    paths["json"].write_text(dump_report(report) + "\n", encoding="utf-8")
    paths["csv"].write_text(rows_to_csv(report), encoding="utf-8")
    bad = failed_rows(report)
    if bad:
        replay_dir = base.parent / f"{base.name}_replay"
        replay_dir.mkdir(exist_ok=True)
        for k, r in enumerate(bad):
            payload = {"kind": report["kind"], "config": report["config"], "row": r}
            path = replay_dir / f"{k:04d}.json"
            path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        paths["replay"] = replay_dir
    return paths

