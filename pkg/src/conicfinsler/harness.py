"""Batch verification that Landsberg profiles coincide with Berwald ones, plus file export."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import Optional

import numpy as np

from .berwald import (
    BerwaldMatrix,
    berwald_pde_residual,
    eta_quadratic_residual,
    indicatrix_from_matrix,
    norm_from_indicatrix,
    seed_to_matrix,
)
from .errors import FinslerError, ValidationError
from .lie_spray import CANONICAL
from .polar_norm import NormCurve
from .solvers import SeedM, landsberg_first_integral, solve_landsberg

SCHEMA_VERSION = "1.0"
GRID_POINTS = 101


@dataclass
class SeedBox:
    a0: tuple[float, float] = (0.2, 2.0)
    a1_abs: tuple[float, float] = (0.1, 1.5)
    a2: tuple[float, float] = (-1.0, 1.0)
    a3: tuple[float, float] = (-2.0, 2.0)
    #: minimum of the scale-free margin (2 a0 a2 - a1^2 + 4 a0^2) / (4 a0^2)
    margin: float = 0.05


@dataclass
class RunConfig:
    rng_seed: int = 42
    n_cases: int = 100
    t_half_width: float = 0.1
    tol_ode: float = 1e-10
    tol_compare: float = 1e-7
    seed_box: SeedBox = field(default_factory=SeedBox)

    def __post_init__(self):
        if isinstance(self.seed_box, dict):
            self.seed_box = SeedBox(**self.seed_box)
        for name in ("t_half_width", "tol_ode", "tol_compare"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")
        if self.n_cases < 0:
            raise ValidationError("n_cases must be non-negative")
        if not self.seed_box.margin > 0:
            raise ValidationError("seed box margin must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seed_box"] = {k: list(v) if isinstance(v, tuple) else v for k, v in d["seed_box"].items()}
        return d


def sample_seeds(cfg: RunConfig) -> list[SeedM]:
    """``cfg.n_cases`` seeds drawn uniformly from the seed box by rejection."""
    rng = np.random.default_rng(cfg.rng_seed)
    box = cfg.seed_box
    seeds = []
    while len(seeds) < cfg.n_cases:
        a0 = rng.uniform(*box.a0)
        a1 = rng.uniform(*box.a1_abs) * (1 if rng.random() < 0.5 else -1)
        a2 = rng.uniform(*box.a2)
        a3 = rng.uniform(*box.a3)
        margin = (2 * a0 * a2 - a1 * a1 + 4 * a0 * a0) / (4 * a0 * a0)
        if margin >= box.margin:
            seeds.append(SeedM(float(a0), float(a1), float(a2), float(a3)))
    return seeds


@dataclass
class TheoremDReport:
    seed: SeedM
    matrix: Optional[BerwaldMatrix]
    sup_error: float
    grid: tuple[float, float, int]
    status: str  # pass | fail | truncated
    covered: tuple[float, float]
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self, index: Optional[int] = None) -> dict:
        d = {
            "seed": list(self.seed.as_tuple()),
            "matrix": list(self.matrix.as_tuple()) if self.matrix else None,
            "sup_error": _finite(self.sup_error),
            "status": self.status,
            "covered": list(self.covered),
            "diagnostics": {k: _finite(v) if isinstance(v, float) else v for k, v in self.diagnostics.items()},
        }
        if index is not None:
            d = {"index": index, **d}
        return d


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _covered(curve: NormCurve, w: float) -> tuple[float, float]:
    return max(curve.domain[0], -w), min(curve.domain[1], w)


def verify_theorem_d(seed: SeedM, cfg: Optional[RunConfig] = None) -> TheoremDReport:
    """Compare the Landsberg solution from ``seed`` with the matched Berwald profile.

    ``sup_error`` is ``max |f1 - f2| / a0`` over a uniform grid on
    ``[-t_half_width, t_half_width]``.
    """
    cfg = cfg or RunConfig()
    if not isinstance(seed, SeedM):
        seed = SeedM(*seed)
    w = cfg.t_half_width
    grid = np.linspace(-w, w, GRID_POINTS)
    f1 = solve_landsberg(seed, (-1.5 * w, 1.5 * w), cfg.tol_ode)
    m = seed_to_matrix(seed)
    f2 = norm_from_indicatrix(indicatrix_from_matrix(m, seed.a0))

    c1, c2 = _covered(f1, w), _covered(f2, w)
    covered = (max(c1[0], c2[0]), min(c1[1], c2[1]))
    full = covered[0] <= -w and covered[1] >= w
    inside = grid[(grid >= covered[0]) & (grid <= covered[1])]
    diffs = np.abs(f1.sample(inside)[0] - f2.sample(inside)[0]) / seed.a0 if inside.size else np.array([np.inf])
    sup_error = float(np.max(diffs))

    kappas = [landsberg_first_integral(f1.jet_at(t)) for t in inside[:: max(1, inside.size // 20)]]
    jet2 = np.array(f2.jet_at(0.0).as_tuple())
    diagnostics = {
        "landsberg_drift": float(np.ptp(kappas) / max(1.0, abs(kappas[0]))) if kappas else float("nan"),
        "eta_quadratic_residual": eta_quadratic_residual(CANONICAL, f2),
        "berwald_pde_residual": berwald_pde_residual(m, f2),
        "jet_match_error": float(np.max(np.abs(jet2 - np.array(seed.as_tuple()))) / seed.a0),
    }
    if f1.report:
        diagnostics["landsberg_report"] = f1.report
    if not full:
        status = "truncated"
    else:
        status = "pass" if sup_error <= cfg.tol_compare else "fail"
    return TheoremDReport(seed, m, sup_error, (-w, w, GRID_POINTS), status, covered, diagnostics)


def _run_case(args):
    seed, cfg = args
    try:
        return verify_theorem_d(seed, cfg)
    except FinslerError as exc:
        return TheoremDReport(seed, None, float("inf"), (-cfg.t_half_width, cfg.t_half_width, GRID_POINTS),
                              "fail", (0.0, 0.0), {"error": str(exc)})


def batch_verify(cfg: RunConfig, jobs: int = 1) -> dict:
    """Run :func:`verify_theorem_d` on ``cfg.n_cases`` sampled seeds and aggregate.

    Cases are independent; with ``jobs > 1`` they run in worker processes and
    are reassembled in sampling order so the report does not depend on ``jobs``.
    """
    seeds = sample_seeds(cfg)
    work = [(s, cfg) for s in seeds]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_run_case, work))
    else:
        reports = [_run_case(w) for w in work]
    cases = [r.to_dict(i) for i, r in enumerate(reports)]
    errors = [r.sup_error for r in reports if math.isfinite(r.sup_error)]
    summary = {
        "pass": sum(r.status == "pass" for r in reports),
        "fail": sum(r.status == "fail" for r in reports),
        "truncated": sum(r.status == "truncated" for r in reports),
        "max_sup_error": max(errors) if errors else 0.0,
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "cases": cases,
        "summary": summary,
    }


def report_ok(report: dict) -> bool:
    s = report["summary"]
    return s["fail"] == 0 and s["truncated"] == 0


def dumps_report(report: dict) -> str:
    """Canonical JSON text; floats use the shortest round-trip representation."""
    return json.dumps(report, indent=2, sort_keys=False, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("conicfinsler").joinpath("report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_report(report: dict) -> None:
    import jsonschema

    jsonschema.validate(report, load_schema())


# -- CSV ---------------------------------------------------------------------------

CSV_HEADER = ("t", "f", "df", "d2f", "d3f", "margin")


def curve_rows(curve: NormCurve, ts) -> list[tuple[float, ...]]:
    ts = np.asarray(ts, dtype=float)
    f, df, d2f, d3f = curve.sample(ts)
    margin = 2 * f * d2f - df**2 + 4 * f**2
    return [tuple(float(v) for v in row) for row in zip(ts, f, df, d2f, d3f, margin)]


def curve_csv(curve: NormCurve, ts) -> str:
    """CSV text with one row per angle; every emitted margin is positive."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in curve_rows(curve, ts):
        if not row[-1] > 0:
            raise ValidationError(f"non-positive convexity margin at t={row[0]!r}")
        writer.writerow([repr(v) for v in row])
    return buf.getvalue()
