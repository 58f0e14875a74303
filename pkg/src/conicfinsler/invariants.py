"""Programmatic property suite with per-invariant tolerances.

Each check evaluates one identity over a fixed panel of profiles and returns
the worst observed error next to its tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .berwald import CatalogParams, catalog_norm
from .flow_oracles import integrate_minus_eta, transport_along, unit_normal
from .harness import RunConfig, batch_verify, curve_csv, dumps_report
from .lie_spray import CANONICAL, LieAlgebra2D, connection_N, eta_at
from .polar_norm import NormCurve, cartan_scalar, constant_curve, gram_in_basis, polar_gram
from .solvers import SeedM, landsberg_first_integral, solve_cfc, solve_landsberg

ALGEBRAS = (CANONICAL, LieAlgebra2D(1.0, -0.3))


@dataclass
class Check:
    name: str
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.error) and self.error <= self.tol

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}: {self.error:.3e} <= {self.tol:.0e}"


def panel() -> list[NormCurve]:
    """Profiles the invariants are evaluated on."""
    return [
        constant_curve(0.5),
        catalog_norm(CatalogParams(1, 0.7, 0.5)),
        catalog_norm(CatalogParams(2, 3.0, 1.0)),
        catalog_norm(CatalogParams(3, 0.5, 0.5)),
        solve_landsberg(SeedM(0.5, 0.5, 0.0, 0.0)),
        solve_landsberg(SeedM(1.3, -0.7, 0.4, 1.5)),
        solve_cfc(SeedM(0.5, 0.5, 0.0, 0.0), -1.0),
    ]


def _points(curve: NormCurve, n: int, rng) -> list[np.ndarray]:
    lo, hi = curve.domain
    pad = 0.05 * (hi - lo)
    ts = rng.uniform(lo + pad, hi - pad, n)
    rs = rng.uniform(0.5, 2.0, n)
    return [r * np.array([math.cos(t), math.sin(t)]) for t, r in zip(ts, rs)]


def _worst(values) -> float:
    values = list(values)
    return float(max(values)) if values else 0.0


def check_gram(curves, rng) -> list[Check]:
    spd, euler, offdiag, cartan = [], [], [], []
    for curve in curves:
        for y in _points(curve, 8, rng):
            jet, r = curve.jet_from_vector(y)
            G = gram_in_basis(jet, r)
            spd.append(float(min(np.linalg.eigvalsh(0.5 * (G + G.T))) <= 0))
            euler.append(abs(y @ G @ y - 2 * r * r * jet.f) / (2 * r * r * jet.f))
            offdiag.append(abs(polar_gram(jet, r)[1]))
    for t in np.linspace(-1, 1, 11):
        cartan.append(abs(cartan_scalar(constant_curve(0.7).jet_at(t))))
    return [
        Check("gram positive definite (count of failures)", _worst(spd), 0.0),
        Check("Euler identity y.G.y = 2 r^2 f", _worst(euler), 1e-12),
        Check("polar gram off-diagonal", _worst(offdiag), 0.0),
        Check("Cartan scalar vanishes on constant profile", _worst(cartan), 0.0),
    ]


def check_spray(curves, rng) -> list[Check]:
    ortho, ident, homog, nyy = [], [], [], []
    for curve in curves:
        for alg in ALGEBRAS:
            for y in _points(curve, 6, rng):
                G = curve.gram(y)
                eta = eta_at(alg, curve, y)
                gyy = y @ G @ y
                ortho.append(abs(eta @ G @ y) / gyy)
                for u in np.eye(2):
                    ident.append(abs(eta @ G @ u - y @ G @ alg.bracket(u, y)))
                for k in (0.5, 2.0, 10.0):
                    ek = eta_at(alg, curve, k * y)
                    homog.append(np.linalg.norm(ek - k * k * eta) / (k * k * np.linalg.norm(eta)))
                N = connection_N(alg, curve, y, y)
                nyy.append(np.linalg.norm(N - eta) / max(np.linalg.norm(eta), 1e-300))
    return [
        Check("g_y(eta, y) = 0", _worst(ortho), 1e-10),
        Check("g_y(eta, u) = g_y(y, [u, y])", _worst(ident), 1e-9),
        Check("eta 2-homogeneous", _worst(homog), 1e-12),
        Check("N(y, y) = eta(y)", _worst(nyy), 1e-7),
    ]


def check_flows(curves, rng) -> list[Check]:
    speed, gnorm = [], []
    for curve in curves:
        lo, hi = curve.domain
        for t0 in (0.7 * lo + 0.3 * hi, 0.5 * (lo + hi), 0.3 * lo + 0.7 * hi):
            y0 = curve.jet_at(t0)
            y0 = np.array([math.cos(t0), math.sin(t0)]) / math.sqrt(2 * y0.f)
            traj = integrate_minus_eta(CANONICAL, curve, y0, (-1.0, 1.0))
            s_lo, s_hi = traj.s_range
            ss = np.linspace(s_lo, s_hi, 41)
            F0 = curve.norm(y0)
            speed.append(max(abs(curve.norm(traj(s)) - F0) / F0 for s in ss))

            w0 = unit_normal(curve, y0)
            co = transport_along(CANONICAL, curve, y0, w0, (s_lo, s_hi))
            ss = np.linspace(*co.s_range, 41)
            states = co.solution(ss)
            g = [states[2:, i] @ curve.gram(states[:2, i]) @ states[2:, i] for i in range(ss.size)]
            gnorm.append(max(abs(v - 1.0) for v in g))
    return [
        Check("speed preserved along -eta flow", _worst(speed), 1e-8),
        Check("parallel field keeps its g-norm", _worst(gnorm), 1e-7),
    ]


def check_first_integral() -> list[Check]:
    solved, catalog = [], []
    for seed in ((0.5, 0.5, 0.0, 0.0), (0.5, 0.5, 1.0, 0.0), (1.3, -0.7, 0.4, 1.5), (0.3, 0.2, 0.1, 0.5)):
        curve = solve_landsberg(SeedM(*seed))
        ks = [landsberg_first_integral(curve.jet_at(t)) for t in np.linspace(*curve.domain, 31)]
        solved.append(np.ptp(ks) / max(abs(ks[0]), 1e-300))
    for case, lam in ((1, 0.0), (1, 1.3), (2, 2.5), (2, 5.0), (3, 0.4), (3, 2.0)):
        curve = catalog_norm(CatalogParams(case, lam, 0.5))
        lo, hi = curve.domain
        ks = [landsberg_first_integral(curve.jet_at(t)) for t in np.linspace(lo, hi, 31)]
        catalog.append(np.ptp(ks) / max(1.0, abs(ks[0])))
    return [
        Check("first integral conserved on solved Landsberg curves", _worst(solved), 1e-10),
        Check("first integral conserved on Berwald catalog", _worst(catalog), 1e-8),
    ]


def check_determinism() -> list[Check]:
    cfg = RunConfig(n_cases=3, rng_seed=11)
    a, b = dumps_report(batch_verify(cfg)), dumps_report(batch_verify(cfg))
    curve = solve_landsberg(SeedM(0.5, 0.5, 0.0, 0.0))
    ts = np.linspace(-0.1, 0.1, 21)
    c1 = curve_csv(curve, ts)
    c2 = curve_csv(solve_landsberg(SeedM(0.5, 0.5, 0.0, 0.0)), ts)
    return [
        Check("batch report bytes reproducible", float(a != b), 0.0),
        Check("curve CSV bytes reproducible", float(c1 != c2), 0.0),
    ]


def run_invariants(seed: int = 2024) -> list[Check]:
    rng = np.random.default_rng(seed)
    curves = panel()
    return (
        check_gram(curves, rng)
        + check_spray(curves, rng)
        + check_flows(curves, rng)
        + check_first_integral()
        + check_determinism()
    )
