"""Numerical oracles built from flows in the Lie algebra.

Geodesics through the identity correspond to integral curves of ``-eta``,
linearly parallel fields solve ``w' + N(y, w) + [y, w] = 0`` along them, and
the Riemann operator is recovered from two Lie derivatives along ``eta`` of
parallel data.  These routines deliberately avoid the closed-form ODEs used
by the solvers so they can serve as independent checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _ode
from .errors import DomainError, SingularityError
from .lie_spray import LieAlgebra2D, connection_N, d_eta, eta_at, eta_on_indicatrix
from .solvers import landsberg_first_integral
from .polar_norm import (
    NormCurve,
    NormJet,
    convexity_margin,
    gram_in_basis,
    indicatrix_point,
    indicatrix_tangent,
)

DEFAULT_TOL = 1e-10
LIE_STEP = 1e-4
#: angular step for the 5-point stencils along a NormCurve
CURVE_STEP = 2.5e-3


def _domain_guard(curve: NormCurve):
    def guard(_, state):
        y = state[:2]
        r = math.hypot(y[0], y[1])
        t = math.atan2(y[1], y[0])
        if r == 0 or not curve.contains(t):
            return "left angular domain"
        jet = curve.jet_at(t)
        if jet.f < 1e-8 or convexity_margin(jet) < 1e-6 * 4 * jet.f**2:
            return "convexity margin collapsed"
        return ""

    return guard


@dataclass
class Trajectory:
    """Integral curve ``s -> y(s)`` of ``-eta`` (optionally with a transported field)."""

    y0: np.ndarray
    solution: _ode.DenseSolution
    status: str
    message: str = ""

    @property
    def s_range(self) -> tuple[float, float]:
        return self.solution.lo, self.solution.hi

    def __call__(self, s):
        return self.solution(s)[:2]

    def transported(self, s):
        """Parallel field at ``s`` when the trajectory was co-integrated with one."""
        return self.solution(s)[2:4]

    @property
    def samples(self):
        sol = self.solution._sol
        ts = [0.0] if sol is None else list(sol.ts)
        return [(s, self(s)) for s in ts]


def integrate_minus_eta(
    alg: LieAlgebra2D, curve: NormCurve, y0, s_span=(0.0, 1.0), tol: float = DEFAULT_TOL
) -> Trajectory:
    """Geodesic flow ``y'(s) = -eta(y(s))`` in the Lie algebra."""
    y0 = np.asarray(y0, dtype=float)
    eta0 = eta_at(alg, curve, y0)
    if np.hypot(*eta0) <= 1e-14 * float(y0 @ y0):
        sol = _ode.DenseSolution(s_span[0], s_span[1], "ok", "", None, y0)
        return Trajectory(y0, sol, "stationary", "eta vanishes at y0")

    def rhs(_, y):
        return -eta_at(alg, curve, y)

    sol = _ode.integrate(rhs, y0, s_span, tol, _domain_guard(curve))
    status = {"ok": "ok", "truncated": "boundary", "singular": "singular"}[sol.status]
    return Trajectory(y0, sol, status, sol.message)


def _transport_rhs(alg, curve):
    def rhs(_, state):
        y, w = state[:2], state[2:]
        dy = -eta_at(alg, curve, y)
        dw = -connection_N(alg, curve, y, w) - alg.bracket(y, w)
        return np.concatenate([dy, dw])

    return rhs


def transport_along(
    alg: LieAlgebra2D, curve: NormCurve, y0, w0, s_span=(0.0, 1.0), tol: float = DEFAULT_TOL
) -> Trajectory:
    """Co-integrate the geodesic from ``y0`` and the parallel field from ``w0``."""
    state0 = np.concatenate([np.asarray(y0, float), np.asarray(w0, float)])
    sol = _ode.integrate(_transport_rhs(alg, curve), state0, s_span, tol, _domain_guard(curve))
    status = {"ok": "ok", "truncated": "boundary", "singular": "singular"}[sol.status]
    return Trajectory(state0[:2], sol, status, sol.message)


def parallel_transport(alg: LieAlgebra2D, curve: NormCurve, traj: Trajectory, w0, tol=None):
    """Parallel field along ``traj`` with ``w(0) = w0``, as a map ``s -> w(s)``.

    The geodesic is re-integrated together with the field so both share the
    same step sequence.
    """
    tol = DEFAULT_TOL if tol is None else tol
    co = transport_along(alg, curve, traj.y0, w0, traj.s_range, tol)
    return co.transported


# -- curvature through Lie derivatives ------------------------------------------------


#: the stencils below use s = k*ds for k = -STENCIL_REACH..STENCIL_REACH
STENCIL_REACH = 4


def _stencil_states(alg, curve, y, w, ds):
    """States ``(y, w)`` at ``s = k*ds`` along the geodesic, indexed from ``-STENCIL_REACH``."""
    reach = STENCIL_REACH + 0.5
    co = transport_along(alg, curve, y, w, (-reach * ds, reach * ds), tol=1e-13)
    if co.status != "ok":
        raise DomainError(f"flow left the domain near y={tuple(y)}: {co.message}")
    ks = np.arange(-STENCIL_REACH, STENCIL_REACH + 1) * ds
    states = co.solution(ks)
    return states[:2].T, states[2:].T


def _diff5(vals, k, ds):
    """Fourth-order centred first derivative at index ``k`` of equally spaced samples."""
    return (vals[k - 2] - 8 * vals[k - 1] + 8 * vals[k + 1] - vals[k + 2]) / (12 * ds)


def _lie_derivative(alg, curve, ys, vs, ds, k):
    """``L_eta V`` at stencil index ``k`` from samples of ``V`` along the flow line.

    Along an integral curve of ``-eta`` one has ``L_eta V = -V' - D eta(y, V)``.
    """
    return -_diff5(vs, k, ds) - d_eta(alg, curve, ys[k], vs[k])


def riemann_apply(alg: LieAlgebra2D, curve: NormCurve, y, w, ds: float = LIE_STEP) -> np.ndarray:
    """Riemann operator ``R_y w`` via nested Lie derivatives of parallel data."""
    y = np.asarray(y, dtype=float)
    if np.hypot(*eta_at(alg, curve, y)) <= 1e-12 * float(y @ y):
        raise SingularityError("eta vanishes at y; the geodesic flow is stationary")
    ys, ws = _stencil_states(alg, curve, y, w, ds)
    mid = STENCIL_REACH  # index of s = 0
    Ns = [-_lie_derivative(alg, curve, ys, ws, ds, k) for k in range(mid - 2, mid + 3)]
    dN = _diff5(Ns, 2, ds)
    return -dN - d_eta(alg, curve, ys[mid], Ns[2])


def flag_curvature_lie(alg: LieAlgebra2D, curve: NormCurve, y, w, ds: float = LIE_STEP) -> float:
    """Flag curvature of the flag ``span(y, w)`` with pole ``y`` from :func:`riemann_apply`."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    G = curve.gram(y)
    Rw = riemann_apply(alg, curve, y, w, ds)
    area = (y @ G @ y) * (w @ G @ w) - (y @ G @ w) ** 2
    return float(Rw @ G @ w) / area


def unit_normal(curve: NormCurve, y) -> np.ndarray:
    """g_y-unit vector g_y-orthogonal to ``y``, oriented counter-clockwise."""
    y = np.asarray(y, dtype=float)
    G = curve.gram(y)
    Gy = G @ y
    v = np.array([-Gy[1], Gy[0]])
    v /= math.sqrt(v @ G @ v)
    if y[0] * v[1] - y[1] * v[0] < 0:
        v = -v
    return v


# -- curvature and Landsberg scalar through the indicatrix ----------------------------


def _stencil_d1(fn, t, h):
    return (fn(t - 2 * h) - 8 * fn(t - h) + 8 * fn(t + h) - fn(t + 2 * h)) / (12 * h)


def _stencil_d2(fn, t, h):
    return (-fn(t - 2 * h) + 16 * fn(t - h) - 30 * fn(t) + 16 * fn(t + h) - fn(t + 2 * h)) / (
        12 * h * h
    )


def _richardson(d, h):
    """Combine 4th-order stencil values at ``h`` and ``h/2`` into a 6th-order estimate."""
    return (16 * d(h / 2) - d(h)) / 15


def unit_coefficient(alg: LieAlgebra2D, jet: NormJet) -> float:
    """``lambda`` with ``u(t) = lambda * eta(y(t))`` for the unit field ``u`` along the indicatrix."""
    rho = eta_on_indicatrix(alg, jet)
    if rho == 0:
        raise SingularityError(f"eta vanishes at t={jet.t}")
    y = indicatrix_point(jet)
    T = indicatrix_tangent(jet)
    G = gram_in_basis(jet, math.hypot(*y))
    return 1.0 / (rho * math.sqrt(T @ G @ T))


def _stencil_t(curve, jet, h):
    t = jet.t
    if not (curve.contains(t - 2 * h) and curve.contains(t + 2 * h)):
        raise DomainError(f"stencil around t={t} leaves {curve.domain}")
    return t


def flag_curvature(
    alg: LieAlgebra2D, curve: NormCurve, jet: NormJet, h: float = CURVE_STEP
) -> float:
    """``K = -lambda''(s) / lambda(s)`` at the angle of ``jet``.

    ``s``-derivatives are taken through ``dt/ds = -rho(t)``; the
    ``t``-derivatives of ``lambda`` and ``rho`` use 5-point stencils on the curve
    at steps ``h`` and ``h/2`` with one Richardson step.
    """
    t = _stencil_t(curve, jet, h)

    def lam(x):
        return unit_coefficient(alg, curve.jet_at(x))

    def dt_ds(x):
        return -eta_on_indicatrix(alg, curve.jet_at(x))

    P = dt_ds(t)
    d1 = _richardson(lambda k: _stencil_d1(lam, t, k), h)
    d2 = _richardson(lambda k: _stencil_d2(lam, t, k), h)
    dP = _richardson(lambda k: _stencil_d1(dt_ds, t, k), h)
    lam_ss = (d2 * P + d1 * dP) * P
    return -lam_ss / lam(t)


def landsberg_scalar(alg: LieAlgebra2D, curve: NormCurve, jet: NormJet, h: float = CURVE_STEP) -> float:
    """``d/dt C_{y(t)}(u, u, u)``; vanishes identically exactly for Landsberg profiles.

    ``alg`` is accepted for signature symmetry with the transport route; the
    value itself does not depend on the bracket.
    """
    t = _stencil_t(curve, jet, h)
    return _richardson(lambda k: _stencil_d1(lambda x: landsberg_first_integral(curve.jet_at(x)), t, k), h)


# -- Cartan tensor straight from F^2 ----------------------------------------------------


def _series_mul(a, b, n=4):
    out = np.zeros(n)
    for i in range(n):
        out[i] = sum(a[j] * b[i - j] for j in range(i + 1))
    return out


def cartan_direct(curve: NormCurve, y, w) -> float:
    """``C_y(w, w, w) = (1/4) d^3/de^3 F^2(y + e w)`` by truncated Taylor arithmetic.

    Uses only the polar profile jet at the angle of ``y``; no closed-form
    Cartan formula is involved.
    """
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    jet, _ = curve.jet_from_vector(y)
    A, B, C = y @ y, 2 * (y @ w), w @ w
    R2 = np.array([A, B, C, 0.0])
    # 1/R2 up to e^2
    inv = np.zeros(4)
    inv[0] = 1 / A
    inv[1] = -B / A**2
    inv[2] = (B * B - A * C) / A**3
    k = y[0] * w[1] - y[1] * w[0]
    # theta' = k / R2  ->  theta - theta0 = k (inv0 e + inv1 e^2/2 + inv2 e^3/3)
    d = np.array([0.0, k * inv[0], k * inv[1] / 2, k * inv[2] / 3])
    d2 = _series_mul(d, d)
    d3 = _series_mul(d2, d)
    fser = np.array([jet.f, 0, 0, 0]) + jet.df * d + jet.d2f * d2 / 2 + jet.d3f * d3 / 6
    F2 = 2 * _series_mul(R2, fser)
    return 0.25 * 6.0 * F2[3]


def landsberg_via_transport(
    alg: LieAlgebra2D, curve: NormCurve, jet: NormJet, ds: float = 5e-4
) -> float:
    """``d/dt C(U, U, U)`` measured along a geodesic with a parallel unit normal ``U``.

    The geodesic starts at the indicatrix point of ``jet``; ``dC/ds`` comes from
    5-point stencils of :func:`cartan_direct` at steps ``ds`` and ``ds/2``
    combined by one Richardson step, and is converted to a ``t``-derivative
    with the angular speed of the geodesic.
    """
    y0 = indicatrix_point(jet)
    u0 = unit_normal(curve, y0)
    co = transport_along(alg, curve, y0, u0, (-2.5 * ds, 2.5 * ds), tol=1e-13)
    if co.status != "ok":
        raise DomainError(f"transport left the domain: {co.message}")

    def stencil(h):
        states = co.solution(np.arange(-2, 3) * h)
        cs = [cartan_direct(curve, states[:2, i], states[2:, i]) for i in range(5)]
        return _diff5(cs, 2, h)

    dC_ds = (16 * stencil(ds / 2) - stencil(ds)) / 15
    eta0 = eta_at(alg, curve, y0)
    # angular speed of y(s): t' = (y x y') / |y|^2 with y' = -eta
    dt_ds = -(y0[0] * eta0[1] - y0[1] * eta0[0]) / (y0 @ y0)
    if dt_ds == 0:
        raise SingularityError("eta vanishes on the indicatrix")
    return dC_ds / dt_ds
