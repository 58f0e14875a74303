"""Initial value problems for Landsberg and constant flag curvature profiles.

Both solvers take an initial jet ``(a0, a1, a2, a3) = (f, f', f'', f''')(0)``
and integrate in the angle ``t`` with the bracket normalised to
``[e1, e2] = e2``.  The opposite orientation ``[e1, e2] = -e2`` only reverses
the spray, which changes neither the Landsberg condition nor the flag
curvature; it is routed through the reflection ``t -> -t`` and returns the
same profile.

* Landsberg: the quantity ``C_{y(t)}(u, u, u)`` is conserved, so it is fixed
  from the seed and solved for ``f'''``, leaving a third-order explicit system.
* Constant curvature ``K = c``: with ``u = lambda * eta`` on the indicatrix and
  ``s`` the flow parameter, ``lambda'' = -c lambda`` in ``s``.  The state
  ``(f, f', lambda, dlambda/ds)`` is integrated in ``t``; ``f''`` is recovered
  algebraically from ``lambda``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _ode
from .errors import ConvexityError, SingularityError, ValidationError
from .polar_norm import NormCurve, NormJet, convexity_margin

log = logging.getLogger(__name__)

DEFAULT_SPAN = (-0.15, 0.15)
DEFAULT_TOL = 1e-10
#: curvature is a second derivative of the dense output, so the CFC solver runs tighter
CFC_TOL = 1e-12


@dataclass(frozen=True)
class SeedM:
    """Initial jet ``(f, f', f'', f''')`` at ``t = 0``."""

    a0: float
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        vals = self.as_tuple()
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError(f"non-finite seed {vals}")
        if self.a0 <= 0:
            raise ValidationError(f"seed violates a0 > 0 (a0={self.a0})")
        if self.a1 == 0:
            raise ValidationError("seed violates a1 != 0 (the spray would vanish at e1)")
        if self.margin <= 0:
            raise ValidationError(
                f"seed violates 2*a0*a2 - a1^2 + 4*a0^2 > 0 (value {self.margin:.6g})"
            )

    @property
    def margin(self) -> float:
        return 2 * self.a0 * self.a2 - self.a1**2 + 4 * self.a0**2

    @property
    def relative_margin(self) -> float:
        """Scale-free margin ``margin / (4 a0^2)``."""
        return self.margin / (4 * self.a0**2)

    def as_tuple(self):
        return (self.a0, self.a1, self.a2, self.a3)

    def jet(self) -> NormJet:
        return NormJet(0.0, *self.as_tuple())

    @classmethod
    def parse(cls, text: str) -> "SeedM":
        parts = [p for p in text.replace(" ", "").split(",") if p]
        if len(parts) != 4:
            raise ValidationError(f"seed needs four comma separated numbers, got {text!r}")
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ValidationError(f"seed entries must be numbers, got {text!r}") from None
        return cls(*values)


def landsberg_first_integral(jet: NormJet) -> float:
    """Conserved quantity of Landsberg profiles.

    ``[f'/f + f'''/(4f)] / [margin^{3/2} / (8 f^3)]``, which equals the Cartan
    tensor evaluated on the g-unit tangent of the indicatrix.
    """
    m = convexity_margin(jet)
    if m <= 0:
        raise ConvexityError(f"convexity margin {m:.3e} <= 0 at t={jet.t}")
    return (jet.df / jet.f + jet.d3f / (4.0 * jet.f)) * 8.0 * jet.f**3 / m**1.5


def _guard(margin_fn):
    def guard(t, state):
        f = state[0]
        if f < 1e-8:
            return "profile collapsed"
        m = margin_fn(t, state)
        if not m >= 1e-6 * 4 * f * f:
            return "convexity margin collapsed"
        return ""

    return guard


def _finish(curve_kind, sol, t_span, profile, meta):
    lo, hi = sol.lo, sol.hi
    report = ""
    if not sol.complete:
        report = f"domain truncated to [{lo:.6g}, {hi:.6g}] of {tuple(t_span)}: {sol.message}"
        log.warning(report)
    return NormCurve((lo, hi), profile, kind=curve_kind, report=report, meta=meta)


def _reflect(curve: NormCurve) -> NormCurve:
    lo, hi = curve.domain
    base = curve.profile

    def profile(ts):
        f, df, d2f, d3f = base(-np.asarray(ts))
        return f, -df, d2f, -d3f

    return NormCurve((-hi, -lo), profile, kind=curve.kind, report=curve.report, meta=curve.meta)


def _flipped(seed: SeedM) -> SeedM:
    return SeedM(seed.a0, -seed.a1, seed.a2, -seed.a3)


def solve_landsberg(
    seed: SeedM, t_span=DEFAULT_SPAN, tol: float = DEFAULT_TOL, orientation: int = 1
) -> NormCurve:
    """Landsberg profile with initial jet ``seed``.

    ``orientation=-1`` selects the bracket ``[e1, e2] = -e2``.
    """
    if not isinstance(seed, SeedM):
        seed = SeedM(*seed)
    if orientation == -1:
        lo, hi = t_span
        return _reflect(solve_landsberg(_flipped(seed), (-hi, -lo), tol))
    kappa = landsberg_first_integral(seed.jet())

    def third(f, df, d2f):
        m = 2 * f * d2f - df * df + 4 * f * f
        return kappa * m**1.5 / (2 * f * f) - 4 * df

    def rhs(_, s):
        return np.array([s[1], s[2], third(*s)])

    sol = _ode.integrate(
        rhs,
        [seed.a0, seed.a1, seed.a2],
        t_span,
        tol,
        _guard(lambda _, s: 2 * s[0] * s[2] - s[1] ** 2 + 4 * s[0] ** 2),
    )

    def profile(ts):
        f, df, d2f = sol(ts)
        return f, df, d2f, third(f, df, d2f)

    meta = {"seed": seed.as_tuple(), "kappa": kappa, "tol": tol}
    return _finish("solved-landsberg", sol, t_span, profile, meta)


def _spray_factor(t, f, df):
    # -2 f sin t - f' cos t; proportional to eta on the indicatrix
    return -2 * f * np.sin(t) - df * np.cos(t)


def cfc_lambda(jet: NormJet) -> float:
    """Coefficient ``lambda`` with ``u(t) = lambda * eta(y(t))`` for ``[e1, e2] = e2``.

    ``lambda = sqrt(2 f * margin) / (-2 f sin t - f' cos t)``; it is the
    reciprocal of ``rho(t) * |dy/dt|_g``.
    """
    D = _spray_factor(jet.t, jet.f, jet.df)
    if abs(D) <= 1e-12 * (jet.f + abs(jet.df)):
        raise SingularityError(f"spray vanishes at t={jet.t}")
    m = convexity_margin(jet)
    if m <= 0:
        raise ConvexityError(f"convexity margin {m:.3e} <= 0 at t={jet.t}")
    return math.sqrt(2 * jet.f * m) / D


def _cfc_dlambda_dt(jet: NormJet) -> float:
    lam = cfc_lambda(jet)
    m = convexity_margin(jet)
    D = _spray_factor(jet.t, jet.f, jet.df)
    dD = -jet.df * math.sin(jet.t) - (2 * jet.f + jet.d2f) * math.cos(jet.t)
    dm = 2 * jet.f * (jet.d3f + 4 * jet.df)
    return lam * (jet.df / (2 * jet.f) + dm / (2 * m) - dD / D)


def solve_cfc(
    seed: SeedM, c: float, t_span=DEFAULT_SPAN, tol: float = CFC_TOL, orientation: int = 1
) -> NormCurve:
    """Profile with constant flag curvature ``c`` and initial jet ``seed``."""
    if not isinstance(seed, SeedM):
        seed = SeedM(*seed)
    if orientation == -1:
        lo, hi = t_span
        return _reflect(solve_cfc(_flipped(seed), c, (-hi, -lo), tol))
    jet0 = seed.jet()
    lam0 = cfc_lambda(jet0)
    D0 = _spray_factor(0.0, seed.a0, seed.a1)
    ds_dt0 = -seed.margin / (math.sqrt(2 * seed.a0) * D0)
    mu0 = _cfc_dlambda_dt(jet0) / ds_dt0

    def unpack(t, state):
        f, df, lam, mu = state
        D = _spray_factor(t, f, df)
        m = lam * lam * D * D / (2 * f)
        d2f = (m + df * df - 4 * f * f) / (2 * f)
        ds_dt = -m / (np.sqrt(2 * f) * D)
        return f, df, d2f, lam, mu, D, m, ds_dt

    def rhs(t, state):
        f, df, d2f, lam, mu, D, m, ds_dt = unpack(t, state)
        if abs(D) <= 1e-10 * (f + abs(df)):
            raise SingularityError(f"spray vanishes at t={t}")
        return np.array([df, d2f, mu * ds_dt, -c * lam * ds_dt])

    def margin_fn(t, state):
        return unpack(t, state)[6]

    sol = _ode.integrate(rhs, [seed.a0, seed.a1, lam0, mu0], t_span, tol, _guard(margin_fn))

    def profile(ts):
        ts = np.asarray(ts, dtype=float)
        f, df, d2f, lam, mu, D, m, ds_dt = unpack(ts, sol(ts))
        dD = -df * np.sin(ts) - (2 * f + d2f) * np.cos(ts)
        dm = 2 * m * (mu * ds_dt / lam - df / (2 * f) + dD / D)
        return f, df, d2f, dm / (2 * f) - 4 * df

    meta = {"seed": seed.as_tuple(), "c": c, "tol": tol, "lambda0": lam0, "mu0": mu0}
    return _finish("solved-cfc", sol, t_span, profile, meta)
