"""Two-dimensional Lie algebras, the spray vector field and the connection operator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError, ValidationError
from .polar_norm import NormCurve, NormJet, convexity_margin

#: relative step of the centred difference used for ``D eta``
FD_STEP = 1e-5


@dataclass(frozen=True, slots=True)
class LieAlgebra2D:
    """``[e1, e2] = eps1 e1 + eps2 e2``."""

    eps1: float = 0.0
    eps2: float = 1.0

    def __post_init__(self):
        if self.eps1 == 0 and self.eps2 == 0:
            raise ValidationError("abelian algebra: (eps1, eps2) must not both vanish")

    def bracket(self, u, v) -> np.ndarray:
        w = u[0] * v[1] - u[1] * v[0]
        return np.array([w * self.eps1, w * self.eps2])


CANONICAL = LieAlgebra2D(0.0, 1.0)


def reorient(jet: NormJet) -> NormJet:
    """Jet of the reflected norm ``F(y1, -y2)`` at the mirrored angle ``-t``.

    The reflection is an automorphism of ``[e1, e2] = eps2 e2``, so the spray
    of the reflected norm is the reflected spray.  Together with the sign rule
    ``eta[-bracket] = -eta[bracket]`` (the spray is linear in the bracket) this
    is how the ``[e1, e2] = -e2`` orientation reduces to the canonical one.
    """
    return NormJet(-jet.t, jet.f, -jet.df, jet.d2f, -jet.d3f)


def _spray_scalar(alg: LieAlgebra2D, jet: NormJet, y1: float, y2: float) -> float:
    m = convexity_margin(jet)
    if m <= 0:
        raise SingularityError(f"convexity margin {m:.3e} <= 0 at t={jet.t}")
    e1, e2 = alg.eps1, alg.eps2
    h = jet.df / jet.f
    num = 4.0 * (e1 * y1 + e2 * y2) + 2.0 * (-e1 * y2 + e2 * y1) * h
    return -num * jet.f**2 / m


def spray_eta(alg: LieAlgebra2D, jet: NormJet, r: float = 1.0) -> np.ndarray:
    """Spray vector field at ``y = r(cos t, sin t)`` with ``t = jet.t``."""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    y1, y2 = r * math.cos(jet.t), r * math.sin(jet.t)
    k = jet.df / (2.0 * jet.f)
    scalar = _spray_scalar(alg, jet, y1, y2)
    return scalar * np.array([-y2 - y1 * k, y1 - y2 * k])


def _indicatrix_factor(alg: LieAlgebra2D, jet: NormJet) -> float:
    c, s = math.cos(jet.t), math.sin(jet.t)
    e1, e2 = alg.eps1, alg.eps2
    return jet.f * (2 * e1 * c + 2 * e2 * s) + jet.df * (-e1 * s + e2 * c)


def eta_on_indicatrix(alg: LieAlgebra2D, jet: NormJet) -> float:
    """Scalar ``rho(t)`` with ``eta(y(t)) = rho(t) * dy/dt`` on the indicatrix."""
    m = convexity_margin(jet)
    if m <= 0:
        raise SingularityError(f"convexity margin {m:.3e} <= 0 at t={jet.t}")
    return -math.sqrt(2.0 * jet.f) * _indicatrix_factor(alg, jet) / m


def s_rate(alg: LieAlgebra2D, jet: NormJet) -> float:
    """``ds/dt = -1/rho(t)`` for the parameter turning the indicatrix into a flow line of ``-eta``."""
    if abs(_indicatrix_factor(alg, jet)) <= 1e-12 * (jet.f + abs(jet.df)):
        raise SingularityError(f"spray vanishes on the indicatrix at t={jet.t}")
    return -1.0 / eta_on_indicatrix(alg, jet)


def eta_at(alg: LieAlgebra2D, curve: NormCurve, y) -> np.ndarray:
    """Spray vector field at an arbitrary vector of the conic domain."""
    jet, r = curve.jet_from_vector(y)
    return spray_eta(alg, jet, r)


def d_eta(alg: LieAlgebra2D, curve: NormCurve, y, v, h: float = FD_STEP) -> np.ndarray:
    """Directional derivative ``D eta(y, v)`` by a centred difference.

    The step along ``v`` is ``h |y| / |v|`` so the probe moves ``h |y|`` in the plane.
    """
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    nv = math.hypot(v[0], v[1])
    if nv == 0:
        return np.zeros(2)
    step = h * math.hypot(y[0], y[1]) / nv
    return (eta_at(alg, curve, y + step * v) - eta_at(alg, curve, y - step * v)) / (2 * step)


def connection_N(alg: LieAlgebra2D, curve: NormCurve, y, v, h: float = FD_STEP) -> np.ndarray:
    """``N(y, v) = D eta(y, v)/2 - [y, v]/2``."""
    return 0.5 * d_eta(alg, curve, y, v, h) - 0.5 * alg.bracket(y, v)
