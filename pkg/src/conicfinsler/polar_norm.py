"""Conic Minkowski norms on a plane written in polar form ``F = r*sqrt(2 f(t))``.

A norm is described by its *polar profile* ``f``.  Everything the rest of the
package needs (fundamental tensor, Cartan tensor, indicatrix) is a pointwise
function of the 3-jet ``(f, f', f'', f''')`` at one angle, carried by
:class:`NormJet`.  :class:`NormCurve` bundles a profile defined on an angular
interval around 0 together with positivity and convexity certificates.

Vectors of the Lie algebra are plain ``numpy`` arrays of shape ``(2,)`` holding
the components ``(y1, y2)`` in the basis ``{e1, e2}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConvexityError, DomainError

Profile = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]


@dataclass(frozen=True, slots=True)
class NormJet:
    """3-jet of the polar profile at angle ``t``."""

    t: float
    f: float
    df: float
    d2f: float
    d3f: float = 0.0

    def __post_init__(self):
        vals = (self.t, self.f, self.df, self.d2f, self.d3f)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"non-finite jet entry in {vals}")
        if self.f <= 0:
            raise DomainError(f"profile must be positive, got f={self.f}")

    def scaled(self, k: float) -> "NormJet":
        """Jet of ``k*f`` (same angle)."""
        return NormJet(self.t, k * self.f, k * self.df, k * self.d2f, k * self.d3f)

    def as_tuple(self):
        return (self.f, self.df, self.d2f, self.d3f)


def convexity_margin(jet: NormJet) -> float:
    """``2 f f'' - f'^2 + 4 f^2``; positive exactly where the norm is strongly convex."""
    return 2.0 * jet.f * jet.d2f - jet.df**2 + 4.0 * jet.f**2


def _check_radius(r):
    if not (math.isfinite(r) and r > 0):
        raise DomainError(f"radius must be positive, got {r}")


def polar_gram(jet: NormJet, r: float = 1.0) -> tuple[float, float, float]:
    """Fundamental tensor in the frame ``{d_r, d_t - (r f'/2f) d_r}``.

    Returns ``(g_rr, g_rtau, g_tautau)``; the frame is g-orthogonal so the
    middle entry is identically zero.
    """
    _check_radius(r)
    return 2.0 * jet.f, 0.0, r * r / (2.0 * jet.f) * convexity_margin(jet)


def polar_frame(jet: NormJet, r: float = 1.0) -> np.ndarray:
    """Columns are ``d_r`` and ``tau = d_t - (r f'/2f) d_r`` in the e-basis."""
    c, s = math.cos(jet.t), math.sin(jet.t)
    k = r * jet.df / (2.0 * jet.f)
    return np.array([[c, -r * s - k * c], [s, r * c - k * s]])


def gram_in_basis(jet: NormJet, r: float = 1.0) -> np.ndarray:
    """Matrix of ``g_y`` in the basis ``{e1, e2}`` at ``y = r(cos t, sin t)``."""
    g_rr, _, g_tt = polar_gram(jet, r)
    if g_tt <= 0:
        raise ConvexityError(
            f"convexity margin {convexity_margin(jet):.3e} <= 0 at t={jet.t}"
        )
    P_inv = np.linalg.inv(polar_frame(jet, r))
    G = P_inv.T @ np.diag([g_rr, g_tt]) @ P_inv
    return 0.5 * (G + G.T)


def cartan_scalar(jet: NormJet) -> float:
    """``C_{y(t)}(d_t, d_t, d_t) = f'/f + f'''/(4f)`` on the indicatrix."""
    return jet.df / jet.f + jet.d3f / (4.0 * jet.f)


def indicatrix_point(jet: NormJet) -> np.ndarray:
    """Point of angle ``t`` on the unit sphere ``F = 1``."""
    rho = 1.0 / math.sqrt(2.0 * jet.f)
    return np.array([rho * math.cos(jet.t), rho * math.sin(jet.t)])


def indicatrix_tangent(jet: NormJet) -> np.ndarray:
    """``d/dt y(t)`` of the indicatrix, i.e. ``tau`` at radius ``1/sqrt(2f)``."""
    return polar_frame(jet, 1.0 / math.sqrt(2.0 * jet.f))[:, 1]


def norm_value(jet: NormJet, r: float) -> float:
    return r * math.sqrt(2.0 * jet.f)


def norm_gradient(jet: NormJet) -> np.ndarray:
    """``(dF/dy1, dF/dy2)``; 0-homogeneous so independent of the radius."""
    c, s = math.cos(jet.t), math.sin(jet.t)
    q = math.sqrt(2.0 * jet.f)
    return np.array([c * q - s * jet.df / q, s * q + c * jet.df / q])


def to_polar(y) -> tuple[float, float]:
    """``(r, t)`` of a plane vector, ``t`` in ``(-pi, pi]``."""
    return math.hypot(y[0], y[1]), math.atan2(y[1], y[0])


@dataclass
class NormCurve:
    """Polar profile on a closed angular interval containing 0.

    ``profile`` maps an array of angles to the four arrays
    ``(f, f', f'', f''')``.  On construction the profile is sampled on
    ``n_check`` points and must be positive and strongly convex there.
    """

    domain: tuple[float, float]
    profile: Profile
    kind: str = "custom"
    n_check: int = 41
    report: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = float(self.domain[0]), float(self.domain[1])
        if not lo < hi:
            raise DomainError(f"empty domain {self.domain}")
        self.domain = (lo, hi)
        if self.n_check:
            self.certify(np.linspace(lo, hi, self.n_check))

    def contains(self, t: float) -> bool:
        return self.domain[0] <= t <= self.domain[1]

    def sample(self, ts: Sequence[float]):
        """Vectorised ``(f, f', f'', f''')`` at the given angles."""
        ts = np.asarray(ts, dtype=float)
        lo, hi = self.domain
        if np.any(ts < lo - 1e-12) or np.any(ts > hi + 1e-12):
            raise DomainError(f"angles outside domain [{lo}, {hi}]")
        return tuple(np.asarray(a, dtype=float) for a in self.profile(ts))

    def jet_at(self, t: float) -> NormJet:
        f, df, d2f, d3f = (float(a[0]) for a in self.sample(np.array([t])))
        return NormJet(float(t), f, df, d2f, d3f)

    def margins(self, ts) -> np.ndarray:
        f, df, d2f, _ = self.sample(ts)
        return 2.0 * f * d2f - df**2 + 4.0 * f**2

    def certify(self, ts) -> None:
        f, df, d2f, _ = self.sample(ts)
        if not np.all(np.isfinite(f)) or np.any(f <= 0):
            raise DomainError(f"{self.kind}: profile not positive on {self.domain}")
        if np.any(2.0 * f * d2f - df**2 + 4.0 * f**2 <= 0):
            raise ConvexityError(f"{self.kind}: convexity lost on {self.domain}")

    def jet_from_vector(self, y) -> tuple[NormJet, float]:
        """Jet at the polar angle of ``y`` together with ``|y|``."""
        r, t = to_polar(y)
        if r == 0 or not self.contains(t):
            raise DomainError(f"vector {tuple(y)} outside the conic domain {self.domain}")
        return self.jet_at(t), r

    def norm(self, y) -> float:
        jet, r = self.jet_from_vector(y)
        return norm_value(jet, r)

    def gram(self, y) -> np.ndarray:
        jet, r = self.jet_from_vector(y)
        return gram_in_basis(jet, r)


def constant_curve(f0: float = 0.5, domain=(-3.0, 3.0)) -> NormCurve:
    """Round (Riemannian) profile ``f = f0``."""

    def profile(ts):
        z = np.zeros_like(ts)
        return f0 + z, z, z, z

    return NormCurve(domain, profile, kind="custom", meta={"f0": f0})
