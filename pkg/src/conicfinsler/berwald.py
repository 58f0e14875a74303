"""Berwald profiles: linear-flow indicatrices, the closed-form catalog and residual tests.

A norm annihilated by the linear vector field ``A y`` (i.e.
``(a y1 + b y2) dF/dy1 + (c y1 + d y2) dF/dy2 = 0``) has as indicatrix an
orbit ``theta -> exp(theta A) y0``.  Such norms are Berwald, which is
certified here by fitting the spray vector field with quadratic forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .lie_spray import LieAlgebra2D, spray_eta
from .polar_norm import NormCurve, NormJet, norm_gradient
from .solvers import SeedM

#: |discriminant| below which the exponential switches to the defective formula
DEFECTIVE_TOL = 1e-12
#: minimum angular speed along the orbit, relative to its value at theta = 0
MONOTONE_FLOOR = 1e-3


@dataclass(frozen=True)
class BerwaldMatrix:
    """Matrix ``A = [[a, b], [c, d]]`` of the linear field preserving the norm."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if self.a * self.c == 0:
            raise ValidationError(f"matrix violates a*c != 0: {self.as_tuple()}")
        if self.det <= 0:
            raise ValidationError(f"matrix violates ad - bc > 0: {self.as_tuple()}")

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def normalized(self) -> "BerwaldMatrix":
        """Representative with ``a + d >= 0`` (the residual equation is sign invariant)."""
        if self.a + self.d >= 0:
            return self
        return BerwaldMatrix(-self.a, -self.b, -self.c, -self.d)


def seed_to_matrix(seed: SeedM) -> BerwaldMatrix:
    """Matrix whose Berwald profile shares the 3-jet ``seed`` at ``t = 0`` (with ``c = 1``).

    The seed is first rescaled to ``a0 = 1/2``; the coefficients ``c0, c1, c2`` are
    the Taylor coefficients of ``h = f'/(2f)`` and the slope of the indicatrix is
    matched to second order.
    """
    if not isinstance(seed, SeedM):
        seed = SeedM(*seed)
    k = 1.0 / (2.0 * seed.a0)
    a1, a2, a3 = k * seed.a1, k * seed.a2, k * seed.a3
    c0 = a1
    c1 = a2 - 2 * a1**2
    c2 = a3 / 2 - 3 * a1 * a2 + 4 * a1**3
    q = c1 + c0**2 + 1
    a = -c0
    d = -(c2 + 2 * c1 * c0 + c0**3 + c0) / q
    b = a * d - q
    return BerwaldMatrix(a, b, 1.0, d)


def expm2(A, theta):
    """``exp(theta A)`` for a real 2x2 matrix; ``theta`` may be an array (result ``(..., 2, 2)``).

    Uses ``A = tau I + B`` with ``B^2 = q I`` and switches between the real,
    complex and defective spectral forms on the sign of ``q``.
    """
    A = np.asarray(A, dtype=float)
    theta = np.asarray(theta, dtype=float)
    tau = 0.5 * np.trace(A)
    B = A - tau * np.eye(2)
    q = 0.25 * ((A[0, 0] - A[1, 1]) ** 2 + 4 * A[0, 1] * A[1, 0])
    if abs(q) < DEFECTIVE_TOL:
        ch = np.ones_like(theta)
        sh = theta
    elif q > 0:
        w = math.sqrt(q)
        ch = np.cosh(w * theta)
        sh = np.sinh(w * theta) / w
    else:
        w = math.sqrt(-q)
        ch = np.cos(w * theta)
        sh = np.sin(w * theta) / w
    scale = np.exp(tau * theta)
    out = (scale * ch)[..., None, None] * np.eye(2) + (scale * sh)[..., None, None] * B
    return out


@dataclass
class Indicatrix:
    """Orbit ``theta -> exp(theta A) (1/sqrt(2 a0), 0)`` restricted to an admissible window."""

    matrix: np.ndarray
    a0: float
    theta_span: tuple[float, float]
    report: str = ""

    @property
    def start(self) -> np.ndarray:
        return np.array([1.0 / math.sqrt(2.0 * self.a0), 0.0])

    def __call__(self, theta) -> np.ndarray:
        """Points of the orbit; shape ``(2,)`` or ``(2, n)``."""
        E = expm2(self.matrix, theta)
        return np.moveaxis(E @ self.start, -1, 0)

    def derivatives(self, theta):
        """``y, Ay, A^2 y, A^3 y`` at ``theta`` (each ``(2, n)``)."""
        y = self(np.atleast_1d(theta))
        A = self.matrix
        Ay = A @ y
        A2y = A @ Ay
        return y, Ay, A2y, A @ A2y


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def indicatrix_from_matrix(m, a0: float, theta_span=(-1.0, 1.0), n_scan: int = 4001) -> Indicatrix:
    """Orbit of the start point ``(1/sqrt(2 a0), 0)`` under ``exp(theta A)``.

    The window is shrunk to the largest interval around 0 on which ``y1 > 0``
    and the polar angle is strictly monotone.
    """
    if not isinstance(m, BerwaldMatrix):
        m = BerwaldMatrix(*m)
    if not a0 > 0:
        raise ValidationError(f"a0 must be positive, got {a0}")
    A = m.as_array()
    ind = Indicatrix(A, a0, (float(theta_span[0]), float(theta_span[1])))
    lo, hi = ind.theta_span
    if not lo <= 0 <= hi:
        raise ValidationError(f"theta_span {theta_span} must contain 0")
    thetas = np.linspace(lo, hi, n_scan)
    y = ind(thetas)
    # angular speed relative to its value at the start point; the window stops
    # well before the orbit turns back so the angle stays safely invertible
    rate = _cross(y, A @ y) / _dot(y, y)
    i0 = int(np.argmin(np.abs(thetas)))
    ok = (y[0] > 0) & (rate / rate[i0] > MONOTONE_FLOOR)
    j_lo, j_hi = i0, i0
    while j_lo > 0 and ok[j_lo - 1]:
        j_lo -= 1
    while j_hi < n_scan - 1 and ok[j_hi + 1]:
        j_hi += 1
    if j_lo > 0 or j_hi < n_scan - 1:
        ind.theta_span = (float(thetas[j_lo]), float(thetas[j_hi]))
        ind.report = (
            f"theta window truncated to [{thetas[j_lo]:.6g}, {thetas[j_hi]:.6g}] "
            "(half-plane or monotonicity lost)"
        )
    return ind


def _jets_from_theta(ind: Indicatrix, theta):
    y, Ay, A2y, A3y = ind.derivatives(theta)
    R = _dot(y, y)
    R1 = 2 * _dot(y, Ay)
    R2 = 2 * (_dot(Ay, Ay) + _dot(y, A2y))
    R3 = 2 * (3 * _dot(Ay, A2y) + _dot(y, A3y))
    N0 = _cross(y, Ay)
    N1 = _cross(y, A2y)
    N2 = _cross(Ay, A2y) + _cross(y, A3y)
    T1 = N0 / R
    T2 = (N1 - T1 * R1) / R
    T3 = (N2 - 2 * T2 * R1 - T1 * R2) / R
    f = 0.5 / R
    F1 = -0.5 * R1 / R**2
    F2 = -0.5 * (R2 / R**2 - 2 * R1**2 / R**3)
    F3 = -0.5 * (R3 / R**2 - 6 * R1 * R2 / R**3 + 6 * R1**3 / R**4)
    ft = F1 / T1
    ftt = (F2 - ft * T2) / T1**2
    fttt = (F3 - 3 * ftt * T1 * T2 - ft * T3) / T1**3
    return f, ft, ftt, fttt


def norm_from_indicatrix(ind: Indicatrix, n_table: int = 2001) -> NormCurve:
    """Polar profile ``f(t) = 1/(2 r^2)`` of an orbit indicatrix.

    ``theta(t)`` is obtained by monotone interpolation followed by Newton
    polishing; derivatives in ``t`` come from the chain rule applied to
    ``A, A^2, A^3`` on the orbit, so no differencing is involved.
    """
    lo, hi = ind.theta_span
    thetas = np.linspace(lo, hi, n_table)
    y = ind(thetas)
    ts = np.arctan2(y[1], y[0])
    dts = np.diff(ts)
    if not (np.all(dts > 0) or np.all(dts < 0)):
        raise DomainError("polar angle is not monotone along the indicatrix")
    if dts[0] < 0:
        thetas, ts = thetas[::-1], ts[::-1]
    A = ind.matrix

    def theta_of(t):
        th = np.interp(t, ts, thetas)
        for _ in range(8):
            yy = ind(th)
            err = np.arctan2(yy[1], yy[0]) - t
            speed = _cross(yy, A @ yy) / _dot(yy, yy)
            th = th - err / speed
            if np.max(np.abs(err)) < 1e-15:
                break
        return th

    def profile(t):
        t = np.asarray(t, dtype=float)
        shape = t.shape
        jets = _jets_from_theta(ind, theta_of(t.ravel()))
        return tuple(j.reshape(shape) for j in jets)

    domain = (float(ts[0]), float(ts[-1]))
    return NormCurve(
        domain,
        profile,
        kind="matrix-indicatrix",
        report=ind.report,
        meta={"matrix": A.ravel().tolist(), "a0": ind.a0},
    )


# -- closed-form catalog ------------------------------------------------------------


@dataclass(frozen=True)
class CatalogParams:
    """Closed-form Berwald profile: spiral (1), power (2) or non semisimple (3)."""

    case: int
    lam: float
    mu: float = 0.5

    def __post_init__(self):
        if self.case not in (1, 2, 3):
            raise ValidationError(f"case must be 1, 2 or 3, got {self.case}")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValidationError(f"mu must be positive, got {self.mu}")
        if self.case == 1 and not self.lam >= 0:
            raise ValidationError(f"case 1 requires lambda >= 0, got {self.lam}")
        if self.case == 2 and not self.lam > 2:
            raise ValidationError(f"case 2 requires lambda > 2, got {self.lam}")
        if self.case == 3 and not self.lam > 0:
            raise ValidationError(f"case 3 requires lambda > 0, got {self.lam}")


CATALOG_DOMAINS = {
    1: (-1.5, 1.5),
    2: (0.1, math.pi / 2 - 0.1),
    3: (-1.2, 1.2),
}


def _log_profile(p: CatalogParams, t):
    """``g = log f`` and ``g', g'', g'''`` for the catalog profiles."""
    lam = p.lam
    if p.case == 1:
        g = math.log(p.mu) - 2 * lam * t
        z = np.zeros_like(t)
        return g, -2 * lam + z, z, z
    tn = np.tan(t)
    sec2 = 1 + tn**2
    if p.case == 2:
        ct = 1 / tn
        csc2 = 1 + ct**2
        g = math.log(p.mu) + (2 - lam) * np.log(np.cos(t)) + lam * np.log(np.sin(t))
        g1 = (lam - 2) * tn + lam * ct
        g2 = (lam - 2) * sec2 - lam * csc2
        g3 = 2 * (lam - 2) * sec2 * tn + 2 * lam * csc2 * ct
        return g, g1, g2, g3
    g = math.log(p.mu) + 2 * np.log(np.cos(t)) - 2 * lam * tn
    g1 = -2 * tn - 2 * lam * sec2
    g2 = -2 * sec2 - 4 * lam * sec2 * tn
    g3 = -4 * sec2 * tn - 4 * lam * (2 * sec2 * tn**2 + sec2**2)
    return g, g1, g2, g3


def catalog_norm(p: CatalogParams, domain=None) -> NormCurve:
    """Closed-form Berwald profile with analytic derivatives up to order 3.

    * case 1: ``f = mu exp(-2 lam t)`` (a circle for ``lam = 0``)
    * case 2: ``f = mu cos(t)^(2 - lam) sin(t)^lam``, ``0 < t < pi/2``
    * case 3: ``f = mu cos(t)^2 exp(-2 lam tan t)``, ``|t| < pi/2``
    """
    domain = CATALOG_DOMAINS[p.case] if domain is None else domain

    def profile(t):
        t = np.asarray(t, dtype=float)
        g, g1, g2, g3 = _log_profile(p, t)
        f = np.exp(g)
        return f, f * g1, f * (g2 + g1**2), f * (g3 + 3 * g1 * g2 + g1**3)

    return NormCurve(
        domain, profile, kind=f"catalog-case-{p.case}", meta={"lambda": p.lam, "mu": p.mu}
    )


def catalog_matrix(p: CatalogParams) -> tuple[float, float, float, float]:
    """``(a, b, c, d)`` of a linear field annihilating the catalog norm in its own basis."""
    if p.case == 1:
        return (p.lam, -1.0, 1.0, p.lam)
    if p.case == 2:
        return (p.lam / (p.lam - 2), 0.0, 0.0, 1.0)
    return (p.lam, 0.0, 1.0, p.lam)


# -- residual tests ---------------------------------------------------------------------


def _rays(curve: NormCurve, n_rays: int, inset: float = 0.02):
    lo, hi = curve.domain
    pad = inset * (hi - lo)
    return np.linspace(lo + pad, hi - pad, n_rays)


@dataclass
class QuadraticFit:
    """Least-squares fit ``eta^i(y) = sum_k coeffs[i, k] * basis_k(y)``, basis ``(y1^2, y1 y2, y2^2)``."""

    coeffs: np.ndarray
    residual: float


def fit_eta_quadratic(
    alg: LieAlgebra2D, curve: NormCurve, n_rays: int = 17, radii=(0.5, 1.0, 2.0)
) -> QuadraticFit:
    """Fit the spray vector field on a grid of rays and radii by quadratic forms.

    ``residual`` is the largest pointwise fit error relative to ``max |eta|``.
    """
    ts = _rays(curve, n_rays)
    if len(np.unique(np.round(ts, 12))) < 3 or len(radii) < 1:
        raise ValidationError("need at least three distinct rays to fit a quadratic form")
    rows, vals = [], []
    for t in ts:
        jet = curve.jet_at(t)
        for r in radii:
            y1, y2 = r * math.cos(t), r * math.sin(t)
            rows.append((y1 * y1, y1 * y2, y2 * y2))
            vals.append(spray_eta(alg, jet, r))
    X = np.array(rows)
    V = np.array(vals)
    coeffs, *_ = np.linalg.lstsq(X, V, rcond=None)
    scale = np.max(np.abs(V))
    if scale == 0:
        return QuadraticFit(coeffs.T, 0.0)
    residual = float(np.max(np.abs(X @ coeffs - V)) / scale)
    return QuadraticFit(coeffs.T, residual)


def eta_quadratic_residual(alg: LieAlgebra2D, curve: NormCurve, **kw) -> float:
    """Relative misfit of the spray by quadratic forms; tiny exactly for Berwald norms."""
    return fit_eta_quadratic(alg, curve, **kw).residual


def berwald_pde_residual(m, curve: NormCurve, n_rays: int = 33) -> float:
    """``max |(a y1 + b y2) F_1 + (c y1 + d y2) F_2| / (F |A|)`` over sample rays.

    The division by the Frobenius norm of ``A`` makes the value invariant under
    rescaling of the matrix.
    """
    if isinstance(m, BerwaldMatrix):
        A = m.as_array()
    else:
        A = np.asarray(m, dtype=float).reshape(2, 2)
    nA = np.linalg.norm(A)
    if nA == 0:
        raise ValidationError("zero matrix")
    worst = 0.0
    for t in _rays(curve, n_rays, inset=0.0):
        jet = curve.jet_at(t)
        y = np.array([math.cos(t), math.sin(t)])
        grad = norm_gradient(jet)
        val = abs((A @ y) @ grad) / math.sqrt(2 * jet.f)
        worst = max(worst, val)
    return worst / nA
