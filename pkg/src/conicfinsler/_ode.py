"""Two-sided adaptive integration with domain guards.

Thin layer over :class:`scipy.integrate.RK45` (Dormand-Prince 5(4) with a
quartic continuous extension).  The stepper is driven one step at a time so a
step that leaves the admissible region can be rejected and reported instead
of silently extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import RK45, OdeSolution

from .errors import FinslerError, SingularityError


@dataclass
class DenseSolution:
    """Dense output on ``[lo, hi]`` built from the accepted steps."""

    lo: float
    hi: float
    status: str  # "ok" | "truncated" | "singular"
    message: str
    _sol: Optional[OdeSolution]
    _y0: np.ndarray
    n_steps: int = 0

    def __call__(self, t):
        if self._sol is None:
            t = np.asarray(t, dtype=float)
            if t.ndim == 0:
                return self._y0.copy()
            return np.repeat(self._y0[:, None], t.size, axis=1)
        return self._sol(t)

    @property
    def complete(self) -> bool:
        return self.status == "ok"


def _one_side(rhs, y0, t_end, tol, guard, max_steps):
    segs = []
    status, message = "ok", ""
    if t_end == 0.0:
        return segs, 0.0, status, message
    solver = RK45(rhs, 0.0, y0, t_end, rtol=tol, atol=tol)
    reached = 0.0
    while solver.status == "running" and len(segs) < max_steps:
        try:
            solver.step()
        except SingularityError as exc:
            status, message = "singular", f"singular after t={reached:.6g}: {exc}"
            break
        except FinslerError as exc:
            status, message = "truncated", f"left domain after t={reached:.6g}: {exc}"
            break
        if solver.status == "failed":
            status, message = "singular", f"step size underflow after t={reached:.6g}"
            break
        if guard is not None:
            reason = guard(solver.t, solver.y)
            if reason:
                status, message = "truncated", f"{reason} after t={reached:.6g}"
                break
        segs.append((solver.t_old, solver.t, solver.dense_output()))
        reached = solver.t
    else:
        if solver.status == "running":
            status, message = "singular", f"step budget exhausted at t={reached:.6g}"
    return segs, reached, status, message


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    span: tuple[float, float],
    tol: float = 1e-10,
    guard: Optional[Callable[[float, np.ndarray], str]] = None,
    max_steps: int = 20000,
) -> DenseSolution:
    """Integrate ``y' = rhs(t, y)`` from ``y(0) = y0`` over ``span`` (which contains 0).

    ``guard(t, y)`` returns a non-empty reason string when the state is no
    longer admissible; the offending step is dropped.
    """
    lo, hi = float(span[0]), float(span[1])
    if not lo <= 0.0 <= hi:
        raise ValueError(f"span {span} must contain 0")
    y0 = np.asarray(y0, dtype=float)
    back, lo_r, st_b, msg_b = _one_side(rhs, y0, lo, tol, guard, max_steps)
    fwd, hi_r, st_f, msg_f = _one_side(rhs, y0, hi, tol, guard, max_steps)

    back = back[::-1]
    ts = [seg[1] for seg in back] + [0.0] + [seg[1] for seg in fwd]
    interps = [seg[2] for seg in back] + [seg[2] for seg in fwd]
    sol = OdeSolution(ts, interps) if interps else None

    status = "ok"
    for st in (st_b, st_f):
        if st != "ok":
            status = st if status == "ok" else status
    message = "; ".join(m for m in (msg_b, msg_f) if m)
    return DenseSolution(lo_r, hi_r, status, message, sol, y0, len(interps))
