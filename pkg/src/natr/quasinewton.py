"""Dense safeguarded quasi-Newton Hessian approximation.

The curvature pair ``(s, y)`` is modified before the rank-two BFGS update:
``ybar = y + (max(0, -y's/||s||^2) + 1e-6) * s`` guarantees
``ybar's >= 1e-6 ||s||^2 > 0``, so the updated matrix stays symmetric
positive definite even on nonconvex problems. A Frobenius-norm cap keeps
the approximations uniformly bounded; exceeding it resets the matrix to
the identity.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["HessianApprox", "init_identity", "CURVATURE_FLOOR"]

CURVATURE_FLOOR = 1e-6
STEP_SKIP_RTOL = 1e-14


@dataclass
class HessianApprox:
    """Symmetric positive-definite model Hessian with safeguarded updates."""

    B: np.ndarray
    n: int
    norm_cap: float = 1e8
    updates_applied: int = 0
    updates_skipped: int = 0
    # diagnostics of the most recent applied update
    last_ybar: np.ndarray | None = field(default=None, repr=False)
    last_curvature: float = 0.0

    def matvec(self, v):
        return self.B @ v

    def fro_norm(self) -> float:
        return float(np.linalg.norm(self.B, "fro"))

    def mbfgs_update(self, s, y, x_norm: float = 0.0) -> None:
        """Apply the safeguarded BFGS update for the pair ``(s, y)``.

        Steps with ``||s|| <= 1e-14 * max(1, x_norm)`` signal stagnation and
        are skipped, leaving the matrix unchanged.
        """
        s = np.asarray(s, dtype=float)
        y = np.asarray(y, dtype=float)
        s_sq = float(s @ s)
        if s_sq <= (STEP_SKIP_RTOL * max(1.0, x_norm)) ** 2:
            self.updates_skipped += 1
            return
        ys = float(y @ s)
        r = max(0.0, -ys / s_sq) + CURVATURE_FLOOR
        ybar = y + r * s
        curv = float(ybar @ s)
        floor = CURVATURE_FLOOR * s_sq
        # cancellation in y's + r||s||^2 can land a few ulps under the
        # floor; nudge r until the guard holds exactly as computed
        eps = np.finfo(float).eps
        while curv < floor:
            r += (floor - curv) / s_sq + 4.0 * eps * (abs(ys) / s_sq + r)
            ybar = y + r * s
            curv = float(ybar @ s)
        Bs = self.B @ s
        sBs = float(s @ Bs)
        self.B = self.B - np.outer(Bs, Bs) / sBs + np.outer(ybar, ybar) / curv
        self.B = 0.5 * (self.B + self.B.T)
        if np.linalg.norm(self.B, "fro") > self.norm_cap:
            self.B = np.eye(self.n)
            self.updates_skipped += 1
            self.last_ybar = None
            self.last_curvature = 0.0
            return
        self.updates_applied += 1
        self.last_ybar = ybar
        self.last_curvature = curv


def init_identity(n: int, norm_cap: float = 1e8) -> HessianApprox:
    """Identity-initialized approximation with zeroed counters."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return HessianApprox(B=np.eye(n), n=n, norm_cap=norm_cap)
