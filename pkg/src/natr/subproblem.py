"""Steihaug-Toint truncated conjugate gradient for the trust-region step.

Approximately minimizes the quadratic model ``g'd + 0.5 d'Bd`` over the ball
``||d|| <= delta``. Starting from ``d = 0``, plain CG iterations run until
the residual drops below a relative tolerance, the iterate path leaves the
ball, or a direction of nonpositive curvature appears; in the latter two
cases the step is truncated at the ball boundary.

The first iterate is the exact minimizer along ``-g`` (the Cauchy point),
and the model value is nonincreasing across CG iterates, so every returned
step carries at least the Cauchy model decrease.
"""

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

__all__ = [
    "SubproblemResult",
    "NumericalFailureError",
    "solve_subproblem",
    "predicted_reduction",
]


class NumericalFailureError(ArithmeticError):
    """Non-finite arithmetic inside the subproblem solve."""


@dataclass(frozen=True)
class SubproblemResult:
    """Approximate trust-region step and its model decrease."""

    d: np.ndarray
    pred: float
    boundary_hit: bool
    cg_iters: int
    termination: str  # residual-converged | boundary | negative-curvature | max-iters
    # (||d||, pred) after each CG iterate; populated only when tracing
    iterates: tuple = field(default=(), compare=False)


def _as_operator(B):
    if isinstance(B, np.ndarray):
        return lambda v: B @ v
    if callable(B):
        return B
    return lambda v: B @ v


def predicted_reduction(g, B, d) -> float:
    """Model decrease ``m(0) - m(d) = -(g'd + 0.5 d'Bd)``."""
    g = np.asarray(g, dtype=float)
    d = np.asarray(d, dtype=float)
    Bd = _as_operator(B)(d)
    return float(-(g @ d + 0.5 * (d @ Bd)))


def _boundary_root(d, p, delta):
    # positive root of ||d + sigma p|| = delta, avoiding cancellation:
    # for b > 0 use sigma = -2c / (b + sqrt(disc)) instead of the textbook
    # (-b + sqrt(disc)) / 2a form.
    a = float(p @ p)
    b = 2.0 * float(d @ p)
    c = float(d @ d) - delta * delta
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        disc = 0.0
    root = sqrt(disc)
    if b >= 0.0:
        return -2.0 * c / (b + root)
    return (-b + root) / (2.0 * a)


def solve_subproblem(g, B, delta, cg_rel_tol=0.1, max_cg=None,
                     trace=False) -> SubproblemResult:
    """Approximately solve ``min g'd + 0.5 d'Bd  s.t. ||d|| <= delta``.

    Parameters
    ----------
    g : array, nonzero gradient.
    B : symmetric operator; dense array or a callable ``v -> Bv``.
    delta : positive trust-region radius.
    cg_rel_tol : stop when ``||Bd + g|| <= cg_rel_tol * ||g||``.
    max_cg : CG iteration cap; defaults to ``2n``.
    trace : record ``(||d||, pred)`` after every CG iterate.
    """
    g = np.asarray(g, dtype=float)
    n = g.size
    gnorm = float(np.linalg.norm(g))
    if gnorm <= 0.0:
        raise ValueError("gradient must be nonzero")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if max_cg is None:
        max_cg = 2 * n
    op = _as_operator(B)

    tol = cg_rel_tol * gnorm
    d = np.zeros(n)
    r = g.copy()
    p = -g
    rr = gnorm * gnorm
    iterates = []

    def finish(step, kind, iters):
        pred = predicted_reduction(g, op, step)
        if not (np.isfinite(pred) and np.all(np.isfinite(step))):
            raise NumericalFailureError("non-finite trust-region step")
        hit = kind in ("boundary", "negative-curvature")
        return SubproblemResult(step, pred, hit, iters,
                                kind, tuple(iterates))

    for k in range(1, max_cg + 1):
        Bp = op(p)
        kappa = float(p @ Bp)
        if not np.isfinite(kappa):
            raise NumericalFailureError("non-finite curvature in CG")
        if kappa <= 0.0:
            sigma = _boundary_root(d, p, delta)
            return finish(d + sigma * p, "negative-curvature", k)
        alpha = rr / kappa
        d_next = d + alpha * p
        if np.linalg.norm(d_next) >= delta:
            sigma = _boundary_root(d, p, delta)
            return finish(d + sigma * p, "boundary", k)
        d = d_next
        r = r + alpha * Bp
        rr_next = float(r @ r)
        if not np.isfinite(rr_next):
            raise NumericalFailureError("non-finite residual in CG")
        if trace:
            iterates.append((float(np.linalg.norm(d)),
                             predicted_reduction(g, op, d)))
        if sqrt(rr_next) <= tol:
            return finish(d, "residual-converged", k)
        p = -r + (rr_next / rr) * p
        rr = rr_next

    return finish(d, "max-iters", max_cg)
