"""Adaptive trust-region driver with pluggable nonmonotone acceptance.

Per outer iteration the initial radius is estimated from the current
gradient and curvature along a direction reused from the previous step,
then capped at ``delta_bar``. A trial step from the truncated-CG
subproblem is accepted when the ratio ``(C_k - f(x + d)) / pred`` clears
``mu``, where the reference value ``C_k`` depends on the configured
policy. Rejected steps shrink the radius, either by a radius-dependent
factor applied to the rejected step length (``natr``, ``monotone``) or by
a fixed factor applied to the radius (``iatr``, ``niatr1``, ``niatr2``).

Policies
--------
- ``natr``      capped-window maximum reference driven by the counters
                ``M`` (window growth, reset on large relative drops) and
                ``I`` (consecutive non-decreases, capped at ``I_bar``);
                adaptive shrinkage.
- ``iatr``      monotone reference ``f_k``; fixed shrinkage.
- ``niatr1``    reference ``R_k = eta * max-window + (1 - eta) * f_k``;
                fixed shrinkage.
- ``niatr2``    reference ``(1 + phi_k) * R_k`` with a summable positive
                sequence ``phi_k``; fixed shrinkage.
- ``monotone``  monotone reference with adaptive shrinkage (ablation).
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from math import ceil, inf, isfinite, log, sqrt
from time import perf_counter

import numpy as np

from .quasinewton import HessianApprox, init_identity
from .subproblem import NumericalFailureError, solve_subproblem

__all__ = [
    "Policy",
    "TrustRegionConfig",
    "NonmonotoneState",
    "IterationRecord",
    "RunResult",
    "RatioUndefinedError",
    "CONVERGED",
    "MAX_ITERS",
    "MAX_FEVALS",
    "NUMERICAL_FAILURE",
    "compute_qk",
    "compute_sk",
    "shrink_factor",
    "reference_value",
    "update_counters",
    "acceptance_ratio",
    "solve",
    "write_trace",
    "load_trace",
    "DebugTrace",
]

logger = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITERS = "max-iters"
MAX_FEVALS = "max-fevals"
NUMERICAL_FAILURE = "numerical-failure"

DEFAULT_ETA = 0.85
INNER_DELTA_MIN = 1e-16
INNER_CAP_SAFETY = 30


class RatioUndefinedError(ArithmeticError):
    """Predicted reduction too small to form the acceptance ratio."""


class Policy(Enum):
    NATR = "natr"
    IATR_MONOTONE = "iatr"
    MAX_WINDOW = "niatr1"
    RELAXED_MAX = "niatr2"
    MONOTONE = "monotone"


_ADAPTIVE_SHRINK = frozenset({Policy.NATR, Policy.MONOTONE})


@dataclass
class TrustRegionConfig:
    """Scalar parameters of the trust-region iteration."""

    mu: float = 0.01          # acceptance threshold for the ratio test
    tau: float = 0.1          # descent-angle threshold for direction reuse
    gamma: float = 1.7        # lower multiplier on the previous radius
    delta_bar: float = 100.0  # maximum radius
    alpha0: float = 0.15      # shrink factor at delta = delta_bar
    alpha1: float = 0.35      # shrink factor as delta -> 0
    N: int = 10               # max-window length for the f_lk reference
    N_bar: int = 10           # cap on the natr window counter M
    I_bar: int = 3            # cap on consecutive non-decreases
    nu: float = 0.25          # relative-gap threshold resetting M
    c_fixed: float = 0.35     # fixed shrink factor for the baselines
    eps_rel: float = 1e-6     # stop when ||g|| <= eps_rel * ||g0||
    max_iters: int = 10000
    max_fevals: int = 100000
    policy: Policy = Policy.NATR

    def __post_init__(self):
        if isinstance(self.policy, str):
            self.policy = Policy(self.policy)
        if not 0.0 < self.alpha0 < self.alpha1 < 1.0:
            raise ValueError("need 0 < alpha0 < alpha1 < 1")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must be in (0, 1)")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must be in (0, 1)")
        if self.gamma < 1.0:
            raise ValueError("gamma must be >= 1")
        if self.delta_bar <= 0.0:
            raise ValueError("delta_bar must be positive")
        if min(self.N, self.N_bar, self.I_bar) < 0:
            raise ValueError("N, N_bar, I_bar must be >= 0")
        if self.nu <= 0.0:
            raise ValueError("nu must be positive")
        if not 0.0 < self.c_fixed < 1.0:
            raise ValueError("c_fixed must be in (0, 1)")
        if self.eps_rel <= 0.0:
            raise ValueError("eps_rel must be positive")
        if self.max_iters < 1 or self.max_fevals < 1:
            raise ValueError("budgets must be >= 1")


class NonmonotoneState:
    """Bounded objective history plus the counters steering the reference.

    ``M`` grows while recent objective values stay within a relative gap
    ``nu`` of the window maximum and resets otherwise; ``I`` counts
    consecutive non-decreases; ``k`` indexes the summable sequence used by
    the ``niatr2`` reference.
    """

    def __init__(self, f0, N, N_bar, eta=DEFAULT_ETA):
        self.history = deque([float(f0)], maxlen=max(N, N_bar) + 1)
        self.M = 0
        self.I = 0
        self.eta = eta
        self.k = 0


def update_counters(state: NonmonotoneState, f_new, cfg: TrustRegionConfig):
    """Append an accepted objective value and advance ``M``, ``I``, ``k``."""
    f_new = float(f_new)
    f_prev = state.history[-1]
    state.history.append(f_new)
    state.k += 1
    window = list(state.history)[-(min(state.k, cfg.N) + 1):]
    f_lk = max(window)
    state.I = 0 if f_new < f_prev else state.I + 1
    state.M = 0 if f_lk - f_new > cfg.nu * abs(f_new) else state.M + 1
    return state


def reference_value(state: NonmonotoneState, cfg: TrustRegionConfig) -> float:
    """Reference value ``C_k`` for the acceptance ratio under ``cfg.policy``."""
    hist = state.history
    f_k = hist[-1]
    pol = cfg.policy
    if pol in (Policy.MONOTONE, Policy.IATR_MONOTONE):
        return f_k
    if pol is Policy.NATR:
        if state.I > cfg.I_bar:
            return f_k
        n_k = min(state.M, cfg.N_bar)
        return max(list(hist)[-(n_k + 1):])
    f_lk = max(list(hist)[-(min(state.k, cfg.N) + 1):])
    r_k = state.eta * f_lk + (1.0 - state.eta) * f_k
    if pol is Policy.MAX_WINDOW:
        return r_k
    if pol is Policy.RELAXED_MAX:
        phi = 0.5 / (state.k + 1) ** 1.1 if r_k > 0.0 else 0.0
        return (1.0 + phi) * r_k
    raise ValueError(f"unhandled policy {pol}")


def compute_qk(g, d_prev, tau):
    """Direction probing the curvature for the initial-radius estimate.

    Reuses the previous accepted step when it still makes an acute enough
    descent angle with ``-g``; otherwise falls back to ``-g``. A zero or
    absent previous step always falls back.
    """
    g = np.asarray(g, dtype=float)
    if d_prev is None:
        return -g
    d_prev = np.asarray(d_prev, dtype=float)
    dn = float(np.linalg.norm(d_prev))
    if dn == 0.0:
        return -g
    cosine = -float(g @ d_prev) / (float(np.linalg.norm(g)) * dn)
    if cosine <= tau:
        return -g
    return d_prev


def compute_sk(q, g, B, delta_prev, gamma):
    """Radius estimate: model-minimizer length along ``q``, floored by
    ``gamma`` times the previously accepted radius when one exists."""
    q = np.asarray(q, dtype=float)
    g = np.asarray(g, dtype=float)
    Bq = B(q) if callable(B) else B @ q
    qBq = float(q @ Bq)
    if qBq <= 1e-300:
        logger.warning("degenerate curvature along q; falling back to ||g||")
        base = float(np.linalg.norm(g))
    else:
        base = -float(g @ q) / qBq * float(np.linalg.norm(q))
    if delta_prev is None:
        return base
    return max(base, gamma * delta_prev)


def shrink_factor(delta, cfg: TrustRegionConfig) -> float:
    """Radius-dependent shrink factor, linear from ``alpha1`` at zero radius
    down to ``alpha0`` at ``delta_bar``; input clamped into (0, delta_bar]."""
    d = min(max(float(delta), 0.0), cfg.delta_bar)
    return (cfg.alpha0 - cfg.alpha1) * d / cfg.delta_bar + cfg.alpha1


def acceptance_ratio(C, f_trial, pred) -> float:
    """Ratio of achieved decrease from the reference to predicted decrease."""
    if pred <= 1e-300:
        raise RatioUndefinedError(f"predicted reduction {pred} too small")
    return (C - f_trial) / pred


@dataclass(frozen=True)
class IterationRecord:
    k: int
    f: float
    gnorm: float
    delta0: float
    inner_rejections: int
    C: float
    accepted_step_norm: float
    fevals_so_far: int
    gevals_so_far: int


@dataclass(frozen=True)
class RunResult:
    status: str
    iters: int
    fevals: int
    gevals: int
    wall_time: float
    final_f: float
    final_gnorm: float
    trace: list = field(default=None, compare=False)


# -- detailed instrumentation for invariant checks on small runs ------------

@dataclass
class InnerTrial:
    delta: float
    step_norm: float
    pred: float
    ratio: float
    termination: str
    accepted: bool


@dataclass
class DebugIteration:
    k: int
    f: float
    gnorm: float
    b_norm2: float
    delta0: float
    C: float
    trials: list
    update_applied: bool = False
    secant_rel_err: float = np.nan
    curvature: float = np.nan
    s_norm_sq: float = np.nan
    chol_ok: bool = True
    b_fro_after: float = np.nan


class DebugTrace:
    """Per-iteration diagnostics; the spectral norms make this O(n^3) per
    iteration, so only attach it to small runs."""

    def __init__(self):
        self.iterations = []

    def begin_iteration(self, k, f, gnorm, hessian, delta0, C):
        b2 = float(np.linalg.norm(hessian.B, 2))
        self.iterations.append(
            DebugIteration(k, f, gnorm, b2, delta0, C, []))

    def record_trial(self, delta, sub, ratio, accepted):
        self.iterations[-1].trials.append(
            InnerTrial(float(delta), float(np.linalg.norm(sub.d)), sub.pred,
                       ratio, sub.termination, accepted))

    def end_iteration(self, hessian, s, applied):
        it = self.iterations[-1]
        it.update_applied = applied
        it.b_fro_after = hessian.fro_norm()
        if applied and hessian.last_ybar is not None:
            ybar = hessian.last_ybar
            resid = float(np.linalg.norm(hessian.B @ s - ybar))
            it.secant_rel_err = resid / max(1.0, float(np.linalg.norm(ybar)))
            it.curvature = hessian.last_curvature
            it.s_norm_sq = float(s @ s)
            try:
                np.linalg.cholesky(hessian.B)
                it.chol_ok = True
            except np.linalg.LinAlgError:
                it.chol_ok = False


def _inner_cap(cfg: TrustRegionConfig) -> int:
    c_hi = cfg.alpha1 if cfg.policy in _ADAPTIVE_SHRINK else cfg.c_fixed
    return ceil(log(INNER_DELTA_MIN / cfg.delta_bar) / log(c_hi)) + INNER_CAP_SAFETY


def _cg_rel_tol(gnorm: float) -> float:
    # standard inexact-Newton forcing term
    return min(0.1, sqrt(gnorm))


def solve(problem, cfg: TrustRegionConfig = None, hessian: HessianApprox = None,
          collect_trace: bool = False, debug: DebugTrace = None) -> RunResult:
    """Minimize ``problem`` from its start point.

    Stops when ``||g_k|| <= eps_rel * ||g0||`` (status ``converged``), on
    budget exhaustion (``max-iters`` / ``max-fevals``, reporting the best
    point seen), or on non-finite arithmetic (``numerical-failure``).
    Function and gradient evaluations are counted exactly; one gradient is
    evaluated per accepted iteration plus one at the start.
    """
    if cfg is None:
        cfg = TrustRegionConfig()
    n = problem.dim
    if hessian is None:
        hessian = init_identity(n)
    if hessian.n != n:
        raise ValueError("hessian dimension does not match problem")

    t_start = perf_counter()
    counters = {"f": 0, "g": 0}

    def eval_f(z):
        counters["f"] += 1
        return float(problem.eval_f(z))

    def eval_g(z):
        counters["g"] += 1
        return np.asarray(problem.eval_g(z), dtype=float)

    trace = [] if collect_trace else None

    def result(status, f_val, gnorm_val, iters):
        return RunResult(status, iters, counters["f"], counters["g"],
                         perf_counter() - t_start, f_val, gnorm_val, trace)

    x = np.array(problem.x0, dtype=float)
    f = eval_f(x)
    g = eval_g(x)
    gnorm = float(np.linalg.norm(g))
    if not (isfinite(f) and np.all(np.isfinite(g))):
        return result(NUMERICAL_FAILURE, f, gnorm, 0)

    eps = cfg.eps_rel * gnorm
    state = NonmonotoneState(f, cfg.N, cfg.N_bar)
    best_f, best_gnorm = f, gnorm
    d_prev = None
    delta_prev = None
    p_cap = _inner_cap(cfg)
    max_cg = 2 * n
    k = 0

    while gnorm > eps:
        if k >= cfg.max_iters:
            return result(MAX_ITERS, best_f, best_gnorm, k)
        if counters["f"] >= cfg.max_fevals:
            return result(MAX_FEVALS, best_f, best_gnorm, k)

        q = compute_qk(g, d_prev, cfg.tau)
        s_k = compute_sk(q, g, hessian.matvec, delta_prev, cfg.gamma)
        delta0 = min(s_k, cfg.delta_bar)
        C = reference_value(state, cfg)
        if debug is not None:
            debug.begin_iteration(k, f, gnorm, hessian, delta0, C)

        delta = delta0
        p = 0
        sub = None
        f_new = None
        while True:
            try:
                sub = solve_subproblem(g, hessian.matvec, delta,
                                       _cg_rel_tol(gnorm), max_cg)
                f_trial = eval_f(x + sub.d)
                rhat = (acceptance_ratio(C, f_trial, sub.pred)
                        if isfinite(f_trial) else -inf)
            except (NumericalFailureError, RatioUndefinedError):
                return result(NUMERICAL_FAILURE, best_f, best_gnorm, k)
            accepted = rhat >= cfg.mu
            if debug is not None:
                debug.record_trial(delta, sub, rhat, accepted)
            if accepted:
                f_new = f_trial
                break
            if counters["f"] >= cfg.max_fevals:
                return result(MAX_FEVALS, best_f, best_gnorm, k)
            p += 1
            if p > p_cap:
                # the inner loop terminates in finitely many rejections
                # unless arithmetic has degenerated
                return result(NUMERICAL_FAILURE, best_f, best_gnorm, k)
            if cfg.policy in _ADAPTIVE_SHRINK:
                delta = shrink_factor(delta, cfg) * float(np.linalg.norm(sub.d))
            else:
                delta = cfg.c_fixed * delta

        x = x + sub.d
        g_new = eval_g(x)
        k += 1
        if not (isfinite(f_new) and np.all(np.isfinite(g_new))):
            return result(NUMERICAL_FAILURE, best_f, best_gnorm, k)
        applied_before = hessian.updates_applied
        hessian.mbfgs_update(sub.d, g_new - g, x_norm=float(np.linalg.norm(x)))
        if debug is not None:
            debug.end_iteration(hessian, sub.d,
                                hessian.updates_applied > applied_before)
        if collect_trace:
            trace.append(IterationRecord(
                k - 1, f, gnorm, delta0, p, C,
                float(np.linalg.norm(sub.d)), counters["f"], counters["g"]))
        update_counters(state, f_new, cfg)
        d_prev = sub.d
        delta_prev = delta
        f = f_new
        g = g_new
        gnorm = float(np.linalg.norm(g))
        if f < best_f:
            best_f, best_gnorm = f, gnorm

    return result(CONVERGED, f, gnorm, k)


# -- plain-text trace files --------------------------------------------------

TRACE_COLUMNS = ("k", "f", "gnorm", "delta0", "p", "C",
                 "step_norm", "fevals", "gevals")


def write_trace(records, path):
    """Write iteration records as line-delimited space-separated text."""
    with open(path, "w") as fh:
        fh.write("# " + " ".join(TRACE_COLUMNS) + "\n")
        for r in records:
            fh.write(f"{r.k} {r.f!r} {r.gnorm!r} {r.delta0!r} "
                     f"{r.inner_rejections} {r.C!r} "
                     f"{r.accepted_step_norm!r} "
                     f"{r.fevals_so_far} {r.gevals_so_far}\n")


def load_trace(path):
    """Read back a trace file written by ``write_trace``."""
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            records.append(IterationRecord(
                int(parts[0]), float(parts[1]), float(parts[2]),
                float(parts[3]), int(parts[4]), float(parts[5]),
                float(parts[6]), int(parts[7]), int(parts[8])))
    return records
