"""Native smooth unconstrained test problems.

Each family follows the standard CUTEst / Moré-Garbow-Hillstrom closed-form
definition and start point. Objectives and analytic gradients are plain
vectorized numpy functions of the point, so evaluators are pure, picklable
and safe to call from multiple threads.

The registry maps a family name to its structural dimension rule and the
dimensions used in the reference benchmark tables; ``make_problem`` accepts
any dimension satisfying the structural rule.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Problem",
    "GradCheckReport",
    "UnknownProblemError",
    "UnsupportedDimensionError",
    "EvaluationError",
    "make_problem",
    "available_problems",
    "default_suite",
    "check_gradient",
    "check_gradient_random",
]


class UnknownProblemError(KeyError):
    """Requested name is not in the problem registry."""


class UnsupportedDimensionError(ValueError):
    """Requested dimension violates the family's structural rule."""


class EvaluationError(ArithmeticError):
    """Objective or gradient returned a non-finite value."""


@dataclass(frozen=True)
class Problem:
    """A named differentiable objective with start point and gradient."""

    name: str
    dim: int
    x0: np.ndarray
    eval_f: Callable[[np.ndarray], float]
    eval_g: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.x0.shape != (self.dim,):
            raise ValueError("x0 must have exactly dim entries")
        self.x0.setflags(write=False)


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_err: float
    worst_index: int
    points_tested: int


# ---------------------------------------------------------------------------
# objective / gradient pairs
# ---------------------------------------------------------------------------

def _srosenbr_f(x):
    a, b = x[0::2], x[1::2]
    return float(np.sum(100.0 * (b - a**2) ** 2 + (a - 1.0) ** 2))


def _srosenbr_g(x):
    a, b = x[0::2], x[1::2]
    g = np.empty_like(x)
    g[0::2] = -400.0 * a * (b - a**2) + 2.0 * (a - 1.0)
    g[1::2] = 200.0 * (b - a**2)
    return g


def _arwhead_f(x):
    h, t = x[:-1], x[-1]
    return float(np.sum((h**2 + t**2) ** 2 - 4.0 * h + 3.0))


def _arwhead_g(x):
    h, t = x[:-1], x[-1]
    q = h**2 + t**2
    g = np.empty_like(x)
    g[:-1] = 4.0 * h * q - 4.0
    g[-1] = 4.0 * t * np.sum(q)
    return g


def _woods_f(x):
    a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
    return float(
        np.sum(
            100.0 * (b - a**2) ** 2
            + (1.0 - a) ** 2
            + 90.0 * (d - c**2) ** 2
            + (1.0 - c) ** 2
            + 10.0 * (b + d - 2.0) ** 2
            + 0.1 * (b - d) ** 2
        )
    )


def _woods_g(x):
    a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
    g = np.empty_like(x)
    g[0::4] = -400.0 * a * (b - a**2) - 2.0 * (1.0 - a)
    g[1::4] = 200.0 * (b - a**2) + 20.0 * (b + d - 2.0) + 0.2 * (b - d)
    g[2::4] = -360.0 * c * (d - c**2) - 2.0 * (1.0 - c)
    g[3::4] = 180.0 * (d - c**2) + 20.0 * (b + d - 2.0) - 0.2 * (b - d)
    return g


def _liarwhd_f(x):
    return float(np.sum(4.0 * (x**2 - x[0]) ** 2 + (x - 1.0) ** 2))


def _liarwhd_g(x):
    r = x**2 - x[0]
    g = 16.0 * x * r + 2.0 * (x - 1.0)
    g[0] -= 8.0 * np.sum(r)
    return g


def _dqdrtic_f(x):
    n = x.size
    w = _dqdrtic_weights(n)
    return float(np.sum(w * x**2))


def _dqdrtic_g(x):
    return 2.0 * _dqdrtic_weights(x.size) * x


def _dqdrtic_weights(n):
    w = np.zeros(n)
    w[: n - 2] += 1.0
    w[1 : n - 1] += 100.0
    w[2:] += 100.0
    return w


def _dqrtic_f(x):
    i = np.arange(1.0, x.size + 1.0)
    return float(np.sum((x - i) ** 4))


def _dqrtic_g(x):
    i = np.arange(1.0, x.size + 1.0)
    return 4.0 * (x - i) ** 3


def _tridia_f(x):
    i = np.arange(2.0, x.size + 1.0)
    return float((x[0] - 1.0) ** 2 + np.sum(i * (2.0 * x[1:] - x[:-1]) ** 2))


def _tridia_g(x):
    i = np.arange(2.0, x.size + 1.0)
    r = 2.0 * x[1:] - x[:-1]
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] - 1.0)
    g[1:] += 4.0 * i * r
    g[:-1] -= 2.0 * i * r
    return g


def _dixon3dq_f(x):
    return float(
        (x[0] - 1.0) ** 2
        + np.sum((x[1:-1] - x[2:]) ** 2)
        + (x[-1] - 1.0) ** 2
    )


def _dixon3dq_g(x):
    r = x[1:-1] - x[2:]
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] - 1.0)
    g[1:-1] += 2.0 * r
    g[2:] -= 2.0 * r
    g[-1] += 2.0 * (x[-1] - 1.0)
    return g


def _powellsg_f(x):
    a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
    return float(
        np.sum(
            (a + 10.0 * b) ** 2
            + 5.0 * (c - d) ** 2
            + (b - 2.0 * c) ** 4
            + 10.0 * (a - d) ** 4
        )
    )


def _powellsg_g(x):
    a, b, c, d = x[0::4], x[1::4], x[2::4], x[3::4]
    g = np.empty_like(x)
    g[0::4] = 2.0 * (a + 10.0 * b) + 40.0 * (a - d) ** 3
    g[1::4] = 20.0 * (a + 10.0 * b) + 4.0 * (b - 2.0 * c) ** 3
    g[2::4] = 10.0 * (c - d) - 8.0 * (b - 2.0 * c) ** 3
    g[3::4] = -10.0 * (c - d) - 40.0 * (a - d) ** 3
    return g


def _power_f(x):
    i = np.arange(1.0, x.size + 1.0)
    return float(np.sum(i * x**2) ** 2)


def _power_g(x):
    i = np.arange(1.0, x.size + 1.0)
    return 4.0 * i * x * np.sum(i * x**2)


def _nondia_f(x):
    return float((x[0] - 1.0) ** 2 + np.sum(100.0 * (x[0] - x[:-1] ** 2) ** 2))


def _nondia_g(x):
    r = x[0] - x[:-1] ** 2
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] - 1.0) + 200.0 * np.sum(r)
    g[:-1] -= 400.0 * x[:-1] * r
    return g


def _engval1_f(x):
    h, t = x[:-1], x[1:]
    return float(np.sum((h**2 + t**2) ** 2 - 4.0 * h + 3.0))


def _engval1_g(x):
    h, t = x[:-1], x[1:]
    q = h**2 + t**2
    g = np.zeros_like(x)
    g[:-1] += 4.0 * h * q - 4.0
    g[1:] += 4.0 * t * q
    return g


def _edensch_f(x):
    h, t = x[:-1], x[1:]
    return float(
        16.0
        + np.sum((h - 2.0) ** 4 + (h * t - 2.0 * t) ** 2 + (t + 1.0) ** 2)
    )


def _edensch_g(x):
    h, t = x[:-1], x[1:]
    r = h * t - 2.0 * t
    g = np.zeros_like(x)
    g[:-1] += 4.0 * (h - 2.0) ** 3 + 2.0 * r * t
    g[1:] += 2.0 * r * (h - 2.0) + 2.0 * (t + 1.0)
    return g


def _freuroth_f(x):
    h, t = x[:-1], x[1:]
    r1 = -13.0 + h + ((5.0 - t) * t - 2.0) * t
    r2 = -29.0 + h + ((t + 1.0) * t - 14.0) * t
    return float(np.sum(r1**2 + r2**2))


def _freuroth_g(x):
    h, t = x[:-1], x[1:]
    r1 = -13.0 + h + ((5.0 - t) * t - 2.0) * t
    r2 = -29.0 + h + ((t + 1.0) * t - 14.0) * t
    g = np.zeros_like(x)
    g[:-1] += 2.0 * r1 + 2.0 * r2
    g[1:] += 2.0 * r1 * (10.0 * t - 3.0 * t**2 - 2.0) + 2.0 * r2 * (
        3.0 * t**2 + 2.0 * t - 14.0
    )
    return g


def _bdqrtic_f(x):
    n = x.size
    a = -4.0 * x[: n - 4] + 3.0
    b = (
        x[: n - 4] ** 2
        + 2.0 * x[1 : n - 3] ** 2
        + 3.0 * x[2 : n - 2] ** 2
        + 4.0 * x[3 : n - 1] ** 2
        + 5.0 * x[-1] ** 2
    )
    return float(np.sum(a**2 + b**2))


def _bdqrtic_g(x):
    n = x.size
    a = -4.0 * x[: n - 4] + 3.0
    b = (
        x[: n - 4] ** 2
        + 2.0 * x[1 : n - 3] ** 2
        + 3.0 * x[2 : n - 2] ** 2
        + 4.0 * x[3 : n - 1] ** 2
        + 5.0 * x[-1] ** 2
    )
    g = np.zeros_like(x)
    g[: n - 4] += -8.0 * a + 4.0 * b * x[: n - 4]
    g[1 : n - 3] += 8.0 * b * x[1 : n - 3]
    g[2 : n - 2] += 12.0 * b * x[2 : n - 2]
    g[3 : n - 1] += 16.0 * b * x[3 : n - 1]
    g[-1] += 20.0 * np.sum(b) * x[-1]
    return g


def _cosine_f(x):
    return float(np.sum(np.cos(x[:-1] ** 2 - 0.5 * x[1:])))


def _cosine_g(x):
    s = np.sin(x[:-1] ** 2 - 0.5 * x[1:])
    g = np.zeros_like(x)
    g[:-1] += -2.0 * x[:-1] * s
    g[1:] += 0.5 * s
    return g


def _cragglvy_f(x):
    a, b = x[0:-2:2], x[1:-1:2]
    c, d = x[2::2], x[3::2]
    u = c - d
    tn = np.tan(u) + u
    return float(
        np.sum(
            (np.exp(a) - b) ** 4
            + 100.0 * (b - c) ** 6
            + tn**4
            + a**8
            + (d - 1.0) ** 2
        )
    )


def _cragglvy_g(x):
    a, b = x[0:-2:2], x[1:-1:2]
    c, d = x[2::2], x[3::2]
    ea = np.exp(a)
    u = c - d
    tn = np.tan(u) + u
    dtn = 1.0 / np.cos(u) ** 2 + 1.0
    g = np.zeros_like(x)
    g[0:-2:2] += 4.0 * (ea - b) ** 3 * ea + 8.0 * a**7
    g[1:-1:2] += -4.0 * (ea - b) ** 3 + 600.0 * (b - c) ** 5
    g[2::2] += -600.0 * (b - c) ** 5 + 4.0 * tn**3 * dtn
    g[3::2] += -4.0 * tn**3 * dtn + 2.0 * (d - 1.0)
    return g


def _nonscomp_f(x):
    return float((x[0] - 1.0) ** 2 + np.sum(4.0 * (x[1:] - x[:-1] ** 2) ** 2))


def _nonscomp_g(x):
    r = x[1:] - x[:-1] ** 2
    g = np.zeros_like(x)
    g[0] = 2.0 * (x[0] - 1.0)
    g[1:] += 8.0 * r
    g[:-1] -= 16.0 * x[:-1] * r
    return g


# Dixon-Maany family: n = 3m, four structured groups with power weights
# (i/n)^k; the twelve variants differ only in the coefficient vector
# (alpha, beta, gamma, delta) and the exponents (k1, k2, k3, k4).
_DIXMAAN_PARAMS = {
    "A": (1.0, 0.0, 0.125, 0.125, 0, 0, 0, 0),
    "B": (1.0, 0.0625, 0.0625, 0.0625, 0, 0, 0, 1),
    "C": (1.0, 0.125, 0.125, 0.125, 0, 0, 0, 0),
    "D": (1.0, 0.26, 0.26, 0.26, 0, 0, 0, 0),
    "E": (1.0, 0.0, 0.125, 0.125, 1, 0, 0, 1),
    "F": (1.0, 0.0625, 0.0625, 0.0625, 1, 0, 0, 1),
    "G": (1.0, 0.125, 0.125, 0.125, 1, 0, 0, 1),
    "H": (1.0, 0.26, 0.26, 0.26, 1, 0, 0, 1),
    "I": (1.0, 0.0, 0.125, 0.125, 2, 0, 0, 2),
    "J": (1.0, 0.0625, 0.0625, 0.0625, 2, 0, 0, 2),
    "K": (1.0, 0.125, 0.125, 0.125, 2, 0, 0, 2),
    "L": (1.0, 0.26, 0.26, 0.26, 2, 0, 0, 2),
}


def _dixmaan_f(x, variant):
    alpha, beta, gamma, delta, k1, k2, k3, k4 = _DIXMAAN_PARAMS[variant]
    n = x.size
    m = n // 3
    i = np.arange(1.0, n + 1.0)
    t1 = alpha * np.sum(x**2 * (i / n) ** k1)
    t2 = beta * np.sum(
        x[:-1] ** 2 * (x[1:] + x[1:] ** 2) ** 2 * (i[:-1] / n) ** k2
    )
    t3 = gamma * np.sum(
        x[: 2 * m] ** 2 * x[m : 3 * m] ** 4 * (i[: 2 * m] / n) ** k3
    )
    t4 = delta * np.sum(x[:m] * x[2 * m :] * (i[:m] / n) ** k4)
    return float(1.0 + t1 + t2 + t3 + t4)


def _dixmaan_g(x, variant):
    alpha, beta, gamma, delta, k1, k2, k3, k4 = _DIXMAAN_PARAMS[variant]
    n = x.size
    m = n // 3
    i = np.arange(1.0, n + 1.0)
    g = 2.0 * alpha * x * (i / n) ** k1
    w2 = beta * (i[:-1] / n) ** k2
    q = x[1:] + x[1:] ** 2
    g[:-1] += 2.0 * w2 * x[:-1] * q**2
    g[1:] += 2.0 * w2 * x[:-1] ** 2 * q * (1.0 + 2.0 * x[1:])
    w3 = gamma * (i[: 2 * m] / n) ** k3
    g[: 2 * m] += 2.0 * w3 * x[: 2 * m] * x[m : 3 * m] ** 4
    g[m : 3 * m] += 4.0 * w3 * x[: 2 * m] ** 2 * x[m : 3 * m] ** 3
    w4 = delta * (i[:m] / n) ** k4
    g[:m] += w4 * x[2 * m :]
    g[2 * m :] += w4 * x[:m]
    return g


# ---------------------------------------------------------------------------
# start points
# ---------------------------------------------------------------------------

def _const_start(value):
    def start(n):
        return np.full(n, value)

    return start


def _srosenbr_start(n):
    x0 = np.empty(n)
    x0[0::2] = -1.2
    x0[1::2] = 1.0
    return x0


def _woods_start(n):
    x0 = np.empty(n)
    x0[0::2] = -3.0
    x0[1::2] = -1.0
    return x0


def _powellsg_start(n):
    x0 = np.empty(n)
    x0[0::4] = 3.0
    x0[1::4] = -1.0
    x0[2::4] = 0.0
    x0[3::4] = 1.0
    return x0


def _freuroth_start(n):
    x0 = np.zeros(n)
    x0[0] = 0.5
    x0[1] = -2.0
    return x0


def _cragglvy_start(n):
    x0 = np.full(n, 2.0)
    x0[0] = 1.0
    return x0


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

def _even(n):
    return n >= 2 and n % 2 == 0


def _even4(n):
    return n >= 4 and n % 2 == 0


def _mult4(n):
    return n >= 4 and n % 4 == 0


def _mult3(n):
    return n >= 3 and n % 3 == 0


def _at_least(k):
    def rule(n):
        return n >= k

    return rule


@dataclass(frozen=True)
class _Family:
    name: str
    f: Callable
    g: Callable
    start: Callable[[int], np.ndarray]
    table_dims: tuple
    dim_ok: Callable[[int], bool]
    dim_rule: str
    fg_args: tuple = ()


_REGISTRY: dict = {}


def _register(name, f, g, start, table_dims, dim_ok, dim_rule, fg_args=()):
    _REGISTRY[name] = _Family(
        name, f, g, start, tuple(table_dims), dim_ok, dim_rule, tuple(fg_args)
    )


_register("SROSENBR", _srosenbr_f, _srosenbr_g, _srosenbr_start,
          (100, 500, 1000, 5000), _even, "n must be even")
_register("ARWHEAD", _arwhead_f, _arwhead_g, _const_start(1.0),
          (100, 500, 1000, 5000), _at_least(2), "n must be >= 2")
_register("WOODS", _woods_f, _woods_g, _woods_start,
          (100, 1000, 4000), _mult4, "n must be a multiple of 4")
_register("LIARWHD", _liarwhd_f, _liarwhd_g, _const_start(4.0),
          (100, 500, 1000, 5000), _at_least(2), "n must be >= 2")
_register("DQDRTIC", _dqdrtic_f, _dqdrtic_g, _const_start(3.0),
          (100, 500, 1000, 5000), _at_least(3), "n must be >= 3")
_register("DQRTIC", _dqrtic_f, _dqrtic_g, _const_start(2.0),
          (100, 500, 1000, 5000), _at_least(1), "n must be >= 1")
_register("QUARTC", _dqrtic_f, _dqrtic_g, _const_start(2.0),
          (100, 500, 1000, 5000), _at_least(1), "n must be >= 1")
_register("TRIDIA", _tridia_f, _tridia_g, _const_start(1.0),
          (100, 500, 1000, 5000), _at_least(2), "n must be >= 2")
_register("DIXON3DQ", _dixon3dq_f, _dixon3dq_g, _const_start(-1.0),
          (100, 1000), _at_least(3), "n must be >= 3")
_register("POWELLSG", _powellsg_f, _powellsg_g, _powellsg_start,
          (100, 500, 1000, 5000), _mult4, "n must be a multiple of 4")
_register("POWER", _power_f, _power_g, _const_start(1.0),
          (100, 500, 1000, 5000), _at_least(1), "n must be >= 1")
_register("NONDIA", _nondia_f, _nondia_g, _const_start(-1.0),
          (100, 500, 1000, 5000), _at_least(2), "n must be >= 2")
_register("ENGVAL1", _engval1_f, _engval1_g, _const_start(2.0),
          (100, 1000, 5000), _at_least(2), "n must be >= 2")
_register("EDENSCH", _edensch_f, _edensch_g, _const_start(0.0),
          (2000,), _at_least(2), "n must be >= 2")
_register("FREUROTH", _freuroth_f, _freuroth_g, _freuroth_start,
          (100, 500, 1000, 5000), _at_least(2), "n must be >= 2")
_register("BDQRTIC", _bdqrtic_f, _bdqrtic_g, _const_start(1.0),
          (100, 500, 1000, 5000), _at_least(5), "n must be >= 5")
_register("COSINE", _cosine_f, _cosine_g, _const_start(1.0),
          (100, 1000), _at_least(2), "n must be >= 2")
_register("CRAGGLVY", _cragglvy_f, _cragglvy_g, _cragglvy_start,
          (100, 500, 1000, 5000), _even4, "n must be even and >= 4")
_register("NONSCOMP", _nonscomp_f, _nonscomp_g, _const_start(3.0),
          (100, 500, 1000, 5000), _at_least(2), "n must be >= 2")

for _variant in _DIXMAAN_PARAMS:
    _register("DIXMAAN" + _variant, _dixmaan_f, _dixmaan_g, _const_start(2.0),
              (300, 1500, 3000), _mult3, "n must be a multiple of 3",
              fg_args=(_variant,))


class _BoundEval:
    """Picklable evaluator binding extra family arguments."""

    def __init__(self, func, args):
        self.func = func
        self.args = args

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float), *self.args)


def make_problem(name: str, dim: int) -> Problem:
    """Construct a registered problem at the requested dimension.

    Raises ``UnknownProblemError`` for names not in the registry and
    ``UnsupportedDimensionError`` when ``dim`` violates the family's
    structural rule.
    """
    key = str(name).upper()
    if key not in _REGISTRY:
        raise UnknownProblemError(f"unknown problem {name!r}")
    fam = _REGISTRY[key]
    dim = int(dim)
    if not fam.dim_ok(dim):
        raise UnsupportedDimensionError(f"{key}: {fam.dim_rule} (got {dim})")
    if fam.fg_args:
        f = _BoundEval(fam.f, fam.fg_args)
        g = _BoundEval(fam.g, fam.fg_args)
    else:
        f = _BoundEval(fam.f, ())
        g = _BoundEval(fam.g, ())
    return Problem(name=key, dim=dim, x0=fam.start(dim), eval_f=f, eval_g=g)


def available_problems():
    """Registry contents as ordered (name, table_dims) pairs."""
    return [(name, fam.table_dims) for name, fam in sorted(_REGISTRY.items())]


def default_suite():
    """Each registered family at its smallest tabulated dimension."""
    return [(name, fam.table_dims[0]) for name, fam in sorted(_REGISTRY.items())]


# ---------------------------------------------------------------------------
# gradient verification
# ---------------------------------------------------------------------------

def check_gradient(problem: Problem, x, h: float = 1e-6) -> GradCheckReport:
    """Compare the analytic gradient with central differences at ``x``.

    The relative error in coordinate ``i`` is
    ``|g_i - (f(x + h e_i) - f(x - h e_i)) / (2h)| / max(1, |g_i|)``.
    """
    x = np.asarray(x, dtype=float)
    if h <= 0.0:
        raise ValueError("h must be positive")
    if x.shape != (problem.dim,):
        raise ValueError(
            f"x has {x.size} entries, expected {problem.dim}"
        )
    g = np.asarray(problem.eval_g(x), dtype=float)
    if not np.all(np.isfinite(g)) or not np.isfinite(problem.eval_f(x)):
        raise EvaluationError(f"{problem.name}: non-finite f or g at x")
    fd = np.empty_like(g)
    for i in range(problem.dim):
        xp = x.copy()
        xp[i] += h
        fp = problem.eval_f(xp)
        xp[i] = x[i] - h
        fm = problem.eval_f(xp)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise EvaluationError(f"{problem.name}: non-finite f near x")
        fd[i] = (fp - fm) / (2.0 * h)
    rel = np.abs(g - fd) / np.maximum(1.0, np.abs(g))
    worst = int(np.argmax(rel))
    return GradCheckReport(float(rel[worst]), worst, 1)


def check_gradient_random(problem: Problem, points: int = 10, h: float = 1e-6,
                          seed: int = 0, low: float = -2.0, high: float = 2.0):
    """Run ``check_gradient`` at seeded uniform random points, keep the worst."""
    rng = np.random.default_rng(seed)
    worst = GradCheckReport(-1.0, 0, 0)
    for _ in range(points):
        x = rng.uniform(low, high, size=problem.dim)
        rep = check_gradient(problem, x, h)
        if rep.max_rel_err > worst.max_rel_err:
            worst = rep
    return GradCheckReport(worst.max_rel_err, worst.worst_index, points)
