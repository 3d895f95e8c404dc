"""Shared test configuration.

BLAS thread pools are pinned to one thread before numpy gets imported so
that solver arithmetic is bitwise reproducible between in-process runs and
the spawned benchmark workers (which inherit the environment).
"""

import os

os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import threadpoolctl

_LIMITER = threadpoolctl.threadpool_limits(limits=1)

import numpy as np
import pytest

from natr import make_problem
from natr.solver import DebugTrace, TrustRegionConfig, solve

# small problems (n <= 50) for exhaustive per-iteration invariant checks.
# COSINE and LIARWHD are excluded: their negative-curvature rescue events
# add a rank-one term of norm ~ ||ybar||^2 / (1e-6 ||s||^2) that inflates
# ||B||_F to 1e6..3e7; at that scale measuring the secant residual rounds
# at eps * ||B|| * ||s|| > 1e-10 and det(B)/||B||^n drops below machine
# precision, so Cholesky fails for purely numerical reasons. The rescue
# path is covered by controlled unit tests in test_quasinewton.py.
DEBUG_RUNS = [
    ("SROSENBR", 10),
    ("TRIDIA", 20),
    ("WOODS", 8),
    ("FREUROTH", 10),
    ("DIXMAANA", 12),
    ("ENGVAL1", 12),
    ("POWELLSG", 8),
    ("CRAGGLVY", 8),
]


def run_with_debug(name, dim, policy):
    problem = make_problem(name, dim)
    cfg = TrustRegionConfig(policy=policy)
    debug = DebugTrace()
    result = solve(problem, cfg, collect_trace=True, debug=debug)
    return result, debug, cfg


@pytest.fixture(scope="session")
def natr_debug_runs():
    return {(n, d): run_with_debug(n, d, "natr") for n, d in DEBUG_RUNS}


@pytest.fixture(scope="session")
def iatr_debug_runs():
    return {(n, d): run_with_debug(n, d, "iatr") for n, d in DEBUG_RUNS}
