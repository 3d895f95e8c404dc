"""Nonmonotone adaptive trust-region optimization.

A numpy library implementing an adaptive trust-region method with a
radius-dependent shrinkage factor and a capped-window nonmonotone
acceptance rule, three reference trust-region baselines, a native suite of
smooth unconstrained test problems with analytic gradients, and a
Dolan-More performance-profile benchmarking harness.
"""

from .problems import (GradCheckReport, Problem, available_problems,
                       check_gradient, check_gradient_random, default_suite,
                       make_problem)
from .quasinewton import HessianApprox, init_identity
from .solver import (Policy, RunResult, TrustRegionConfig, solve)
from .subproblem import SubproblemResult, predicted_reduction, solve_subproblem
from .bench import (ProfileCurve, RunRecord, export_csv, export_svg,
                    performance_profile, run_suite)

__version__ = "0.1.0"

__all__ = [
    "Problem",
    "GradCheckReport",
    "make_problem",
    "available_problems",
    "default_suite",
    "check_gradient",
    "check_gradient_random",
    "HessianApprox",
    "init_identity",
    "Policy",
    "TrustRegionConfig",
    "RunResult",
    "solve",
    "SubproblemResult",
    "solve_subproblem",
    "predicted_reduction",
    "RunRecord",
    "ProfileCurve",
    "run_suite",
    "performance_profile",
    "export_csv",
    "export_svg",
    "__version__",
]
