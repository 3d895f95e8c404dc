"""Independent reference computations used to cross-check the fast paths.

The exact trust-region solver works from the eigendecomposition and a
secular-equation root find (Moré-Sorensen style), including the hard case.
O(n^3) and only for tests.
"""

import numpy as np
from scipy.optimize import brentq


def exact_trust_region_step(B, g, delta):
    """Global minimizer of ``g'd + 0.5 d'Bd`` over ``||d|| <= delta``.

    Returns ``(d, pred)`` with ``pred = -(g'd + 0.5 d'Bd)``.
    """
    B = np.asarray(B, dtype=float)
    g = np.asarray(g, dtype=float)
    lam, Q = np.linalg.eigh(B)
    gh = Q.T @ g
    lam_min = lam[0]

    def assemble(coef):
        d = Q @ coef
        return d, float(-(g @ d + 0.5 * d @ (B @ d)))

    # positive definite with the Newton point inside the ball
    if lam_min > 1e-14:
        coef = -(gh / lam)
        if np.linalg.norm(coef) <= delta:
            return assemble(coef)

    lo = max(0.0, -lam_min)
    bottom = np.abs(lam - lam_min) <= 1e-12 * max(1.0, abs(lam_min))

    # hard case: no gradient weight on the bottom eigenspace and the
    # pseudoinverse step fits; pad with a bottom eigenvector
    if lam_min <= 1e-14 and np.all(
            np.abs(gh[bottom]) <= 1e-13 * max(1.0, np.linalg.norm(gh))):
        coef = np.zeros_like(gh)
        nz = ~bottom
        coef[nz] = -(gh[nz] / (lam[nz] + lo))
        norm_in = np.linalg.norm(coef)
        if norm_in <= delta:
            coef[bottom] = 0.0
            pad = np.sqrt(max(delta**2 - norm_in**2, 0.0))
            unit = np.zeros_like(gh)
            unit[np.argmax(bottom)] = 1.0
            return assemble(coef + pad * unit)

    # boundary solution: root of 1/||d(shift)|| = 1/delta on (lo, hi]
    def phi(shift):
        return 1.0 / np.linalg.norm(gh / (lam + shift)) - 1.0 / delta

    hi = lo + np.linalg.norm(gh) / delta + 1.0
    lo_eps = lo + 1e-13 * max(1.0, lo)
    for _ in range(80):
        if phi(lo_eps) < 0.0:
            break
        lo_eps = lo + (lo_eps - lo) / 10.0
    shift = brentq(phi, lo_eps, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    return assemble(-(gh / (lam + shift)))


def random_subproblem(rng, n, kind, delta_mode="uniform"):
    """Random (B, g, delta) instance; ``kind`` in {'spd', 'indefinite'}."""
    A = rng.normal(size=(n, n))
    if kind == "spd":
        B = A @ A.T / n + 0.1 * np.eye(n)
    else:
        B = 0.5 * (A + A.T)
    g = rng.normal(size=n)
    while np.linalg.norm(g) < 1e-8:
        g = rng.normal(size=n)
    if delta_mode == "newton":
        lam_min = np.linalg.eigvalsh(B)[0]
        shifted = B + max(0.0, -lam_min + 0.1) * np.eye(n)
        ref = np.linalg.norm(np.linalg.solve(shifted, g))
        delta = ref * rng.uniform(0.9, 3.0)
    else:
        delta = rng.uniform(0.1, 3.0)
    return B, g, delta


def spectral_norm(B):
    return float(np.max(np.abs(np.linalg.eigvalsh(B))))
