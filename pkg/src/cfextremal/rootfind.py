"""Polynomial root finding by simultaneous (Aberth-Ehrlich) iteration.

Coefficients are in ascending order: coeffs[j] multiplies w**j.  The
iteration is fully deterministic: initial guesses sit on a circle of
radius (|a_0/a_n|)**(1/n), at fixed angles with a fixed offset so that
symmetric configurations cannot stall.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

# Relative threshold below which a coefficient counts as zero when trimming.
COEFF_TRIM_TOL = 1e-14


class RootConvergenceError(RuntimeError):
    """The simultaneous iteration failed to reach the residual target."""


def _residual_scales(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Evaluation-magnitude scale Sum_j |a_j| |w|**j at each root."""
    return npoly.polyval(np.abs(roots), np.abs(coeffs))


def poly_roots(coeffs, tol: float = 1e-10, max_iter: int = 500) -> np.ndarray:
    """All complex roots (with multiplicity) of sum_j coeffs[j] w**j.

    Each returned root w satisfies |p(w)| <= tol * sum_j |a_j||w|**j.
    Raises RootConvergenceError if the iteration cannot certify that.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale == 0.0:
        raise ValueError("zero polynomial has no well-defined root set")
    # Trim numerically-zero leading coefficients, then strip exact roots at 0.
    deg = c.size - 1
    while deg > 0 and abs(c[deg]) <= COEFF_TRIM_TOL * scale:
        deg -= 1
    c = c[: deg + 1]
    if deg == 0:
        return np.empty(0, dtype=complex)
    nzero = 0
    while nzero < deg and abs(c[nzero]) <= COEFF_TRIM_TOL * scale:
        nzero += 1
    c = c[nzero:]
    n = c.size - 1
    zero_roots = np.zeros(nzero, dtype=complex)
    if n == 0:
        return zero_roots
    if n == 1:
        roots = np.array([-c[0] / c[1]])
        return np.concatenate([zero_roots, roots])

    r0 = float(abs(c[0] / c[-1]) ** (1.0 / n))
    if not np.isfinite(r0) or r0 == 0.0:
        r0 = 1.0
    k = np.arange(n)
    z = r0 * np.exp(2j * np.pi * (k + 0.35) / n + 0.7j)

    dc = c[1:] * np.arange(1, n + 1)
    for _ in range(max_iter):
        p = npoly.polyval(z, c)
        dp = npoly.polyval(z, dc)
        w = p / np.where(np.abs(dp) < 1e-300, 1e-300, dp)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        step = w / denom
        z = z - step
        if np.max(np.abs(step)) <= 1e-14 * (1.0 + np.max(np.abs(z))):
            break

    res = np.abs(npoly.polyval(z, c))
    bad = res > tol * np.maximum(_residual_scales(c, z), 1e-300)
    if np.any(bad):
        raise RootConvergenceError(
            f"{int(bad.sum())} of {n} roots above residual target "
            f"(worst {res[bad].max():.3e})"
        )
    return np.concatenate([zero_roots, z])
