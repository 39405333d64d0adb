"""Constructive spectral factorization: find theta with theta * ~theta = psi.

On Z the factor comes from pairing the roots of q(w) = sum_k psi(k) w^(k+N):
roots of a nonnegative trigonometric polynomial come in pairs (rho, 1/conj(rho)),
with even multiplicity on the unit circle; taking one root per pair from the
closed unit disk yields a factor supported in [0, N].  On Z_m the factor is a
spectral square root with a free phase per frequency.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .rootfind import poly_roots, RootConvergenceError
from .sequences import (SeqZ, SeqZm, convolution_square, dft_zm, idft_zm,
                        is_pd_z, is_pd_zm)

# |rho| within this of 1 counts as a unit-circle root (even multiplicity).
UNIT_CIRCLE_TOL = 1e-6


class FactorizationError(RuntimeError):
    """Root pairing or reconstruction failed beyond tolerance."""


@dataclass(frozen=True)
class Factorization:
    theta: object            # SeqZ or SeqZm
    residual: float          # max abs error of theta * ~theta - psi
    method: str              # "roots" | "spectral"

    def to_json(self) -> dict:
        return {"theta": self.theta.to_json(), "residual": self.residual,
                "method": self.method}


def _reconstruction_residual(theta, psi) -> float:
    sq = convolution_square(theta)
    if isinstance(psi, SeqZ):
        keys = set(sq.entries) | set(psi.entries)
        return max((abs(sq[k] - psi[k]) for k in keys), default=0.0)
    return float(np.max(np.abs(sq.values - psi.values)))


def _split_unit_cluster(angles: np.ndarray, widen: float) -> list[list[int]]:
    """Group unit-root indices by angle within `widen` (wrap-around aware)."""
    order = np.argsort(angles)
    clusters: list[list[int]] = []
    for idx in order:
        if clusters and angles[idx] - angles[clusters[-1][-1]] <= widen:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    # merge across the 0/2pi seam
    if len(clusters) > 1 and (2 * np.pi - angles[clusters[-1][-1]]
                              + angles[clusters[0][0]]) <= widen:
        clusters[0] = clusters.pop() + clusters[0]
    return clusters


def fejer_riesz_z(psi: SeqZ, tol: float = 1e-8) -> Factorization:
    """Factor a PD sequence on Z as theta * ~theta with supp theta in [0, N].

    theta is normalized so that theta(0) is real and positive.
    """
    cert = is_pd_z(psi, tol)
    if not cert.is_pd:
        raise FactorizationError(
            f"input not certified positive definite ({cert.reason or 'min '}"
            f"{cert.min_value:.3e})")
    n = psi.band()
    if n == 0:
        theta = SeqZ({0: np.sqrt(psi[0].real)})
        return Factorization(theta, _reconstruction_residual(theta, psi), "roots")

    coeffs = np.array([psi[j - n] for j in range(2 * n + 1)], dtype=complex)
    try:
        roots = poly_roots(coeffs, tol=1e-9)
    except RootConvergenceError as e:
        raise FactorizationError(f"root finding failed: {e}") from e

    # Unit-circle roots: even multiplicity, split each cluster evenly.
    chosen: list[complex] = []
    for widen_pass, circle_tol in enumerate((UNIT_CIRCLE_TOL, 10 * UNIT_CIRCLE_TOL)):
        on_unit = np.abs(np.abs(roots) - 1.0) <= circle_tol
        unit = roots[on_unit]
        rest = roots[~on_unit]
        clusters = _split_unit_cluster(np.angle(unit) % (2 * np.pi), 20 * circle_tol)
        if all(len(cl) % 2 == 0 for cl in clusters):
            break
    else:
        raise FactorizationError("odd-multiplicity unit-circle root cluster; "
                                 "input is numerically defective")
    for cl in clusters:
        cl_roots = unit[cl]
        mean_angle = np.angle(np.sum(cl_roots / np.abs(cl_roots)))
        chosen.extend([np.exp(1j * mean_angle)] * (len(cl) // 2))

    # Off-circle roots: greedy pairing rho <-> rho' by rho * conj(rho') ~ 1.
    inside = sorted((r for r in rest if abs(r) < 1.0), key=lambda r: -abs(r))
    outside = list(r for r in rest if abs(r) >= 1.0)
    if len(inside) != len(outside):
        raise FactorizationError("unbalanced root pairing (inside/outside counts "
                                 f"{len(inside)}/{len(outside)})")
    for rho in inside:
        errs = [abs(rho * np.conj(r) - 1.0) for r in outside]
        j = int(np.argmin(errs))
        if errs[j] > 1e-5 * (1.0 + abs(rho)):
            raise FactorizationError(
                f"root pairing failure: best partner residual {errs[j]:.3e}")
        outside.pop(j)
        chosen.append(rho)

    monic = npoly.polyfromroots(chosen)          # degree n, ascending
    norm = np.sum(np.abs(monic) ** 2)
    c = np.sqrt(psi[0].real / norm)
    theta_coeffs = c * monic
    phase = theta_coeffs[0] / abs(theta_coeffs[0])
    theta_coeffs = theta_coeffs / phase
    theta = SeqZ({k: theta_coeffs[k] for k in range(n + 1)})

    residual = _reconstruction_residual(theta, psi)
    if residual > max(tol, 1e-8):
        raise FactorizationError(f"reconstruction residual {residual:.3e} "
                                 f"exceeds tolerance {max(tol, 1e-8):.1e}")
    return Factorization(theta, residual, "roots")


def sqrt_zm(psi: SeqZm, phases=None, tol: float = 1e-8) -> Factorization:
    """Spectral square root on Z_m: theta_hat(v) = sqrt(psi_hat(v)/m) e^{i phase_v}.

    Spectral values in [-tol, 0) are clamped to 0 (LP extremals sit exactly on
    the boundary).  No support localization is claimed.
    """
    m = psi.modulus
    if phases is None:
        phases = np.zeros(m)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (m,):
        raise ValueError(f"expected {m} phases")
    cert = is_pd_zm(psi, tol)
    if not cert.is_pd:
        raise FactorizationError(
            f"input not certified positive definite ({cert.reason or 'min '}"
            f"{cert.min_value:.3e})")
    hat = dft_zm(psi).values.real.copy()
    hat[(hat < 0) & (hat >= -tol)] = 0.0
    theta_hat = np.sqrt(hat / m) * np.exp(1j * phases)
    theta = idft_zm(SeqZm(m, theta_hat))
    residual = _reconstruction_residual(theta, psi)
    if residual > max(tol, 1e-8):
        raise FactorizationError(f"reconstruction residual {residual:.3e} "
                                 f"exceeds tolerance {max(tol, 1e-8):.1e}")
    return Factorization(theta, residual, "spectral")
