"""Extremal constants on Z_m by linear programming over nonnegative spectra.

Positive definiteness on Z_m is nonnegativity of the DFT, so the feasible
set is parametrized by spectral variables psi_hat(v) >= 0: support conditions
become equality rows and the problem is a plain LP.  k_m solves the real
class (even spectrum, two signed objectives), cf_m the complex class (full
spectrum, modulus objective via the direction sweep).

brute_group_oracle solves the same kind of program directly on a finite
product of cyclic groups with variables over all characters; it is the
independent check for the reduction theorems.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .lp import LinearProgram, LpError, free_lower, max_modulus, nonneg_lower, solve_lp
from .sequences import (PdCertificate, SeqZm, SupportZm, dft_zm, is_pd_zm)

if TYPE_CHECKING:  # pragma: no cover
    from .groups import GroupDescriptor, GroupElement, OmegaDescriptor

OFF_SUPPORT_TOL = 1e-9


@dataclass
class SolveReport:
    """Certified outcome of one extremal solve."""

    value: float
    extremal: object               # SeqZm | SeqZ | GroupFunction
    certificate: PdCertificate
    enclosure: tuple[float, float]
    meta: dict

    def to_json(self) -> dict:
        return {"value": self.value,
                "enclosure": [self.enclosure[0], self.enclosure[1]],
                "extremal": self.extremal.to_json(),
                "certificate": self.certificate.to_json(),
                "meta": self.meta}


def _require_admissible(support: SupportZm):
    if not support.admissible:
        raise ValueError("support must contain 0 and +-1 with modulus >= 2")


def _degenerate_report(m: int, tol: float, t0: float) -> SolveReport:
    # m = 2, 3: admissibility forces H = Z_m and psi == 1 is extremal.
    psi = SeqZm(m, np.ones(m))
    return SolveReport(
        value=1.0, extremal=psi, certificate=is_pd_zm(psi, tol),
        enclosure=(1.0, 1.0),
        meta={"method": "degenerate", "iterations": 0,
              "wallTime": time.perf_counter() - t0})


def _clean_extremal(psi_vals: np.ndarray, support: SupportZm) -> SeqZm:
    """Zero the off-support residue, renormalize psi(0) to exactly 1."""
    m = support.modulus
    vals = np.asarray(psi_vals, dtype=complex).copy()
    for k in range(m):
        if k not in support.residues:
            if abs(vals[k]) > OFF_SUPPORT_TOL:
                raise LpError(f"extremal violates support at k={k}: "
                              f"|psi(k)|={abs(vals[k]):.3e}")
            vals[k] = 0.0
    if abs(vals[0] - 1.0) > OFF_SUPPORT_TOL:
        raise LpError(f"extremal has psi(0)={vals[0]:.12g} != 1")
    vals /= vals[0]
    return SeqZm(m, vals)


def _repair_to_pd(psi: SeqZm) -> tuple[SeqZm, float]:
    """Mix with delta_0 so the spectrum is certainly nonnegative.

    With the 1/m-forward DFT convention, adding c*delta_0 lifts every
    spectral value by c/m, so c = m * (negative spectral excess).
    """
    hat = dft_zm(psi).values.real
    delta = max(0.0, -float(np.min(hat)))
    if delta == 0.0:
        return psi, 0.0
    c = psi.modulus * delta
    vals = psi.values / (1.0 + c)
    vals[0] += c / (1.0 + c)
    return SeqZm(psi.modulus, vals), c


def k_m(support: SupportZm, tol: float = 1e-8) -> SolveReport:
    """max |psi(1)| over real PD psi on Z_m, psi(0)=1, supp psi in H.

    Spectral variables are reduced to representatives v in [0, m/2] with
    evenness built in; the two signed objectives are solved separately since
    sign attainment may differ for odd m.
    """
    t0 = time.perf_counter()
    _require_admissible(support)
    m = support.modulus
    if m <= 3:
        return _degenerate_report(m, tol, t0)

    reps = np.arange(m // 2 + 1)
    weights = np.where((reps == 0) | (2 * reps == m), 1.0, 2.0)
    ks = np.arange(m // 2 + 1)
    cos_mat = weights[None, :] * np.cos(2 * np.pi * np.outer(ks, reps) / m)

    rows = [cos_mat[0]]
    rhs = [1.0]
    kinds = ["eq"]
    for k in range(1, m // 2 + 1):
        if k not in support.residues:
            rows.append(cos_mat[k])
            rhs.append(0.0)
            kinds.append("eq")
    base = LinearProgram(np.zeros(len(reps)), np.array(rows), np.array(rhs),
                         tuple(kinds), nonneg_lower(len(reps)))

    best = None
    iterations = 0
    for sign in (1.0, -1.0):
        lp = LinearProgram(sign * cos_mat[1], base.constraint_matrix, base.rhs,
                           base.row_kinds, base.var_lower)
        sol = solve_lp(lp)
        if sol.status != "optimal":
            raise LpError(f"k_m LP ended {sol.status}")
        iterations += sol.iterations
        if best is None or sol.value > best[0].value:
            best = (sol, sign)
    sol, sign = best

    hat = np.zeros(m)
    for i, v in enumerate(reps):
        hat[v] = sol.point[i]
        hat[(-v) % m] = sol.point[i]
    psi_vals = np.fft.ifft(hat) * m
    psi = _clean_extremal(psi_vals.real.astype(complex), support)
    psi, _ = _repair_to_pd(psi)
    value = abs(psi[1])
    upper = abs(sol.value) + sol.primal_residual + sol.dual_residual
    return SolveReport(
        value=value, extremal=psi, certificate=is_pd_zm(psi, tol),
        enclosure=(value, max(value, upper)),
        meta={"method": "lp-fourier-even", "iterations": iterations,
              "sign": sign, "lpValue": sol.value,
              "wallTime": time.perf_counter() - t0})


def _cf_base(support: SupportZm):
    m = support.modulus
    ang = 2 * np.pi * np.arange(m) / m
    rows = [np.ones(m)]
    rhs = [1.0]
    kinds = ["eq"]
    for k in range(1, m // 2 + 1):
        if k not in support.residues:
            rows.append(np.cos(k * ang))
            rhs.append(0.0)
            kinds.append("eq")
            sin_row = np.sin(k * ang)
            if np.max(np.abs(sin_row)) > 1e-12:
                rows.append(sin_row)
                rhs.append(0.0)
                kinds.append("eq")
    return LinearProgram(np.zeros(m), np.array(rows), np.array(rhs),
                         tuple(kinds), nonneg_lower(m)), ang


def cf_m(support: SupportZm, tol: float = 1e-8,
         symmetry_angle: float | None = None) -> SolveReport:
    """max |psi(1)| over complex PD psi on Z_m, psi(0)=1, supp psi in H.

    The attainable set of psi(1) is invariant under rotation by 2 pi / m
    (shift the spectrum by one index), so the direction sweep covers one
    such period unless told otherwise.
    """
    t0 = time.perf_counter()
    _require_admissible(support)
    m = support.modulus
    if m <= 3:
        return _degenerate_report(m, tol, t0)
    base, ang = _cf_base(support)
    if symmetry_angle is None:
        symmetry_angle = 2 * np.pi / m
    res = max_modulus(base, np.cos(ang), np.sin(ang),
                      symmetry_angle=symmetry_angle)
    psi_vals = np.fft.ifft(res.point) * m
    psi = _clean_extremal(psi_vals, support)
    psi, _ = _repair_to_pd(psi)
    value = abs(psi[1])
    return SolveReport(
        value=value, extremal=psi, certificate=is_pd_zm(psi, tol),
        enclosure=(value, max(value, res.upper_bound)),
        meta={"method": "lp-fourier-sweep", "iterations": res.iterations,
              "theta": res.theta, "wallTime": time.perf_counter() - t0})


def dual_set_zm(support: SupportZm) -> SupportZm:
    """(Z_m \\ H) united with {-1, 0, 1}."""
    _require_admissible(support)
    m = support.modulus
    residues = (frozenset(range(m)) - support.residues) | {0, 1, (m - 1) % m}
    return SupportZm(m, residues)


@dataclass
class DualityReportZm:
    support: SupportZm
    dual_support: SupportZm
    value: float
    dual_value: float
    product: float
    deviation: float
    passed: bool

    def to_json(self) -> dict:
        return {"modulus": self.support.modulus,
                "half": self.support.half(),
                "dualHalf": self.dual_support.half(),
                "value": self.value, "dualValue": self.dual_value,
                "product": self.product, "deviation": self.deviation,
                "passed": self.passed}


def verify_duality_zm(support: SupportZm, tol: float = 1e-8) -> DualityReportZm:
    """Check K_m(H) * K_m(H*) = 1/2."""
    dual = dual_set_zm(support)
    a = k_m(support, tol).value
    b = k_m(dual, tol).value
    product = a * b
    dev = abs(product - 0.5)
    return DualityReportZm(support, dual, a, b, product, dev, dev <= tol)


# ---------------------------------------------------------------------------
# direct finite-group oracle


def _element_order(moduli, coords) -> int:
    m = 1
    for mod, c in zip(moduli, coords):
        o = mod // math.gcd(int(c) % mod, mod)
        m = m * o // math.gcd(m, o)
    return m


def brute_group_oracle(group: "GroupDescriptor", omega: "OmegaDescriptor",
                       z: "GroupElement", mode: str = "complex",
                       tol: float = 1e-8) -> SolveReport:
    """Solve the extremal problem directly on a finite group G.

    Variables are f_hat(chi) >= 0 over all |G| characters; constraints are
    f(0) = 1 and f(x) = 0 for x outside Omega; the objective is |f(z)|
    (complex mode) or +-f(z) (real mode).  Independent of the reduction path.
    """
    from .groups import GroupFunction  # runtime import: groups imports us lazily

    t0 = time.perf_counter()
    if mode not in ("real", "complex"):
        raise ValueError("mode must be 'real' or 'complex'")
    if not group.is_finite:
        raise ValueError("oracle requires a finite group")
    size = group.size
    if size > 4096:
        raise ValueError(f"group size {size} exceeds the oracle cap 4096")
    if omega.explicit is None:
        raise ValueError("oracle requires an explicit Omega")
    if not (omega.contains(z) and omega.contains(z.neg())):
        raise ValueError("Omega must contain +-z")

    moduli = group.moduli
    d = len(moduli)
    elements = list(itertools.product(*[range(mm) for mm in moduli]))
    index = {e: i for i, e in enumerate(elements)}
    frac = np.array([[e[j] / moduli[j] for j in range(d)] for e in elements])

    def char_angles(x_coords) -> np.ndarray:
        """2 pi <nu, x>/moduli for all characters nu, at the point x."""
        return 2 * np.pi * (frac @ np.array([int(c) for c in x_coords]))

    off = [e for e in elements if e not in omega.explicit]
    # f(-x) = conj f(x): one representative per +- pair is enough
    seen = set()
    off_reps = []
    for e in off:
        neg = tuple((-c) % mm for c, mm in zip(e, moduli))
        if e not in seen:
            off_reps.append(e)
            seen.add(e)
            seen.add(neg)

    z_ang = char_angles(z.coords)
    o_z = _element_order(moduli, z.coords)

    if mode == "complex":
        rows = [np.ones(size)]
        rhs = [1.0]
        kinds = ["eq"]
        for e in off_reps:
            a = char_angles(e)
            rows.append(np.cos(a)), rhs.append(0.0), kinds.append("eq")
            s = np.sin(a)
            if np.max(np.abs(s)) > 1e-12:
                rows.append(s), rhs.append(0.0), kinds.append("eq")
        base = LinearProgram(np.zeros(size), np.array(rows), np.array(rhs),
                             tuple(kinds), nonneg_lower(size))
        res = max_modulus(base, np.cos(z_ang), np.sin(z_ang),
                          symmetry_angle=2 * np.pi / o_z)
        hat = res.point
        iterations = res.iterations
        upper_lp = res.upper_bound
    else:
        reps = []
        weight = []
        seen = set()
        for e in elements:
            neg = tuple((-c) % mm for c, mm in zip(e, moduli))
            if e in seen:
                continue
            seen.add(e)
            seen.add(neg)
            reps.append(e)
            weight.append(1.0 if neg == e else 2.0)
        w = np.array(weight)
        cols = np.array([index[e] for e in reps])

        def real_row(x_coords) -> np.ndarray:
            return w * np.cos(char_angles(x_coords))[cols]

        rows = [w]
        rhs = [1.0]
        kinds = ["eq"]
        for e in off_reps:
            rows.append(real_row(e)), rhs.append(0.0), kinds.append("eq")
        obj = real_row(z.coords)
        best = None
        iterations = 0
        for sign in (1.0, -1.0):
            lp = LinearProgram(sign * obj, np.array(rows), np.array(rhs),
                               tuple(kinds), nonneg_lower(len(reps)))
            sol = solve_lp(lp)
            if sol.status != "optimal":
                raise LpError(f"oracle LP ended {sol.status}")
            iterations += sol.iterations
            if best is None or sol.value > best.value:
                best = sol
        hat = np.zeros(size)
        for i, e in enumerate(reps):
            neg = tuple((-c) % mm for c, mm in zip(e, moduli))
            hat[index[e]] = best.point[i]
            hat[index[neg]] = best.point[i]
        upper_lp = abs(best.value) + best.primal_residual + best.dual_residual

    f_vals = (np.fft.ifftn(np.asarray(hat, dtype=complex).reshape(moduli)) * size)
    # clean off-Omega residue and renormalize, then repair the spectrum
    for e in off:
        if abs(f_vals[e]) > OFF_SUPPORT_TOL:
            raise LpError(f"oracle extremal violates support at {e}")
        f_vals[e] = 0.0
    zero = tuple(0 for _ in moduli)
    if abs(f_vals[zero] - 1.0) > OFF_SUPPORT_TOL:
        raise LpError("oracle extremal has f(0) != 1")
    f_vals /= f_vals[zero]
    fhat = np.fft.fftn(f_vals) / size
    delta = max(0.0, -float(np.min(fhat.real)))
    if delta > 0.0:
        c = size * delta
        f_vals /= (1.0 + c)
        f_vals[zero] += c / (1.0 + c)
    fn = GroupFunction(group, f_vals)
    value = abs(fn.value_at(z))
    return SolveReport(
        value=value, extremal=fn, certificate=fn.is_pd(tol),
        enclosure=(value, max(value, upper_lp)),
        meta={"method": f"oracle-{mode}", "iterations": iterations,
              "groupSize": size, "orderOfZ": o_z,
              "wallTime": time.perf_counter() - t0})
