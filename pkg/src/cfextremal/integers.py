"""The common extremal constant on Z for finite supports, with cross-checks.

cf_z maximizes psi(1) over real even sequences with psi(0) = 1, support in H,
and nonnegative trigonometric polynomial.  The semi-infinite nonnegativity
constraint is handled by an exchange (cutting-plane) loop: solve the LP on a
finite working point set, locate the global minimum of the polynomial, add it
as a new constraint, repeat.  Every solve is cross-validated against the
grid-doubling discretization K_m (nonincreasing in the doubling, converging
to the same value); disagreement beyond 10x tolerance raises, it is never
averaged away.

The classical table, the dual-set product trend, the sparse families, and the
bounded-support search are thin layers over cf_z.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .cyclic import SolveReport
from .lp import LinearProgram, LpError, free_lower, solve_lp
from .sequences import SeqZ, SupportZ, is_pd_z, min_trig

MAX_EXCHANGE_ROUNDS = 200
MAX_DOUBLING_M = 1 << 21
DEDUP_RADIUS = 1e-12


class SolverDisagreementError(RuntimeError):
    """Exchange and grid-doubling values disagree beyond 10x tolerance."""


@dataclass
class ExchangeState:
    working_points: np.ndarray
    lp: LinearProgram
    violation: float
    round: int


def _require_admissible(support: SupportZ):
    if not support.admissible:
        raise ValueError("support must contain 0 and +-1")


def _exchange_lp(half: np.ndarray, points: np.ndarray) -> LinearProgram:
    # T(t_i) >= 0  <=>  -2 sum_k cos(2 pi k t_i) c_k <= 1
    A = -2.0 * np.cos(2 * np.pi * np.outer(points, half))
    obj = np.zeros(half.size)
    obj[0] = 1.0  # half is sorted and admissible, so half[0] == 1
    return LinearProgram(obj, A, np.ones(points.size),
                         ("le",) * points.size, free_lower(half.size))


def _psi_from_coeffs(half, coeffs) -> SeqZ:
    entries = {0: 1.0 + 0j}
    for k, c in zip(half, coeffs):
        entries[int(k)] = complex(c)
        entries[-int(k)] = complex(c)
    return SeqZ(entries, drop_tol=0.0)


def km_grid(support: SupportZ, m: int) -> float:
    """Discretized constant: nonnegativity only on the m-point grid j/m.

    For even m the grid is invariant under the half-period shift that flips
    the sign of psi(1), so a single signed LP gives the modulus maximum.
    """
    _require_admissible(support)
    if m % 2 != 0:
        raise ValueError("grid doubling uses even m")
    if m <= 2 * support.max_element():
        raise ValueError("grid modulus must exceed twice the max support element")
    half = np.array(support.half, dtype=float)
    points = np.arange(m // 2 + 1) / m
    sol = solve_lp(_exchange_lp(half, points))
    if sol.status != "optimal":
        raise LpError(f"grid LP ended {sol.status}")
    return float(sol.value)


def cf_z(support: SupportZ, tol: float = 1e-8, cross_check: bool = True,
         max_rounds: int = MAX_EXCHANGE_ROUNDS) -> SolveReport:
    """The constant CF(H) = K(H) on Z for a finite symmetric support."""
    t0 = time.perf_counter()
    _require_admissible(support)
    half = np.array(support.half, dtype=float)
    n_max = support.max_element()
    eps_feas = tol / 10.0

    m0 = 4 * (2 * n_max + 1)
    points = list(np.arange(m0) / m0)
    state = None
    psi = None
    sol = None
    for rnd in range(1, max_rounds + 1):
        lp = _exchange_lp(half, np.array(points))
        sol = solve_lp(lp)
        if sol.status != "optimal":
            raise LpError(f"exchange LP ended {sol.status}")
        psi = _psi_from_coeffs(support.half, sol.point)
        t_min, violation = min_trig(psi)
        state = ExchangeState(np.array(sorted(points)), lp, violation, rnd)
        if violation >= -eps_feas:
            break
        t_new = t_min % 1.0
        nearest = min(abs(t_new - t) for t in points)
        if nearest > DEDUP_RADIUS:
            points.append(t_new)
        else:
            # stalled on an existing point: bracket it instead
            spacing = 1.0 / len(points)
            points.append((t_new + spacing / 3.0) % 1.0)
            points.append((t_new - spacing / 3.0) % 1.0)
    else:
        raise LpError(f"exchange did not converge in {max_rounds} rounds "
                      f"(violation {state.violation:.3e})")

    # certified lower bound: mix with delta_0 to absorb the residual violation
    c = max(0.0, -state.violation)
    entries = {k: v / (1.0 + c) for k, v in psi.entries.items()}
    entries[0] = (psi[0] + c) / (1.0 + c)
    psi_rep = SeqZ(entries, drop_tol=0.0)
    value = float(psi_rep[1].real)
    upper = float(sol.value) + sol.primal_residual + sol.dual_residual

    meta = {"method": "exchange", "rounds": state.round,
            "violation": state.violation,
            "workingPoints": int(state.working_points.size),
            "lpValue": float(sol.value)}

    if cross_check:
        grid_seq, richardson = _doubling_sequence(support, tol)
        meta["gridSequence"] = grid_seq
        meta["richardson"] = richardson
        k_final = grid_seq[-1][1]
        meta["crossCheckDelta"] = k_final - value
        if abs(k_final - value) > 10 * tol:
            raise SolverDisagreementError(
                f"exchange value {value:.12g} vs grid limit {k_final:.12g} "
                f"differ by {abs(k_final - value):.3e} > {10 * tol:.1e}")

    meta["wallTime"] = time.perf_counter() - t0
    return SolveReport(value=value, extremal=psi_rep,
                       certificate=is_pd_z(psi_rep, 1e-8),
                       enclosure=(value, max(value, upper)), meta=meta)


def _doubling_sequence(support: SupportZ, tol: float):
    """K_(m_j) for m_j = m_0 2^j until successive values differ by <= tol."""
    n_max = support.max_element()
    m = 1
    while m <= 8 * n_max:
        m *= 2
    seq = [(m, km_grid(support, m))]
    while True:
        m *= 2
        if m > MAX_DOUBLING_M:
            raise SolverDisagreementError(
                f"grid doubling did not settle below m={MAX_DOUBLING_M}")
        seq.append((m, km_grid(support, m)))
        if abs(seq[-1][1] - seq[-2][1]) <= tol:
            break
    # O(1/m^2) model extrapolation; reported, never used for pass/fail
    richardson = (4 * seq[-1][1] - seq[-2][1]) / 3.0
    return [[mm, vv] for mm, vv in seq], richardson


def m_classic(n: int, tol: float = 1e-8) -> float:
    """The cosine-polynomial constant for the full block [0, n]: 2 CF(H)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    support = SupportZ(tuple(range(1, n + 1)))
    return 2.0 * cf_z(support, tol).value


def classic_table(ns, tol: float = 1e-8, fine_grid_m: int = 1 << 14) -> list[dict]:
    """Exchange vs fine-grid values for blocks [0, n], against both printed
    closed forms 2cos(2pi/(n+2)) and 2cos(pi/(n+2))."""
    rows = []
    for n in ns:
        support = SupportZ(tuple(range(1, n + 1)))
        exch = cf_z(support, tol).value
        grid = km_grid(support, fine_grid_m)
        m_exch = 2.0 * exch
        f_2pi = 2.0 * math.cos(2 * math.pi / (n + 2))
        f_pi = 2.0 * math.cos(math.pi / (n + 2))
        rows.append({"n": n, "exchange": m_exch, "fineGrid": 2.0 * grid,
                     "exchangeVsGrid": abs(2.0 * grid - m_exch),
                     "formula2cos2pi": f_2pi, "delta2pi": m_exch - f_2pi,
                     "formula2cosPi": f_pi, "deltaPi": m_exch - f_pi})
    return rows


def dual_set_z(support: SupportZ, universe: int) -> SupportZ:
    """(N \\ H) united with {-1,0,1}, truncated to [1, universe]."""
    _require_admissible(support)
    if universe < max(2, support.max_element()):
        raise ValueError("universe bound must cover the support")
    in_h = set(support.half)
    half = [1] + [k for k in range(2, universe + 1) if k not in in_h]
    return SupportZ(tuple(half))


@dataclass
class DualityTrendZ:
    support: SupportZ
    universes: list[int]
    products: list[float]    # M(H) M(H*_U) for each truncation level
    deviation: float         # |last product - 2|
    drift: float             # |last - previous| product change
    converged: bool
    passed: bool

    def to_json(self) -> dict:
        return {"half": list(self.support.half),
                "trend": [[u, p] for u, p in zip(self.universes, self.products)],
                "deviation": self.deviation, "drift": self.drift,
                "converged": self.converged, "passed": self.passed}


def verify_duality_z(support: SupportZ, tol: float = 5e-3,
                     universes=None, solver_tol: float = 1e-8) -> DualityTrendZ:
    """Trend of M(H) M(H*_U) toward 2 for increasing truncation U.

    The identity is exact only for the untruncated dual set, so this reports
    the truncation sweep rather than claiming an exact product.
    """
    _require_admissible(support)
    if universes is None:
        u = max(40, 4 * support.max_element())
        universes = [u // 2, u]
    m_h = 2.0 * cf_z(support, solver_tol).value
    products = []
    for u in universes:
        dual = dual_set_z(support, u)
        m_dual = 2.0 * cf_z(dual, solver_tol).value
        products.append(m_h * m_dual)
    drift = abs(products[-1] - products[-2]) if len(products) > 1 else 0.0
    deviation = abs(products[-1] - 2.0)
    return DualityTrendZ(support, list(universes), products, deviation, drift,
                         converged=drift <= tol, passed=deviation <= tol)


@dataclass
class LambdaSearchResult:
    n: int
    universe: int
    best_half: tuple[int, ...]
    best_value: float
    evaluated: list[tuple[tuple[int, ...], float]]

    def to_json(self) -> dict:
        return {"n": self.n, "universe": self.universe,
                "bestHalf": list(self.best_half), "bestValue": self.best_value,
                "evaluated": [[list(h), v] for h, v in self.evaluated]}


def lambda_search(n: int, universe: int, tol: float = 1e-8,
                  budget: int = 100_000) -> LambdaSearchResult:
    """Exhaustive M(H)/2 over one-sided supports with 1 in H, |H| = n, H in [1,U].

    The best value is a certified lower bound for the supremum over all
    n-element supports; attainment within any bounded universe is unknown.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    count = math.comb(universe - 1, n - 1)
    if count > budget:
        raise ValueError(f"enumeration of {count} supports exceeds budget {budget}")
    best = None
    evaluated = []
    for rest in combinations(range(2, universe + 1), n - 1):
        half = (1,) + rest
        value = cf_z(SupportZ(half), tol).value
        evaluated.append((half, value))
        if best is None or value > best[1]:
            best = (half, value)
    return LambdaSearchResult(n, universe, best[0], best[1], evaluated)


@dataclass
class SparseFamilyResult:
    start: int
    truncation: int
    value: float
    trend: list[tuple[int, float]]

    def to_json(self) -> dict:
        return {"N": self.start, "M": self.truncation, "value": self.value,
                "trend": [[m, v] for m, v in self.trend]}


def sparse_family_cf(start: int, truncation: int,
                     tol: float = 1e-6) -> SparseFamilyResult:
    """CF on the truncated family {0, +-1} union {+-start, ..., +-truncation}.

    Values are monotone nondecreasing in the truncation (the feasible set
    grows), reported along a truncation ladder.
    """
    if start < 4:
        raise ValueError("the family needs start >= 4 (the closed form "
                         "exceeds the trivial bound 1 below that)")
    if truncation < 2 * start:
        raise ValueError("truncation must be at least twice the start")
    ladder = sorted({max(2 * start, truncation // 2),
                     max(2 * start, (3 * truncation) // 4), truncation})
    trend = []
    for m in ladder:
        half = (1,) + tuple(range(start, m + 1))
        trend.append((m, cf_z(SupportZ(half), tol).value))
    return SparseFamilyResult(start, truncation, trend[-1][1], trend)
