"""Extremal constants of Carathéodory-Fejér type for positive definite
functions: exact LP solvers on Z_m, a cutting-plane solver on Z, and the
reduction of point-evaluation problems on product groups to these."""

from .sequences import (SeqZ, SeqZm, SupportZ, SupportZm, PdCertificate,
                        convolve, convolution_square, dft_zm, idft_zm,
                        is_pd_z, is_pd_zm, min_trig, reverse_conjugate,
                        sequence_from_json, triangle_sequence, trig_eval)
from .rootfind import poly_roots, RootConvergenceError
from .factorization import Factorization, FactorizationError, fejer_riesz_z, sqrt_zm
from .lp import (LinearProgram, LpSolution, LpError, MaxModulusResult,
                 max_modulus, solve_lp)
from .cyclic import (SolveReport, brute_group_oracle, cf_m, dual_set_zm, k_m,
                     verify_duality_zm)
from .integers import (SolverDisagreementError, cf_z, classic_table, dual_set_z,
                       km_grid, lambda_search, m_classic, sparse_family_cf,
                       verify_duality_z)
from .groups import (Box, Factor, GroupDescriptor, GroupElement, GroupFunction,
                     OmegaDescriptor, ReducedProblem, TheoremViolationError,
                     lift_witness, order, reduce_problem, restrict, solve_group)

__version__ = "0.1.0"

__all__ = [
    "SeqZ", "SeqZm", "SupportZ", "SupportZm", "PdCertificate",
    "convolve", "convolution_square", "dft_zm", "idft_zm", "is_pd_z",
    "is_pd_zm", "min_trig", "reverse_conjugate", "sequence_from_json",
    "triangle_sequence", "trig_eval",
    "poly_roots", "RootConvergenceError",
    "Factorization", "FactorizationError", "fejer_riesz_z", "sqrt_zm",
    "LinearProgram", "LpSolution", "LpError", "MaxModulusResult",
    "max_modulus", "solve_lp",
    "SolveReport", "brute_group_oracle", "cf_m", "dual_set_zm", "k_m",
    "verify_duality_zm",
    "SolverDisagreementError", "cf_z", "classic_table", "dual_set_z",
    "km_grid", "lambda_search", "m_classic", "sparse_family_cf",
    "verify_duality_z",
    "Box", "Factor", "GroupDescriptor", "GroupElement", "GroupFunction",
    "OmegaDescriptor", "ReducedProblem", "TheoremViolationError",
    "lift_witness", "order", "reduce_problem", "restrict", "solve_group",
]
