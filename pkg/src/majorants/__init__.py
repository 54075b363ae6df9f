"""Matched-norm Fourier majorants for finitely supported sequences on the integers."""

from .seqz import (
    NormConsistencyError,
    SeqZ,
    autocorrelation,
    conv_power,
    convolve,
    involute,
    lp_norm,
    majorant_coeffs,
    norm_2j_pow,
    norm_2j_pow_direct,
)
from .solver import (
    MajorantProblem,
    MajorantSolution,
    SolverConfig,
    alternative_majorant,
    derive_target,
    enlarge_support,
    grad_norm,
    minimal_majorant,
    phi,
    project_weighted_simplex,
    solve,
)
from .verify import (
    VerificationReport,
    check_hoelder,
    check_upper_majorant,
    exactness_gap,
    is_sidon_bj,
    oracle_solve,
    uniqueness_probe,
    verify_solution,
)

__version__ = "0.1.0"
