"""Certified ball-arithmetic audit of zero-sum identities for the Riemann xi function."""
from .balls import ComplexBall, RealBall, const_euler_gamma, const_log2, const_pi, elementary
from .catalog import (
    ZeroCatalog,
    ZeroEntry,
    count_vs_formula,
    load_catalog,
    parse_zero_table,
    read_zero_table,
    refine_zero,
    save_catalog,
)
from .errors import *  # noqa: F401,F403
from .special import EvalRequest, gamma, psi, xi, zeta
from .sums import lambda_term, mu_nu_terms, reciprocal_constant, sum_lambda_power, tail_bound

__version__ = "0.1.0"
