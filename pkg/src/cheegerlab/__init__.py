"""Numerical laboratory for p-Laplacian Rayleigh constants and Cheeger sets.

The package computes the Sobolev-type constants lambda_{p,q} of the
p-Laplacian on rasterized planar domains, the Cheeger constant by two
independent geometric algorithms, and drives continuation sweeps p -> 1+
that exhibit lambda_{p,q(p)} -> h(Omega) together with the norm and
superlevel-set limits that accompany it.
"""

from .cheeger_solver import (
    CheegerResult,
    cheeger_inner_parallel,
    cheeger_tv,
    superlevel_check,
    tv_profile,
)
from .domain_grid import (
    BinaryRegion,
    GridDomain,
    ScalarField,
    build_domain,
    grad_energy_p,
    indicator,
    inner_region,
    load_mask,
    lq_norm,
    measure_region,
    mollified_indicator,
    save_mask,
    total_variation,
)
from .limit_harness import (
    CheckRow,
    LimitReport,
    QPath,
    SweepRecord,
    check_corollary_le1,
    check_lemma_estim,
    check_theorem_main,
    extrapolate_limit,
    run_sweep,
    write_sweep_csv,
)
from .plap_solver import (
    SolveParams,
    SolveResult,
    critical_exponent,
    el_residual,
    lane_emden,
    minimize_rayleigh,
    rayleigh_quotient,
)
from .special_constants import (
    SobolevParams,
    ball_cheeger,
    beta,
    gamma,
    i_sigma_q,
    log_beta,
    log_gamma,
    sobolev_constant,
    unit_ball_volume,
)
from .verify import CriterionResult, VerifySummary, verify_all

__version__ = "0.1.0"

__all__ = [
    "BinaryRegion",
    "CheckRow",
    "CheegerResult",
    "CriterionResult",
    "GridDomain",
    "LimitReport",
    "QPath",
    "ScalarField",
    "SobolevParams",
    "SolveParams",
    "SolveResult",
    "SweepRecord",
    "VerifySummary",
    "ball_cheeger",
    "beta",
    "build_domain",
    "check_corollary_le1",
    "check_lemma_estim",
    "check_theorem_main",
    "cheeger_inner_parallel",
    "cheeger_tv",
    "critical_exponent",
    "el_residual",
    "extrapolate_limit",
    "gamma",
    "grad_energy_p",
    "i_sigma_q",
    "indicator",
    "inner_region",
    "lane_emden",
    "load_mask",
    "log_beta",
    "log_gamma",
    "lq_norm",
    "measure_region",
    "minimize_rayleigh",
    "mollified_indicator",
    "rayleigh_quotient",
    "run_sweep",
    "save_mask",
    "sobolev_constant",
    "superlevel_check",
    "total_variation",
    "tv_profile",
    "unit_ball_volume",
    "verify_all",
    "write_sweep_csv",
]
