"""Mixed finite element solver for porous-media channel flow."""

from ._core import (
    CaseConfig,
    ConfigError,
    DomainError,
    Solution,
    SolverError,
    alpha_beta,
    check_skew_symmetry,
    convergence_study,
    kappa,
    load_config,
    main,
    porosity_at,
    reynolds,
    solve,
)

__all__ = [
    "CaseConfig",
    "ConfigError",
    "DomainError",
    "Solution",
    "SolverError",
    "alpha_beta",
    "check_skew_symmetry",
    "convergence_study",
    "kappa",
    "load_config",
    "main",
    "porosity_at",
    "reynolds",
    "solve",
]


def _cli():
    import sys

    raise SystemExit(main(sys.argv[1:]))
