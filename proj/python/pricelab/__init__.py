"""Algorithmic pricing under inflation."""

from ._core import (
    ConfigError,
    EquilibriumSolution,
    MarketParams,
    MissingArtifact,
    RunConfig,
    cohens_d,
    decompose,
    delta,
    effect_label,
    epsilon,
    load_inflation_csv,
    logit_demand,
    margin_grid,
    nabla,
    punishment_classify,
    run_csv_header,
    run_in_sample,
    solve_monopoly,
    solve_nash,
    time_to_supra,
    welch_t_test,
)

__all__ = [name for name in dir() if not name.startswith("_")]
