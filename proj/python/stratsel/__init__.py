"""Stratification variable selection for stratified sampling."""

from ._stratsel import (
    Frame,
    KMeansOptions,
    Partition,
    StratselError,
    StratumStats,
    __version__,
    allocation_objective,
    beta_pattern,
    brute_force_optimal,
    cli_main,
    evaluate,
    generate,
    generate_train_test,
    kmeans_fit,
    optimal,
    pick_covariate,
    proportional,
    select,
    srs_gap,
    srs_variance,
    stratified_variance,
    stratum_stats,
)

__all__ = [
    "Frame",
    "KMeansOptions",
    "Partition",
    "StratselError",
    "StratumStats",
    "allocation_objective",
    "beta_pattern",
    "brute_force_optimal",
    "cli_main",
    "evaluate",
    "generate",
    "generate_train_test",
    "kmeans_fit",
    "optimal",
    "pick_covariate",
    "proportional",
    "select",
    "srs_gap",
    "srs_variance",
    "stratified_variance",
    "stratum_stats",
]


def main():
    import sys

    raise SystemExit(cli_main(sys.argv[1:]))
