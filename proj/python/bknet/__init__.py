"""Separated nets, checkerboard densities and stretch certificates."""

from ._bknet import (
    DensityField,
    ValidationError,
    check_net,
    checkerboard,
    generate_net,
    greedy_distortion,
    hierarchy,
    pair_distortion,
    run_cli,
    schedule_constants,
    search_min_stretch,
)

__all__ = [
    "DensityField",
    "ValidationError",
    "check_net",
    "checkerboard",
    "generate_net",
    "greedy_distortion",
    "hierarchy",
    "pair_distortion",
    "run_cli",
    "schedule_constants",
    "search_min_stretch",
]
