"""Uncoded cache placement optimization for coded multicast delivery."""

from ._ccopt import (
    Instance,
    Popularity,
    average_load,
    average_load_mc,
    baseline_mn_load,
    baseline_yu_load,
    decode_check,
    delivery_plan,
    distinct_files_prob,
    expand_symmetric,
    l0_count,
    leftover_rank_prob,
    leftover_rank_prob_enum,
    solve_average,
    subpack_optimize,
    sum_largest,
    sum_largest_subgradient,
    support_oracle,
    uniform_closed_form,
    validate,
)

__all__ = [
    "Instance",
    "Popularity",
    "average_load",
    "average_load_mc",
    "baseline_mn_load",
    "baseline_yu_load",
    "decode_check",
    "delivery_plan",
    "distinct_files_prob",
    "expand_symmetric",
    "l0_count",
    "leftover_rank_prob",
    "leftover_rank_prob_enum",
    "solve_average",
    "subpack_optimize",
    "sum_largest",
    "sum_largest_subgradient",
    "support_oracle",
    "uniform_closed_form",
    "validate",
]

__version__ = "0.1.0"
