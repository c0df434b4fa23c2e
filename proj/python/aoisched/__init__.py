"""Cyclic schedulers and evaluators for weighted age of information.

Patterns are lists of 1-based source numbers.
"""

from ._aoisched import (
    AoiReport,
    ConfigError,
    FrequencySolution,
    InfeasibleError,
    NumericalError,
    ServiceDist,
    SimReport,
    SourceParams,
    SystemConfig,
    arrange_placement,
    drr_spread,
    evaluate,
    grouped_spread,
    is_build,
    nots_build,
    pgaw_aoi,
    pgaw_optimize,
    placement_to_pattern,
    quantize_frequencies,
    rr_aoi,
    sams_build,
    simulate,
    solve_utilizations,
    two_source_aoi,
)

__all__ = [name for name in dir() if not name.startswith("_")]
