"""Hypercube cache placement and one-shot zero-forcing delivery for
cache-aided interference networks."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    DimensionPartition,
    NetworkConfig,
    config_from_dimensions,
    derive_config,
    distinct_demand,
    partition_dimensions,
    validate_demand,
)
from .placement import PlacementMap, SubfileId, place_d2d, place_hypercube, verify_memory  # noqa: E402
from .scheduler import (  # noqa: E402
    Schedule,
    build_schedule,
    build_schedule_oracle,
    delta_hcb,
    schedule_stats,
    validate_schedule,
)

__all__ = [
    "DimensionPartition", "NetworkConfig", "PlacementMap", "Schedule", "SubfileId",
    "build_schedule", "build_schedule_oracle", "config_from_dimensions", "delta_hcb",
    "derive_config", "distinct_demand", "partition_dimensions", "place_d2d",
    "place_hypercube", "schedule_stats", "validate_demand", "validate_schedule",
    "verify_memory",
]
