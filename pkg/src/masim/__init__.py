"""Field-response channel model and performance analysis for movable-antenna receivers."""

__version__ = "0.1.0"

from .channel import (ChannelField, PathResponseMatrix, PhysicalAngles, Position, Region,
                      VirtualAngles, channel_coefficient, channel_gain, effective_eprv, frv,
                      virtual_aoa)
from .config import ExperimentConfig, parse_config, serialize_config
from .exceptions import (ArityError, ConfigError, DegenerateGeometryError, DimensionError,
                         DomainError, MasimError, ResourceError)

__all__ = [
    "__version__",
    "ChannelField",
    "PathResponseMatrix",
    "PhysicalAngles",
    "Position",
    "Region",
    "VirtualAngles",
    "channel_coefficient",
    "channel_gain",
    "effective_eprv",
    "frv",
    "virtual_aoa",
    "ExperimentConfig",
    "parse_config",
    "serialize_config",
    "ArityError",
    "ConfigError",
    "DegenerateGeometryError",
    "DimensionError",
    "DomainError",
    "MasimError",
    "ResourceError",
]
