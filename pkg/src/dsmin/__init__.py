"""Doppler-spread minimization and antenna selection for uniform linear transmit arrays."""
__version__ = "0.1.0"

from .errors import (
    DegenerateBeamError,
    DsminError,
    InfeasibleError,
    InvalidArgumentError,
    NumericalFailure,
)
from .geometry import AngleRegion, ArrayConfig, DirectionBank, equicos_directions, steering_vector, window
from .metrics import (
    WeightVector,
    beam_function,
    doppler_spread,
    normalized_doppler_spread,
    psd,
    quotient,
    radiation_efficiency,
    radiation_pattern,
)
from .moments import MomentMatrices, build_moments, lag_integral

__all__ = [
    "AngleRegion", "ArrayConfig", "DegenerateBeamError", "DirectionBank", "DsminError",
    "InfeasibleError", "InvalidArgumentError", "MomentMatrices", "NumericalFailure",
    "WeightVector", "beam_function", "build_moments", "doppler_spread", "equicos_directions",
    "lag_integral", "normalized_doppler_spread", "psd", "quotient", "radiation_efficiency",
    "radiation_pattern", "steering_vector", "window",
]
