from mfgtime.congestion.kernel_density import density_grid, kernel_density, kernel_gradient_sup
from mfgtime.congestion.speed_field import SpeedField, build_speed_field, hat_measure, static_speed_field
from mfgtime.congestion.speed_model_factory import SpeedModelFactory
from mfgtime.congestion.speed_models import ExponentialCongestion, SinusoidalLandscape, speed

__all__ = [
    "kernel_density",
    "kernel_gradient_sup",
    "density_grid",
    "hat_measure",
    "SpeedField",
    "build_speed_field",
    "static_speed_field",
    "SpeedModelFactory",
    "ExponentialCongestion",
    "SinusoidalLandscape",
    "speed",
]
