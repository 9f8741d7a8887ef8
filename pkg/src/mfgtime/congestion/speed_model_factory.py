from mfgtime.congestion.speed_models import ExponentialCongestion, SinusoidalLandscape
from mfgtime.core.constants import DEFAULT_SPEED_MODEL
from mfgtime.core.errors import ConfigError
from mfgtime.utils.formatting import paragraph, table


class SpeedModelFactory:
    _supported = {
        'exponential': {
            'description': 'Crowd congestion K_min + (K_max - K_min) exp(-a_self rho_own - a_cross rho_other)',
            'class': ExponentialCongestion,
        },
        'landscape': {
            'description': 'Crowd-independent field base + amplitude prod sin(frequency x_j)',
            'class': SinusoidalLandscape,
        },
    }

    @classmethod
    def list_supported_models(cls):
        return list(cls._supported.keys())

    @classmethod
    def show_supported_models(cls):
        rows = [[name, config['description']] for name, config in cls._supported.items()]
        print(paragraph("Supported speed models"))
        print(table(rows, headers=["Model", "Description"]))

    @classmethod
    def create(cls, spec: dict):
        spec = dict(spec)
        kind = spec.pop("type", DEFAULT_SPEED_MODEL)
        config = cls._supported.get(kind)
        if config is None:
            raise ConfigError(f"Unsupported speed model: '{kind}'.\n "
                              f"Supported models: {cls.list_supported_models()}")
        try:
            return config['class'](**spec)
        except TypeError as exc:
            raise ConfigError(f"Bad parameters for speed model '{kind}': {exc}")
