from abc import ABC, abstractmethod

from mfgtime.utils.formatting import paragraph, table


class DampingBase(ABC):
    """Weight lambda_n given to the new best response at iteration n >= 1."""

    name = None

    @abstractmethod
    def weight(self, n) -> float:
        pass

    def __repr__(self):
        return f"{self.__class__.__name__}()"


class FictitiousPlay(DampingBase):
    """lambda_n = 1 / (n + 1): the iterate is the running average of all best responses."""

    name = "fictitious"

    def weight(self, n):
        return 1.0 / (n + 1)


class PicardDamping(DampingBase):
    """lambda_n = 1: the best response replaces the iterate."""

    name = "picard"

    def weight(self, n):
        return 1.0


class DampingFactory:
    _supported = {
        'fictitious': {
            'description': 'Fictitious play, lambda_n = 1/(n+1)',
            'class': FictitiousPlay,
        },
        'picard': {
            'description': 'Plain best-response iteration, lambda_n = 1',
            'class': PicardDamping,
        },
    }

    @classmethod
    def list_supported_modes(cls):
        return list(cls._supported.keys())

    @classmethod
    def show_supported_modes(cls):
        rows = [[name, config['description']] for name, config in cls._supported.items()]
        print(paragraph("Supported damping modes"))
        print(table(rows, headers=["Mode", "Description"]))

    @classmethod
    def create(cls, mode: str) -> DampingBase:
        config = cls._supported.get(mode)
        if config is None:
            raise ValueError(f"Unsupported damping mode: '{mode}'.\n "
                             f"Supported modes: {cls.list_supported_modes()}")
        return config['class']()
