"""
Параметри бінарного асиметричного каналу та зміщеного джерела
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class ChannelParams:
    """
    Бінарний асиметричний канал.

    Символ +1 інвертується з ймовірністю p, символ -1 з ймовірністю r.
    """
    p: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, 'p', float(self.p))
        object.__setattr__(self, 'r', float(self.r))
        for name, value in (('p', self.p), ('r', self.r)):
            if not 0.0 <= value < 0.5:
                raise ValueError(f"Ймовірність інверсії {name} має лежати в [0, 0.5)")
        if self.p + self.r >= 1.0:
            raise ValueError("Канал вироджений: p + r >= 1")

    @classmethod
    def bsc(cls, p: float) -> 'ChannelParams':
        """Симетричний канал (p = r)"""
        return cls(p, p)

    @classmethod
    def z_channel(cls, flip: float) -> 'ChannelParams':
        """Однобічний канал: інвертуються лише символи +1"""
        return cls(flip, 0.0)

    @property
    def is_symmetric(self) -> bool:
        return self.p == self.r

    @property
    def is_noiseless(self) -> bool:
        return self.p == 0.0 and self.r == 0.0


@dataclass(frozen=True)
class SourceModel:
    """Джерело з P(y = +1) = bias"""
    bias: float

    def __post_init__(self):
        object.__setattr__(self, 'bias', float(self.bias))
        if not 0.0 < self.bias < 1.0:
            raise ValueError("Зміщення джерела має лежати в (0, 1)")

    @property
    def preferred_polarity(self) -> int:
        """Полярність мережі, для якої вихід +1 є більш імовірним символом"""
        return 1 if self.bias >= 0.5 else -1
