"""
Конфігурація експериментів та їхні результати
"""
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

from coding_app.domain.bp import Task
from coding_app.domain.channels import ChannelParams, SourceModel
from coding_app.domain.networks import NetworkKind


class ExperimentKind(str, Enum):
    ECC_SWEEP = 'ecc-sweep'
    ECC_HIST = 'ecc-hist'
    LC_SWEEP = 'lc-sweep'
    LC_HIST = 'lc-hist'
    BOUNDS = 'bounds'

    @property
    def task(self) -> Optional[Task]:
        if self in (ExperimentKind.ECC_SWEEP, ExperimentKind.ECC_HIST):
            return Task.ECC
        if self in (ExperimentKind.LC_SWEEP, ExperimentKind.LC_HIST):
            return Task.LC
        return None

    @property
    def is_histogram(self) -> bool:
        return self in (ExperimentKind.ECC_HIST, ExperimentKind.LC_HIST)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Повністю розв'язана конфігурація експерименту.

    Створюється формою ExperimentConfigForm; значення за замовчуванням уже
    підставлені, тож будь-який рядок результату можна відтворити з echo().
    """
    kind: ExperimentKind
    seed: int
    network: NetworkKind = NetworkKind.PTH
    K: int = 1
    N: int = 1000
    rates: tuple = (0.25,)
    M: Optional[int] = None
    p: float = 0.1
    r: float = 0.2
    bias: float = 0.5
    gammas: tuple = (0.0,)
    betas: tuple = (1.0,)
    k: Optional[float] = None
    runs: int = 20
    restarts: int = 10
    messages: int = 10
    iterations: Optional[int] = None
    delta: float = 0.1
    out: str = 'results'
    paper_scale: bool = False
    workers: int = 1
    record: bool = True

    @property
    def task(self) -> Optional[Task]:
        return self.kind.task

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(self.p, self.r)

    @property
    def source(self) -> SourceModel:
        return SourceModel(self.bias)

    def M_for(self, rate: float) -> int:
        """M = round(N / R), якщо M не задано явно"""
        if self.M is not None:
            return self.M
        return max(1, int(round(self.N / rate)))

    def rate_for(self, rate: float) -> float:
        """Фактична швидкість N/M, якщо M задано явно, інакше запитана R"""
        if self.M is not None:
            return self.N / self.M
        return rate

    def points(self) -> list[tuple[float, float]]:
        """Пари (gamma, R) у фіксованому порядку"""
        return [(gamma, rate) for gamma in self.gammas for rate in self.rates]

    def echo(self) -> dict:
        data = asdict(self)
        data['kind'] = self.kind.value
        data['network'] = self.network.value
        data['rates'] = list(self.rates)
        data['gammas'] = list(self.gammas)
        data['betas'] = list(self.betas)
        return data


@dataclass(frozen=True)
class ResultRow:
    """Агрегований показник для однієї точки параметрів"""
    params: dict
    metric: str
    mean: float
    std: float
    count: int
    aborted: int = 0
    wall_time: float = 0.0
    abort_reasons: tuple = field(default=())
    # найбільша частка перерваних серед β-кандидатів точки, якщо їх було кілька
    aborted_share: Optional[float] = None

    @property
    def aborted_fraction(self) -> float:
        if self.aborted_share is not None:
            return self.aborted_share
        total = self.count + self.aborted
        return self.aborted / total if total else 0.0


@dataclass(frozen=True)
class HistogramResult:
    """Попарні перекриття (samples) та рядки показників для однієї точки"""
    params: dict
    samples: tuple
    rows: tuple
    aborted: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class ExperimentOutcome:
    """Усе, що повертає один запуск команди"""
    config: ExperimentConfig
    rows: tuple
    samples: tuple = ()
    wall_time: float = 0.0

    @property
    def aborted(self) -> int:
        # рядки однієї точки повторюють той самий лічильник
        per_point = {}
        for row in self.rows:
            key = tuple(sorted((name, repr(value)) for name, value in row.params.items()))
            per_point[key] = max(per_point.get(key, 0), row.aborted)
        return sum(per_point.values())

    @property
    def worst_aborted_fraction(self) -> float:
        return max((row.aborted_fraction for row in self.rows), default=0.0)
