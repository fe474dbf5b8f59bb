"""
Конфігурація, стан та задача ітерації поширення переконань
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from coding_app.domain.channels import ChannelParams, SourceModel
from coding_app.domain.networks import Codebook, NetworkSpec
from coding_app.domain.spins import SpinVector
from coding_app.exceptions import EnumerationBudgetError


class Task(str, Enum):
    """ECC - декодування коду, LC - кодування зі втратами"""
    ECC = 'ecc'
    LC = 'lc'

    @property
    def default_iterations(self) -> int:
        return 100 if self is Task.ECC else 35


@dataclass(frozen=True)
class BPConfig:
    iterations: int = 100
    gamma: float = 0.0
    beta: float = 1.0
    init_scale: float = 0.1
    q_clamp: float = 1.0 - 1e-9
    v_floor: float = 1e-12
    m_clamp: float = 1.0 - 1e-12
    early_stop_tol: Optional[float] = None
    damping: float = 0.0
    select_best_distortion: bool = False

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("Кількість ітерацій не може бути від'ємною")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("Амплітуда інерційного члена gamma має лежати в [0, 1)")
        if not self.beta > 0:
            raise ValueError("Обернена температура beta має бути додатною")
        if not 0.0 <= self.init_scale < 1.0:
            raise ValueError("Масштаб ініціалізації має лежати в [0, 1)")
        if not 0.0 < self.q_clamp < 1.0:
            raise ValueError("Обмеження q_clamp має лежати в (0, 1)")
        if not 0.0 < self.m_clamp < 1.0:
            raise ValueError("Обмеження m_clamp має лежати в (0, 1)")
        if not self.v_floor > 0:
            raise ValueError("Нижня межа V має бути додатною")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("Коефіцієнт згладжування має лежати в [0, 1)")
        if self.early_stop_tol is not None and not self.early_stop_tol > 0:
            raise ValueError("Поріг ранньої зупинки має бути додатним")

    @classmethod
    def from_settings(cls, task: Task, **overrides) -> 'BPConfig':
        """
        Створює конфігурацію з налаштувань проєкту BPCODE.

        Args:
            task: Задача (визначає кількість ітерацій за замовчуванням)
            **overrides: Поля, що замінюють значення з налаштувань

        Returns:
            BPConfig
        """
        from django.conf import settings

        bpcode = getattr(settings, 'BPCODE', {})
        iterations_key = 'ECC_ITERATIONS' if Task(task) is Task.ECC else 'LC_ITERATIONS'
        values = {
            'iterations': bpcode.get(iterations_key, Task(task).default_iterations),
            'init_scale': bpcode.get('INIT_SCALE', cls.init_scale),
            'q_clamp': bpcode.get('Q_CLAMP', cls.q_clamp),
            'v_floor': bpcode.get('V_FLOOR', cls.v_floor),
            'm_clamp': bpcode.get('M_CLAMP', cls.m_clamp),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def evolve(self, **changes) -> 'BPConfig':
        return replace(self, **changes)


@dataclass(frozen=True)
class StepTrace:
    """Діагностика одного кроку"""
    mean_abs_m: float
    q: tuple
    max_delta: float


@dataclass(frozen=True, eq=False)
class BPState:
    """
    Магнетизації m (форма (K, N/K)) та відношення Φ попереднього кроку
    (форма (M, K)) для реакційного члена.
    """
    m: np.ndarray
    phi_prev: np.ndarray
    t: int = 0
    trace: tuple = field(default=())

    def __post_init__(self):
        for name in ('m', 'phi_prev'):
            array = np.array(getattr(self, name), dtype=np.float64)
            array.flags.writeable = False
            object.__setattr__(self, name, array)
        if self.m.ndim != 2 or self.phi_prev.ndim != 2:
            raise ValueError("Стан має містити двовимірні масиви m та phi_prev")
        if self.m.shape[0] != self.phi_prev.shape[1]:
            raise ValueError("Кількість блоків у m та phi_prev не збігається")
        if not np.all(np.isfinite(self.m)):
            raise ValueError("Магнетизації мають бути скінченними")

    @property
    def K(self) -> int:
        return int(self.m.shape[0])

    @property
    def N(self) -> int:
        return int(self.m.size)

    @property
    def q(self) -> np.ndarray:
        """Перекриття q_l = (K/N) Σ_i m_il² без обмеження"""
        return np.mean(self.m ** 2, axis=1)

    @property
    def flat(self) -> np.ndarray:
        return self.m.reshape(-1)


@dataclass(frozen=True, eq=False)
class Problem:
    """
    Апостеріорна задача: кодова книга, мережа та спостереження.

    Для ECC observed - прийняте кодове слово, задається channel.
    Для LC observed - повідомлення джерела, задається source.
    planted - вихідне повідомлення s⁰, якщо воно відоме (лише для метрик).
    """
    task: Task
    spec: NetworkSpec
    codebook: Codebook
    observed: SpinVector
    channel: Optional[ChannelParams] = None
    source: Optional[SourceModel] = None
    planted: Optional[SpinVector] = None

    def __post_init__(self):
        object.__setattr__(self, 'task', Task(self.task))
        if len(self.observed) != self.codebook.M:
            raise ValueError(
                f"Довжина спостереження {len(self.observed)} не дорівнює M={self.codebook.M}"
            )
        if self.codebook.K != self.spec.K:
            raise ValueError("K кодової книги не збігається з K мережі")
        if self.task is Task.ECC and self.channel is None:
            raise ValueError("Задача ECC потребує параметрів каналу")
        if self.task is Task.LC and self.source is None:
            raise ValueError("Задача LC потребує моделі джерела")
        if self.planted is not None and len(self.planted) != self.codebook.N:
            raise ValueError("Довжина вихідного повідомлення не дорівнює N")

    @property
    def N(self) -> int:
        return self.codebook.N

    @property
    def M(self) -> int:
        return self.codebook.M

    @property
    def K(self) -> int:
        return self.spec.K

    @property
    def rate(self) -> float:
        return self.codebook.rate

    @property
    def y(self) -> np.ndarray:
        return self.observed.as_float()


@dataclass(frozen=True, eq=False)
class DenseBPState:
    """
    Повні площини повідомлень m_{μil} та m̂_{μil} (форма (M, N)) і маргінали m_{il}
    """
    m_msg: np.ndarray
    m_hat: np.ndarray
    m: np.ndarray
    t: int = 0

    def __post_init__(self):
        for name in ('m_msg', 'm_hat', 'm'):
            array = np.array(getattr(self, name), dtype=np.float64)
            array.flags.writeable = False
            object.__setattr__(self, name, array)
        if self.m_msg.shape != self.m_hat.shape:
            raise ValueError("Площини повідомлень мають однакову форму")
        if self.m.shape != (self.m_msg.shape[1],):
            raise ValueError("Маргінали мають довжину N")


@dataclass(frozen=True)
class EnumerationBudget:
    """Межа повного перебору 2^N станів"""
    max_bits: int = 20

    def __post_init__(self):
        if not 1 <= self.max_bits <= 30:
            raise ValueError("max_bits має лежати в [1, 30]")

    @classmethod
    def from_settings(cls) -> 'EnumerationBudget':
        from django.conf import settings

        return cls(getattr(settings, 'BPCODE', {}).get('ENUMERATION_MAX_BITS', cls.max_bits))

    def check(self, N: int):
        if N > self.max_bits:
            raise EnumerationBudgetError(
                f"Перебір 2^{N} станів перевищує бюджет 2^{self.max_bits}"
            )
