"""
Вхідні та вихідні величини гаусових ядер фактора
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from coding_app.domain.channels import ChannelParams
from coding_app.domain.networks import NetworkSpec


def _readonly(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class KernelInput:
    """
    Кавітаційні поля для набору факторів.

    a має форму (..., K) і дорівнює ∧̄ - ∧̂; q має форму (K,) або (..., K);
    y має форму (...) і містить спостережений символ кожного фактора.
    Для ECC задається channel, для LC задається beta.
    """
    spec: NetworkSpec
    a: np.ndarray
    q: np.ndarray
    y: np.ndarray
    channel: Optional[ChannelParams] = None
    beta: Optional[float] = None

    def __post_init__(self):
        a = _readonly(np.atleast_1d(self.a))
        if a.shape[-1] != self.spec.K:
            raise ValueError(f"Остання вісь поля a має довжину {a.shape[-1]}, очікується K={self.spec.K}")
        q = _readonly(np.broadcast_to(self.q, a.shape))
        y = np.broadcast_to(np.asarray(self.y, dtype=np.float64), a.shape[:-1])
        if not np.all((y == 1) | (y == -1)):
            raise ValueError("Спостережені символи y мають бути +1 або -1")
        if np.any(q < 0) or np.any(q >= 1):
            raise ValueError("Перекриття q_l має лежати в [0, 1)")
        if (self.channel is None) == (self.beta is None):
            raise ValueError("Потрібно задати або параметри каналу (ECC), або beta (LC)")
        if self.beta is not None and not self.beta > 0:
            raise ValueError("Обернена температура beta має бути додатною")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'q', q)
        object.__setattr__(self, 'y', _readonly(y))

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(1.0 - self.q)

    @property
    def w_plus(self) -> np.ndarray:
        return (self.spec.k + self.a) / self.sigma

    @property
    def w_minus(self) -> np.ndarray:
        return (self.spec.k - self.a) / self.sigma

    @property
    def w(self) -> np.ndarray:
        """Поле знакового прихованого елемента (CTO)"""
        return self.a / self.sigma

    @property
    def is_lossy(self) -> bool:
        return self.beta is not None


@dataclass(frozen=True, eq=False)
class KernelOutput:
    """Четвірка (U, V, Ũ, Ṽ) для кожної пари (μ, l); усі масиви форми (..., K)"""
    U: np.ndarray
    V: np.ndarray
    U_tilde: np.ndarray
    V_tilde: np.ndarray

    def __post_init__(self):
        shape = np.shape(self.U)
        for name in ('U', 'V', 'U_tilde', 'V_tilde'):
            value = _readonly(np.broadcast_to(getattr(self, name), shape))
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class KernelEstimate:
    """Монте-Карло оцінка U та V з їхніми стандартними похибками"""
    U: np.ndarray
    V: float
    U_stderr: np.ndarray
    V_stderr: float
    samples: int
