"""
Опис деревоподібних багатошарових перцептронів та кодової книги
"""
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

from coding_app.domain.spins import BlockedSpins, SeededStream, SpinVector

# Межа точного перебору τ-станів у ядрах CTH/CTO
MAX_TAU_UNITS = 15


class NetworkKind(str, Enum):
    """Тип мережі"""
    PTH = 'pth'
    CTH = 'cth'
    CTO = 'cto'

    @classmethod
    def parse(cls, value) -> 'NetworkKind':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"Невідомий тип мережі: {value}") from None

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class NetworkSpec:
    """
    Тип мережі, кількість прихованих елементів K та поріг k.

    polarity = -1 інвертує вихід мережі (використовується для джерел з
    ймовірністю +1 меншою за 0.5).
    """
    kind: NetworkKind
    K: int
    k: float = 0.0
    polarity: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'kind', NetworkKind.parse(self.kind))
        object.__setattr__(self, 'k', float(self.k))
        if self.K < 1:
            raise ValueError("Кількість прихованих елементів K має бути додатною")
        if self.K > MAX_TAU_UNITS:
            raise ValueError(f"K={self.K} перевищує межу точного перебору {MAX_TAU_UNITS}")
        if self.kind is NetworkKind.CTH and self.K % 2 == 0:
            raise ValueError("CTH визначена лише для непарної кількості прихованих елементів")
        if self.kind is NetworkKind.CTO and self.K < 2:
            raise ValueError("CTO потребує K >= 2")
        if not np.isfinite(self.k) or self.k < 0:
            raise ValueError("Поріг k має бути невід'ємним скінченним числом")
        if self.polarity not in (1, -1):
            raise ValueError("Полярність виходу має бути +1 або -1")

    def with_threshold(self, k: float) -> 'NetworkSpec':
        return replace(self, k=k)


@dataclass(frozen=True, eq=False)
class Codebook:
    """M вхідних шаблонів довжини N, кожен розбитий на K блоків"""
    patterns: np.ndarray
    K: int

    def __post_init__(self):
        patterns = np.asarray(self.patterns)
        if patterns.ndim != 2 or patterns.size == 0:
            raise ValueError("Кодова книга має бути непорожньою матрицею M x N")
        if not np.all((patterns == 1) | (patterns == -1)):
            raise ValueError("Елементи кодової книги мають бути +1 або -1")
        if self.K <= 0 or patterns.shape[1] % self.K != 0:
            raise ValueError(f"K={self.K} не ділить довжину шаблонів N={patterns.shape[1]}")
        patterns = patterns.astype(np.int8)
        patterns.flags.writeable = False
        object.__setattr__(self, 'patterns', patterns)

    @classmethod
    def random(cls, M: int, N: int, K: int, stream: SeededStream) -> 'Codebook':
        """Незалежні рівномірні ±1 шаблони"""
        if M <= 0 or N <= 0:
            raise ValueError("Розміри кодової книги мають бути додатними")
        rng = stream.generator()
        patterns = np.where(rng.integers(0, 2, size=(M, N)) == 1, 1, -1)
        return cls(patterns, K)

    @property
    def M(self) -> int:
        return int(self.patterns.shape[0])

    @property
    def N(self) -> int:
        return int(self.patterns.shape[1])

    @property
    def rate(self) -> float:
        return self.N / self.M

    @property
    def blocked(self) -> np.ndarray:
        """Масив форми (M, K, N/K)"""
        return self.patterns.reshape(self.M, self.K, self.N // self.K)

    @cached_property
    def blocked_float(self) -> np.ndarray:
        """Блоковий вигляд у float64 для обчислень BP"""
        return self.blocked.astype(np.float64)

    def pattern(self, mu: int) -> BlockedSpins:
        return SpinVector(self.patterns[mu]).blocked(self.K)

    def with_blocks_negated(self, negated_blocks) -> 'Codebook':
        blocked = self.blocked.copy()
        for l in negated_blocks:
            blocked[:, l, :] = -blocked[:, l, :]
        return Codebook(blocked.reshape(self.M, self.N), self.K)

    def permuted(self, order) -> 'Codebook':
        return Codebook(self.patterns[np.asarray(order)], self.K)
