"""
GoF Pattern: Strategy
Фактор апостеріорного розподілу для кожної задачі:
ймовірність каналу (ECC) або больцманівська вага спотворення (LC).
Обидва мають вигляд G = c0(y) + c1 * y * вихід мережі.
"""
from abc import ABC, abstractmethod

import numpy as np

from coding_app.domain.bp import Problem, Task
from coding_app.domain.channels import ChannelParams


class FactorStrategy(ABC):
    """Абстрактна стратегія фактора"""

    @abstractmethod
    def coefficients(self, y) -> tuple[np.ndarray, float]:
        """Повертає (c0(y), c1)"""
        pass

    @abstractmethod
    def log_weight(self, y, output) -> np.ndarray:
        """Логарифм фактора для виходу мережі output"""
        pass

    def value(self, y, output) -> np.ndarray:
        c0, c1 = self.coefficients(y)
        return c0 + c1 * np.asarray(y, dtype=np.float64) * np.asarray(output, dtype=np.float64)


class ChannelFactor(FactorStrategy):
    """P(y | y0) бінарного асиметричного каналу, у степені beta для ваг станів"""

    def __init__(self, channel: ChannelParams, beta: float = 1.0):
        self.channel = channel
        self.beta = float(beta)

    def coefficients(self, y):
        p, r = self.channel.p, self.channel.r
        y = np.asarray(y, dtype=np.float64)
        return 0.5 + 0.5 * y * (r - p), 0.5 * (1.0 - r - p)

    def log_weight(self, y, output):
        with np.errstate(divide='ignore'):
            return self.beta * np.log(self.value(y, output))


class DistortionFactor(FactorStrategy):
    """e^{-β} + (1 - e^{-β}) Θ(y * вихід)"""

    def __init__(self, beta: float):
        if not beta > 0:
            raise ValueError("Обернена температура beta має бути додатною")
        self.beta = float(beta)

    def coefficients(self, y):
        floor = np.exp(-self.beta)
        half_gap = -0.5 * np.expm1(-self.beta)
        c0 = np.full(np.shape(y), floor + half_gap, dtype=np.float64)
        return c0, half_gap

    def log_weight(self, y, output):
        agree = np.asarray(y, dtype=np.float64) * np.asarray(output, dtype=np.float64) >= 0
        return np.where(agree, 0.0, -self.beta)


class FactorStrategyFactory:
    """Factory для створення факторів"""

    @staticmethod
    def create_factor(problem: Problem, beta: float = 1.0) -> FactorStrategy:
        """
        Створює фактор для задачі.

        Args:
            problem: Задача ECC або LC
            beta: Обернена температура (для ECC лише у вагах станів)

        Returns:
            Стратегія фактора
        """
        if problem.task is Task.ECC:
            return ChannelFactor(problem.channel, beta)
        return DistortionFactor(beta)
