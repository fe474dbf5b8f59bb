"""
Service Layer для деревоподібних мереж
Використовує Strategy для кожного типу мережі
"""
import logging
from math import sqrt

import numpy as np

from coding_app.domain.networks import Codebook, NetworkSpec
from coding_app.domain.spins import BlockedSpins, SpinVector
from coding_app.patterns.network_strategy import NetworkStrategyFactory, window

logger = logging.getLogger(__name__)


class NetworkService:
    """Прямий прохід мереж та статистика їхнього виходу"""

    @staticmethod
    def transfer_fk(x: float, k: float) -> int:
        """
        Немонотонна передавальна функція f_k.

        Returns:
            +1, якщо |x| <= k, інакше -1
        """
        if k < 0:
            raise ValueError("Поріг k має бути невід'ємним")
        return int(window(x, k))

    @staticmethod
    def local_fields(s: BlockedSpins, x: BlockedSpins) -> np.ndarray:
        """
        Локальні поля √(K/N) s_l · x_l для кожного блоку.

        Raises:
            ValueError: Якщо блокові структури не збігаються
        """
        if s.K != x.K or s.N != x.N:
            raise ValueError("Блокові структури s та x не збігаються")
        products = np.einsum(
            'ki,ki->k', s.blocks.astype(np.float64), x.blocks.astype(np.float64)
        )
        return sqrt(s.K / s.N) * products

    @staticmethod
    def codebook_fields(s: SpinVector, codebook: Codebook) -> np.ndarray:
        """Поля для всіх шаблонів кодової книги, форма (M, K)"""
        if len(s) != codebook.N:
            raise ValueError(f"Довжина повідомлення {len(s)} не дорівнює N={codebook.N}")
        blocks = s.blocked(codebook.K).blocks.astype(np.float64)
        products = np.einsum('mki,ki->mk', codebook.blocked.astype(np.float64), blocks)
        return sqrt(codebook.K / codebook.N) * products

    @staticmethod
    def forward(spec: NetworkSpec, s: BlockedSpins, x: BlockedSpins) -> int:
        """
        Вихід мережі для одного вхідного шаблону.

        Raises:
            ValueError: Якщо K мережі не збігається з блоковою структурою
        """
        if spec.K != s.K:
            raise ValueError(f"Мережа з K={spec.K} не відповідає розбиттю на {s.K} блоків")
        fields = NetworkService.local_fields(s, x)
        strategy = NetworkStrategyFactory.create_strategy(spec)
        return int(strategy.forward(fields))

    @staticmethod
    def encode(spec: NetworkSpec, s: SpinVector, codebook: Codebook) -> SpinVector:
        """
        Кодове слово y0^μ = forward(s, x^μ), μ = 1..M.

        Raises:
            ValueError: Якщо розміри не збігаються
        """
        if spec.K != codebook.K:
            raise ValueError("K мережі не збігається з K кодової книги")
        fields = NetworkService.codebook_fields(s, codebook)
        strategy = NetworkStrategyFactory.create_strategy(spec)
        return SpinVector(strategy.forward(fields))

    @staticmethod
    def output_bias(spec: NetworkSpec) -> float:
        """
        P(вихід = +1) при незалежних стандартних нормальних локальних полях.

        Returns:
            Ймовірність у [0, 1] з урахуванням полярності виходу
        """
        return NetworkStrategyFactory.create_strategy(spec).output_bias()
