"""
Service Layer для операцій над спіновими векторами
"""
import logging

import numpy as np

from coding_app.domain.spins import SeededStream, SpinVector

logger = logging.getLogger(__name__)


def _check_lengths(a: SpinVector, b: SpinVector):
    if len(a) != len(b):
        raise ValueError(f"Довжини векторів не збігаються: {len(a)} і {len(b)}")


class SpinService:
    """Метрики та генерація спінових векторів"""

    @staticmethod
    def overlap(a: SpinVector, b: SpinVector) -> float:
        """
        Нормований скалярний добуток (1/N) Σ a_i b_i.

        Raises:
            ValueError: Якщо довжини різні
        """
        _check_lengths(a, b)
        return float(np.dot(a.as_float(), b.as_float()) / len(a))

    @staticmethod
    def blockwise_abs_overlap(a: SpinVector, b: SpinVector, K: int) -> float:
        """
        Середнє по блоках |overlap(a_l, b_l)|.

        Не змінюється при незалежній зміні знаку будь-якого блоку, тому
        є метрикою успіху за наявності 2^K-кратного виродження коду.

        Raises:
            ValueError: Якщо довжини різні або K не ділить N
        """
        _check_lengths(a, b)
        blocks_a = a.blocked(K).blocks.astype(np.float64)
        blocks_b = b.blocked(K).blocks.astype(np.float64)
        per_block = np.einsum('ki,ki->k', blocks_a, blocks_b) / blocks_a.shape[1]
        return float(np.mean(np.abs(per_block)))

    @staticmethod
    def hamming_distortion(y: SpinVector, yhat: SpinVector) -> float:
        """Частка позицій, де y та ŷ не збігаються"""
        _check_lengths(y, yhat)
        return float(np.count_nonzero(y.values != yhat.values) / len(y))

    @staticmethod
    def draw_uniform_spins(n: int, stream: SeededStream) -> SpinVector:
        """
        Незалежні рівноймовірні ±1.

        Raises:
            ValueError: Якщо n <= 0
        """
        if n <= 0:
            raise ValueError("Довжина вектора має бути додатною")
        bits = stream.generator().integers(0, 2, size=n)
        return SpinVector(np.where(bits == 1, 1, -1))

    @staticmethod
    def pairwise_overlaps(vectors: list[SpinVector]) -> list[float]:
        """Перекриття всіх C(n, 2) пар у порядку (i, j), i < j"""
        if not vectors:
            return []
        matrix = np.stack([v.as_float() for v in vectors])
        gram = matrix @ matrix.T / matrix.shape[1]
        rows, cols = np.triu_indices(len(vectors), k=1)
        return [float(value) for value in gram[rows, cols]]
