"""
Допоміжні чисельні функції: знак з правилом sgn(0) = +1, компенсоване
підсумовування та перебір станів прихованих елементів
"""
from functools import lru_cache

import numpy as np


def sgn(values) -> np.ndarray:
    """Знак з правилом sgn(0) = +1"""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


def compensated_sum(terms: np.ndarray, axis: int = 0) -> np.ndarray:
    """
    Підсумовування Ноймаєра вздовж осі.

    Результат практично не залежить від порядку доданків, що потрібно для
    τ-сум ядер CTH/CTO.
    """
    terms = np.moveaxis(np.asarray(terms, dtype=np.float64), axis, 0)
    total = np.zeros(terms.shape[1:], dtype=np.float64)
    compensation = np.zeros_like(total)
    for term in terms:
        updated = total + term
        big = np.abs(total) >= np.abs(term)
        compensation += np.where(big, (total - updated) + term, (term - updated) + total)
        total = updated
    return total + compensation


@lru_cache(maxsize=None)
def tau_pairs(K: int) -> np.ndarray:
    """
    Представники пар (τ, -τ) станів K прихованих елементів.

    Повертає масив форми (2^(K-1), K) з τ_0 = +1; кожен рядок разом зі
    своїм протилежним покриває всі 2^K станів рівно один раз.
    """
    if K < 1:
        raise ValueError("K має бути додатним")
    count = 2 ** (K - 1)
    codes = np.arange(count, dtype=np.int64)
    tail = (codes[:, None] >> np.arange(K - 2, -1, -1)) & 1 if K > 1 else np.zeros((1, 0), dtype=np.int64)
    rows = np.concatenate([np.ones((count, 1), dtype=np.int64), np.where(tail == 1, 1, -1)], axis=1)
    rows = rows.astype(np.float64)
    rows.flags.writeable = False
    return rows


def exclusive_products(factors: np.ndarray) -> np.ndarray:
    """Добутки по останній осі з виключенням поточного елемента (без ділення)"""
    factors = np.asarray(factors, dtype=np.float64)
    ones = np.ones(factors.shape[:-1] + (1,), dtype=np.float64)
    prefix = np.cumprod(np.concatenate([ones, factors[..., :-1]], axis=-1), axis=-1)
    suffix = np.cumprod(np.concatenate([ones, factors[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return prefix * suffix


def gray_codes(start: int, stop: int) -> np.ndarray:
    """Коди Грея g = i ^ (i >> 1) для i у [start, stop)"""
    indices = np.arange(start, stop, dtype=np.int64)
    return indices ^ (indices >> 1)


def codes_to_spins(codes: np.ndarray, N: int) -> np.ndarray:
    """Перетворює цілі коди на рядки ±1; старший біт - перша координата, біт 1 -> +1"""
    shifts = np.arange(N - 1, -1, -1, dtype=np.int64)
    bits = (np.asarray(codes, dtype=np.int64)[:, None] >> shifts) & 1
    return np.where(bits == 1, 1.0, -1.0)
