"""
Спінові вектори, блокове розбиття та детерміновані потоки випадкових чисел
"""
from dataclasses import dataclass, field
import zlib

import numpy as np


def _as_spin_array(values) -> np.ndarray:
    array = np.asarray(values)
    if array.ndim != 1:
        raise ValueError("Спіновий вектор має бути одновимірним")
    if array.size == 0:
        raise ValueError("Спіновий вектор не може бути порожнім")
    if not np.all((array == 1) | (array == -1)):
        raise ValueError("Кожен елемент спінового вектора має бути +1 або -1")
    spins = array.astype(np.int8)
    spins.flags.writeable = False
    return spins


@dataclass(frozen=True, eq=False)
class SpinVector:
    """Послідовність символів ±1 (повідомлення, кодові слова, оцінки)"""
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values', _as_spin_array(self.values))

    def __len__(self):
        return int(self.values.size)

    def __neg__(self):
        return SpinVector(-self.values)

    def __eq__(self, other):
        if not isinstance(other, SpinVector):
            return NotImplemented
        return len(self) == len(other) and bool(np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash(self.values.tobytes())

    def as_float(self) -> np.ndarray:
        return self.values.astype(np.float64)

    def blocked(self, K: int) -> 'BlockedSpins':
        """Розбиває вектор на K блоків довжини N/K"""
        return BlockedSpins(self, K)

    def with_blocks_negated(self, K: int, negated_blocks) -> 'SpinVector':
        """Повертає копію з інвертованими знаками вказаних блоків"""
        blocks = self.blocked(K).blocks.copy()
        for l in negated_blocks:
            blocks[l] = -blocks[l]
        return SpinVector(blocks.reshape(-1))


@dataclass(frozen=True, eq=False)
class BlockedSpins:
    """K блоків довжини N/K, що є видами на батьківський SpinVector"""
    parent: SpinVector
    K: int

    def __post_init__(self):
        if self.K <= 0:
            raise ValueError("Кількість блоків K має бути додатною")
        if len(self.parent) % self.K != 0:
            raise ValueError(
                f"K={self.K} не ділить довжину вектора N={len(self.parent)}"
            )

    @property
    def N(self) -> int:
        return len(self.parent)

    @property
    def block_size(self) -> int:
        return self.N // self.K

    @property
    def blocks(self) -> np.ndarray:
        """Масив форми (K, N/K)"""
        return self.parent.values.reshape(self.K, self.block_size)

    def __getitem__(self, l: int) -> np.ndarray:
        return self.blocks[l]


def _stream_component(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("Компоненти ідентифікатора потоку мають бути невід'ємними")
        return int(part)
    return zlib.crc32(str(part).encode('utf-8'))


@dataclass(frozen=True)
class SeededStream:
    """
    Детермінований потік випадкових чисел.

    Пара (master_seed, stream_id) однозначно визначає послідовність, тому
    порядок виконання прогонів не впливає на жоден розіграш. Кожен виклик
    generator() починає потік спочатку; для різних розіграшів у межах
    одного прогону використовуйте child().
    """
    master_seed: int
    stream_id: tuple = field(default=())

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2 ** 64:
            raise ValueError("master_seed має бути 64-бітним невід'ємним цілим")
        object.__setattr__(self, 'stream_id', tuple(self.stream_id))

    @classmethod
    def for_trial(cls, master_seed: int, experiment: str, point: int, run: int) -> 'SeededStream':
        """Потік одного прогону в точці сітки експерименту"""
        return cls(master_seed, (experiment, point, run))

    def child(self, *parts) -> 'SeededStream':
        """Похідний потік для окремої мети (повідомлення, кодова книга, канал...)"""
        return SeededStream(self.master_seed, self.stream_id + tuple(parts))

    def generator(self) -> np.random.Generator:
        seed_sequence = np.random.SeedSequence(
            entropy=int(self.master_seed),
            spawn_key=tuple(_stream_component(part) for part in self.stream_id),
        )
        return np.random.Generator(np.random.PCG64(seed_sequence))
