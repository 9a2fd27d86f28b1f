"""Victim selection over a set's LRU order array.

The ``*_select_victim`` functions validate their input; ``lru_victim`` and
``dfb_victim`` are the unchecked forms used on the simulation hot path.

``lru_order[w]`` is the recency rank of physical way ``w`` (0-based list
index): 1 is most recently used, ``assoc`` least. Ways ``0..n_fast-1`` are
the fast (SRAM) ways. Returned victims are 0-based way indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence


class Policy(str, Enum):
    LRU = "lru"
    DFB = "dfb"


# (upper bound on interval miss rate, z) checked in order; the default z
# applies when the miss rate reaches every bound.
DEFAULT_THRESHOLDS: tuple[tuple[float, int], ...] = ((0.80, 5), (0.90, 4), (0.99, 3))
DEFAULT_FALLBACK_Z = 2


@dataclass(frozen=True)
class ZTable:
    bounds: tuple[tuple[float, int], ...] = DEFAULT_THRESHOLDS
    fallback: int = DEFAULT_FALLBACK_Z

    def __post_init__(self):
        previous = -1.0
        for bound, _ in self.bounds:
            if bound <= previous:
                raise ValueError("z table bounds must be strictly increasing")
            previous = bound

    def z_values(self) -> list[int]:
        return [z for _, z in self.bounds] + [self.fallback]

    @classmethod
    def parse(cls, text: str) -> "ZTable":
        """Parse ``"0.8:5, 0.9:4, 0.99:3, *:2"``; ``*`` names the fallback."""
        bounds = []
        fallback = None
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            key, sep, z = item.partition(":")
            if not sep:
                raise ValueError(f"bad threshold entry {item!r}, expected 'miss_rate:z'")
            if key.strip() == "*":
                fallback = int(z)
            else:
                bounds.append((float(key), int(z)))
        if fallback is None:
            raise ValueError("threshold table needs a '*:z' fallback entry")
        return cls(tuple(bounds), fallback)

    def __str__(self) -> str:
        parts = [f"{b:g}:{z}" for b, z in self.bounds] + [f"*:{self.fallback}"]
        return ", ".join(parts)


def _check_order(lru_order: Sequence[int], assoc: int) -> None:
    if len(lru_order) != assoc or sorted(lru_order) != list(range(1, assoc + 1)):
        raise ValueError(f"lru_order {list(lru_order)} is not a permutation of 1..{assoc}")


def lru_victim(lru_order: Sequence[int], assoc: int) -> int:
    return lru_order.index(assoc)


def dfb_victim(lru_order: Sequence[int], n_fast: int, z: int, assoc: int) -> int:
    for w in range(n_fast):
        if lru_order[w] >= z:
            return w
    return lru_order.index(assoc)


def lru_select_victim(lru_order: Sequence[int], assoc: int) -> int:
    _check_order(lru_order, assoc)
    return lru_victim(lru_order, assoc)


def dfb_select_victim(lru_order: Sequence[int], n_fast: int, z: int, assoc: int) -> int:
    """Evict the first fast way that has sunk to depth ``z`` or below, else the LRU way.

    ``z = assoc + 1`` or ``n_fast = 0`` makes this identical to LRU.
    """
    _check_order(lru_order, assoc)
    if not 0 <= n_fast <= assoc:
        raise ValueError(f"n_fast must be in [0, {assoc}]")
    if not 2 <= z <= assoc + 1:
        raise ValueError(f"z must be in [2, {assoc + 1}], got {z}")
    return dfb_victim(lru_order, n_fast, z, assoc)


def update_z(miss_rate: float, table: ZTable | None = None) -> int:
    if not 0.0 <= miss_rate <= 1.0:
        raise ValueError(f"miss rate must be in [0, 1], got {miss_rate}")
    table = table or ZTable()
    for bound, z in table.bounds:
        if miss_rate < bound:
            return z
    return table.fallback


@dataclass
class PolicyState:
    """Mutable DFB threshold plus the access/miss counts of the running interval."""

    z: int
    table: ZTable = ZTable()
    interval_accesses: int = 0
    interval_misses: int = 0

    def record(self, hit: bool) -> None:
        self.interval_accesses += 1
        if not hit:
            self.interval_misses += 1

    def interval_tick(self) -> float | None:
        """Close the interval. Returns the interval miss rate, or None if it was empty."""
        rate = None
        if self.interval_accesses > 0:
            rate = self.interval_misses / self.interval_accesses
            self.z = update_z(rate, self.table)
        self.interval_accesses = 0
        self.interval_misses = 0
        return rate
