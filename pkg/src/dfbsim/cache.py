"""Set-associative, way-partitioned cache state.

Write-back, write-allocate. Every miss installs the block (no bypass) and
the fill counts as one write to the receiving way. Wear is counted per
physical way slot and accumulates across occupancies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from .replacement import Policy, ZTable, dfb_victim, lru_victim


class Region(str, Enum):
    FAST = "fast"
    SLOW = "slow"


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class CacheConfig:
    capacity_bytes: int
    assoc: int = 8
    block_bytes: int = 64
    n_fast: int = 2
    policy: Policy = Policy.LRU
    banks: int = 8
    interval_cycles: int = 5_000_000
    z_initial: int = 4
    adapt_z: bool = True
    z_table: ZTable | None = None
    prefer_invalid: bool = False

    def __post_init__(self):
        object.__setattr__(self, "policy", Policy(self.policy))
        if self.assoc < 1 or not _is_pow2(self.block_bytes):
            raise ValueError("assoc must be >= 1 and block_bytes a power of two")
        line_bytes = self.assoc * self.block_bytes
        if self.capacity_bytes <= 0 or self.capacity_bytes % line_bytes:
            raise ValueError(
                f"capacity {self.capacity_bytes} is not a multiple of assoc*block_bytes ({line_bytes})"
            )
        if not _is_pow2(self.capacity_bytes // line_bytes):
            raise ValueError(f"number of sets ({self.capacity_bytes // line_bytes}) must be a power of two")
        if not 0 <= self.n_fast <= self.assoc:
            raise ValueError(f"n_fast must be in [0, {self.assoc}], got {self.n_fast}")
        if self.banks < 1:
            raise ValueError("banks must be >= 1")
        if self.interval_cycles < 1:
            raise ValueError("interval_cycles must be >= 1")
        if self.policy is Policy.DFB:
            if not 2 <= self.z_initial <= self.assoc:
                raise ValueError(f"z_initial must be in [2, {self.assoc}], got {self.z_initial}")
            table = self.effective_z_table()
            if self.adapt_z and table is None:
                raise ValueError(
                    "DFB z adaptation thresholds are defined for assoc 8 / n_fast 2 only; "
                    "supply dfb_thresholds or disable adapt_z"
                )
            if table is not None and any(not 2 <= z <= self.assoc for z in table.z_values()):
                raise ValueError(f"threshold table z values must lie in [2, {self.assoc}]")

    @property
    def num_sets(self) -> int:
        return self.capacity_bytes // (self.assoc * self.block_bytes)

    def effective_z_table(self) -> ZTable | None:
        if self.z_table is not None:
            return self.z_table
        if self.assoc == 8 and self.n_fast == 2:
            return ZTable()
        return None

    def region_of(self, way: int) -> Region:
        return Region.FAST if way < self.n_fast else Region.SLOW


def decompose_address(addr: int, config: CacheConfig) -> tuple[int, int]:
    """Return ``(tag, set_index)`` for a byte address; the offset is dropped."""
    block = addr // config.block_bytes
    return block // config.num_sets, block % config.num_sets


@dataclass
class SetState:
    """Per-way metadata of one set, as parallel lists indexed by physical way."""

    tags: list[int]
    valid: list[bool]
    dirty: list[bool]
    order: list[int]
    writes: list[int]

    @classmethod
    def empty(cls, assoc: int) -> "SetState":
        return cls(
            tags=[-1] * assoc,
            valid=[False] * assoc,
            dirty=[False] * assoc,
            order=list(range(1, assoc + 1)),
            writes=[0] * assoc,
        )


def promote_mru(order: list[int], way: int) -> list[int]:
    """Move ``way`` to the top of the stack in place and return ``order``."""
    old = order[way]
    if old != 1:
        for w, o in enumerate(order):
            if o < old:
                order[w] = o + 1
        order[way] = 1
    return order


@dataclass(frozen=True)
class AccessOutcome:
    hit: bool
    way: int
    region_touched: Region
    victim_dirty: bool = False
    writeback_issued: bool = False
    fill_write: bool = False
    victim_tag: int | None = None


VictimFn = Callable[[SetState], int]


@dataclass
class CacheState:
    config: CacheConfig
    sets: list[SetState] = field(init=False)
    z: int = field(init=False)

    def __post_init__(self):
        self.sets = [SetState.empty(self.config.assoc) for _ in range(self.config.num_sets)]
        self.z = self.config.z_initial

    def victim_fn(self) -> VictimFn:
        cfg = self.config
        assoc, n_fast = cfg.assoc, cfg.n_fast
        if cfg.policy is Policy.LRU:
            pick = lambda s: lru_victim(s.order, assoc)  # noqa: E731
        else:
            pick = lambda s: dfb_victim(s.order, n_fast, self.z, assoc)  # noqa: E731
        if not cfg.prefer_invalid:
            return pick

        def prefer_invalid(s: SetState) -> int:
            # invalid blocks always sit below valid ones, so the LRU way is invalid if any is
            w = lru_victim(s.order, assoc)
            return w if not s.valid[w] else pick(s)

        return prefer_invalid

    def touch(self, is_write: bool, tag: int, index: int, victim_fn: VictimFn) -> tuple[bool, int, int, bool]:
        """Apply one access to set ``index``.

        Returns ``(hit, way, victim_tag, victim_dirty)``; ``victim_tag`` is -1
        on a hit or when the miss filled an invalid way.
        """
        s = self.sets[index]
        tags = s.tags
        if tag in tags:
            way = tags.index(tag)
            if is_write:
                s.dirty[way] = True
                s.writes[way] += 1
            promote_mru(s.order, way)
            return True, way, -1, False
        way = victim_fn(s)
        victim_tag = tags[way]  # -1 when invalid
        victim_dirty = s.valid[way] and s.dirty[way]
        tags[way] = tag
        s.valid[way] = True
        s.dirty[way] = is_write
        s.writes[way] += 1
        promote_mru(s.order, way)
        return False, way, victim_tag, victim_dirty

    def access(self, is_write: bool, addr: int, victim_fn: VictimFn | None = None) -> AccessOutcome:
        tag, index = decompose_address(addr, self.config)
        hit, way, victim_tag, victim_dirty = self.touch(is_write, tag, index, victim_fn or self.victim_fn())
        return AccessOutcome(
            hit=hit,
            way=way,
            region_touched=self.config.region_of(way),
            victim_dirty=victim_dirty,
            writeback_issued=victim_dirty,
            fill_write=not hit,
            victim_tag=None if victim_tag == -1 else victim_tag,
        )

    def block_address(self, tag: int, index: int) -> int:
        return (tag * self.config.num_sets + index) * self.config.block_bytes

    def max_writes(self, ways: Sequence[int] | None = None) -> int:
        ways = range(self.config.assoc) if ways is None else ways
        return max((s.writes[w] for s in self.sets for w in ways), default=0)


def init_cache(config: CacheConfig) -> CacheState:
    """Empty cache; every set's stack starts as ways 1..assoc with fast ways on top."""
    return CacheState(config)
