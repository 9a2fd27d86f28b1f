"""Run counters and the derived comparison metrics.

Relative performance and relative lifetime are summarized across runs with
the geometric mean, everything else with the arithmetic mean.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .devices import HybridParams, MemoryParams
    from .engine import TimingConfig

UNBOUNDED = math.inf


@dataclass(frozen=True)
class SimReport:
    accesses: int = 0
    hits: int = 0
    misses: int = 0
    read_hits_fast: int = 0
    read_hits_slow: int = 0
    writes_fast: int = 0  # write hits + fills
    writes_slow: int = 0
    fills_fast: int = 0
    fills_slow: int = 0
    mem_reads: int = 0
    mem_writebacks: int = 0
    total_cycles: int = 0
    instructions: int = 0
    max_writes_slow_block: int = 0
    max_writes_any_block: int = 0
    z_updates: int = 0
    final_z: int = 0
    energy_cache_nj: float = 0.0
    energy_mem_nj: float = 0.0

    @property
    def energy_nj(self) -> float:
        return self.energy_cache_nj + self.energy_mem_nj

    @property
    def hit_rate(self) -> float:
        return self.hits / self.accesses if self.accesses else 0.0

    @property
    def miss_rate(self) -> float:
        return self.misses / self.accesses if self.accesses else 0.0

    def check(self) -> None:
        """Raise AssertionError if the counters are mutually inconsistent."""
        assert self.hits + self.misses == self.accesses, "hits + misses != accesses"
        assert self.writes_fast + self.writes_slow >= self.fills_fast + self.fills_slow
        assert self.fills_fast + self.fills_slow == self.misses == self.mem_reads
        assert self.max_writes_slow_block <= self.max_writes_any_block

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def energy_breakdown(report: SimReport, dev: "HybridParams", timing: "TimingConfig",
                     mem: "MemoryParams") -> tuple[float, float]:
    """Return ``(cache_nj, memory_nj)`` including leakage over the run's duration."""
    sim_ns = report.total_cycles / timing.core_freq_ghz
    fast, slow = dev.fast, dev.slow
    dynamic = (
        report.read_hits_fast * fast.hit_energy_nj
        + report.writes_fast * fast.write_energy_nj
        + report.read_hits_slow * slow.hit_energy_nj
        + report.writes_slow * slow.write_energy_nj
        + report.misses * dev.miss_energy_nj
    )
    cache_nj = dynamic + dev.leakage_w * sim_ns
    mem_nj = (report.mem_reads + report.mem_writebacks) * mem.access_energy_nj + mem.leakage_w * sim_ns
    return cache_nj, mem_nj


def energy(report: SimReport, dev: "HybridParams", timing: "TimingConfig", mem: "MemoryParams") -> float:
    return sum(energy_breakdown(report, dev, timing, mem))


def energy_saving_pct(scheme: float, baseline: float) -> float:
    if baseline == 0:
        raise ValueError("baseline energy must be non-zero")
    return 100.0 * (baseline - scheme) / baseline


def relative_lifetime(scheme_max_writes: int, baseline_max_writes: int) -> float:
    """Baseline-to-scheme ratio of the most-written endurance-limited block.

    A scheme with no writes to endurance-limited blocks has unbounded
    lifetime and yields ``UNBOUNDED`` (``math.inf``).
    """
    if scheme_max_writes < 0 or baseline_max_writes < 0:
        raise ValueError("write counts must be non-negative")
    if scheme_max_writes == 0:
        return UNBOUNDED
    return baseline_max_writes / scheme_max_writes


def mpki(misses: int, instructions: int) -> float:
    if instructions <= 0:
        raise ValueError("instructions must be positive")
    return 1000.0 * misses / instructions


def relative_performance(scheme: SimReport, baseline: SimReport) -> float:
    if scheme.instructions != baseline.instructions:
        raise ValueError(
            f"runs cover different instruction counts ({scheme.instructions} vs {baseline.instructions})"
        )
    if scheme.total_cycles == baseline.total_cycles:
        return 1.0
    if scheme.total_cycles <= 0:
        raise ValueError("scheme run has no elapsed cycles")
    return baseline.total_cycles / scheme.total_cycles


def fast_write_fraction(writes_fast: int, writes_slow: int) -> float:
    """Share of block writes landing in fast ways; NaN when there were no writes."""
    total = writes_fast + writes_slow
    if total == 0:
        return math.nan
    return writes_fast / total


class MeanKind(str, Enum):
    GEOMETRIC = "geometric"
    ARITHMETIC = "arithmetic"


def summarize(values: Sequence[float], kind: MeanKind | str) -> float:
    kind = MeanKind(kind)
    if not values:
        raise ValueError("cannot summarize an empty sequence")
    if kind is MeanKind.ARITHMETIC:
        return math.fsum(values) / len(values)
    if any(v <= 0 for v in values):
        raise ValueError("geometric mean needs strictly positive values")
    if any(math.isinf(v) for v in values):
        return UNBOUNDED
    return math.exp(math.fsum(math.log(v) for v in values) / len(values))
