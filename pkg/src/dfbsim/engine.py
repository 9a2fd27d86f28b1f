"""Trace-driven timing and accounting for one cache design.

Timing model: accesses issue in trace order and never start before the
previous access started. An access also waits for its bank
(``set_index mod banks``) to be free, then holds the bank for its whole
service latency. With one bank this serializes every access; with more banks,
accesses to different banks overlap. Writebacks are posted and cost no time.
Latencies are kept in ns and converted to cycles (ceiling) for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, NamedTuple

from .cache import AccessOutcome, CacheConfig, CacheState, Region
from .devices import DeviceParams, HybridParams, MemoryParams, uniform
from .metrics import SimReport, energy_breakdown
from .replacement import Policy, PolicyState, ZTable
from .trace import AccessRecord, Trace


@dataclass(frozen=True)
class TimingConfig:
    core_freq_ghz: float = 2.0
    mem_latency_cycles: int = 360

    def __post_init__(self):
        if self.core_freq_ghz <= 0 or self.mem_latency_cycles < 0:
            raise ValueError("core_freq_ghz must be positive and mem_latency_cycles non-negative")

    @property
    def mem_latency_ns(self) -> float:
        return self.mem_latency_cycles / self.core_freq_ghz

    def to_cycles(self, ns: float) -> int:
        # guard against float noise pushing an exact cycle count up by one
        return math.ceil(ns * self.core_freq_ghz - 1e-9)


class EventKind(str, Enum):
    HIT_FAST = "HIT_FAST"
    HIT_SLOW = "HIT_SLOW"
    MISS = "MISS"
    WRITE_FAST = "WRITE_FAST"
    WRITE_SLOW = "WRITE_SLOW"
    FILL_FAST = "FILL_FAST"
    FILL_SLOW = "FILL_SLOW"
    MEM_READ = "MEM_READ"
    MEM_WRITEBACK = "MEM_WRITEBACK"


class SimEvent(NamedTuple):
    kind: EventKind
    cycle: int
    set_index: int
    way: int


class ZUpdate(NamedTuple):
    cycle: int
    accesses: int
    misses: int
    miss_rate: float | None
    z: int


@dataclass
class RunResult:
    report: SimReport
    events: list[SimEvent] | None = None
    z_history: list[ZUpdate] = field(default_factory=list)

    def __iter__(self):
        # allows ``report, events = run(...)``
        return iter((self.report, self.events))


def as_hybrid(dev: DeviceParams | HybridParams, cfg: CacheConfig) -> HybridParams:
    if isinstance(dev, HybridParams):
        if dev.assoc != cfg.assoc or dev.n_fast != cfg.n_fast:
            raise ValueError(
                f"device split {dev.n_fast}/{dev.assoc} does not match cache config {cfg.n_fast}/{cfg.assoc}"
            )
        return dev
    hybrid = uniform(dev, cfg.assoc)
    if hybrid.n_fast != cfg.n_fast:
        raise ValueError(
            f"single-technology device implies n_fast={hybrid.n_fast}, cache config has {cfg.n_fast}"
        )
    return hybrid


# indexed by region: 0 fast, 1 slow
_HIT_KINDS = (EventKind.HIT_FAST, EventKind.HIT_SLOW)
_WRITE_KINDS = (EventKind.WRITE_FAST, EventKind.WRITE_SLOW)
_FILL_KINDS = (EventKind.FILL_FAST, EventKind.FILL_SLOW)


def service_latency(outcome: AccessOutcome, dev: HybridParams, is_write: bool,
                    timing: TimingConfig | None = None) -> float:
    """Latency in ns of one access given where it landed."""
    region = dev.fast if outcome.region_touched is Region.FAST else dev.slow
    if outcome.hit:
        return region.write_latency_ns if is_write else region.hit_latency_ns
    timing = timing or TimingConfig()
    return dev.miss_latency_ns + timing.mem_latency_ns + region.write_latency_ns


def run(
    trace: Trace | Iterable[AccessRecord],
    cache_cfg: CacheConfig,
    dev: DeviceParams | HybridParams,
    timing: TimingConfig | None = None,
    *,
    mem: MemoryParams | None = None,
    warmup_accesses: int = 0,
    record_events: bool = False,
) -> RunResult:
    """Simulate ``trace`` on one cache design.

    The first ``warmup_accesses`` records update cache and policy state but
    are excluded from every counter, event, and the reported time.
    """
    timing = timing or TimingConfig()
    mem = mem or MemoryParams()
    hdev = as_hybrid(dev, cache_cfg)
    if not isinstance(trace, Trace):
        trace = Trace.from_records(trace)

    cache = CacheState(cache_cfg)
    victim_fn = cache.victim_fn()
    dfb_adapt = cache_cfg.policy is Policy.DFB and cache_cfg.adapt_z
    policy = PolicyState(cache.z, cache_cfg.effective_z_table() or ZTable())
    interval = cache_cfg.interval_cycles
    next_boundary = interval

    num_sets = cache_cfg.num_sets
    block_bytes = cache_cfg.block_bytes
    banks = cache_cfg.banks
    bank_free = [0.0] * banks
    fast, slow = hdev.fast, hdev.slow
    read_ns = (fast.hit_latency_ns, slow.hit_latency_ns)
    write_ns = (fast.write_latency_ns, slow.write_latency_ns)
    miss_ns = hdev.miss_latency_ns + timing.mem_latency_ns
    n_fast = cache_cfg.n_fast

    freq = timing.core_freq_ghz
    counting = warmup_accesses <= 0
    read_hits = [0, 0]
    writes = [0, 0]
    fills = [0, 0]
    hits = misses = writebacks = accesses = 0
    interval_accesses = interval_misses = 0
    start = 0.0
    now = 0.0
    t0 = 0.0
    icount0 = 0
    last_icount = 0
    events: list[SimEvent] | None = [] if record_events else None
    z_history: list[ZUpdate] = []
    wear_base: list[list[int]] | None = None

    sets = cache.sets
    touch = cache.touch
    for i, (is_write, addr, icount) in enumerate(trace.columns()):
        if not counting and i == warmup_accesses:
            counting = True
            t0 = now
            icount0 = last_icount
            wear_base = [list(s.writes) for s in sets]
        last_icount = icount

        block = addr // block_bytes
        index = block % num_sets
        hit, way, _, wb = touch(is_write, block // num_sets, index, victim_fn)
        r = 0 if way < n_fast else 1
        if hit:
            svc = write_ns[r] if is_write else read_ns[r]
        else:
            svc = miss_ns + write_ns[r]
        bank = index % banks
        free = bank_free[bank]
        if free > start:
            start = free
        done = start + svc
        bank_free[bank] = done
        if done > now:
            now = done

        if counting:
            accesses += 1
            if hit:
                hits += 1
                if is_write:
                    writes[r] += 1
                else:
                    read_hits[r] += 1
            else:
                misses += 1
                writes[r] += 1
                fills[r] += 1
                if wb:
                    writebacks += 1
            if events is not None:
                cyc = timing.to_cycles(start)
                if hit:
                    kind = (_WRITE_KINDS if is_write else _HIT_KINDS)[r]
                    events.append(SimEvent(kind, cyc, index, way))
                else:
                    events.append(SimEvent(EventKind.MISS, cyc, index, way))
                    if wb:
                        events.append(SimEvent(EventKind.MEM_WRITEBACK, cyc, index, way))
                    events.append(SimEvent(EventKind.MEM_READ, cyc, index, way))
                    events.append(SimEvent(_FILL_KINDS[r], cyc, index, way))

        if dfb_adapt:
            interval_accesses += 1
            if not hit:
                interval_misses += 1
            # same test as to_cycles(now) >= next_boundary, without the call
            if now * freq - 1e-9 > next_boundary - 1:
                clock = timing.to_cycles(now)
                policy.interval_accesses = interval_accesses
                policy.interval_misses = interval_misses
                rate = policy.interval_tick()
                cache.z = policy.z
                z_history.append(ZUpdate(clock, interval_accesses, interval_misses, rate, policy.z))
                interval_accesses = interval_misses = 0
                next_boundary = (clock // interval + 1) * interval

    if not counting:
        # warm-up consumed the whole trace
        t0 = now
        icount0 = last_icount
        wear_base = [list(s.writes) for s in sets]

    slow_ways = range(n_fast, cache_cfg.assoc)
    max_slow = max_any = 0
    for k, s in enumerate(sets):
        base = wear_base[k] if wear_base is not None else None
        for w, n in enumerate(s.writes):
            if base is not None:
                n -= base[w]
            if n > max_any:
                max_any = n
            if w in slow_ways and n > max_slow:
                max_slow = n

    report = SimReport(
        accesses=accesses,
        hits=hits,
        misses=misses,
        read_hits_fast=read_hits[0],
        read_hits_slow=read_hits[1],
        writes_fast=writes[0],
        writes_slow=writes[1],
        fills_fast=fills[0],
        fills_slow=fills[1],
        mem_reads=misses,
        mem_writebacks=writebacks,
        total_cycles=timing.to_cycles(now) - timing.to_cycles(t0),
        instructions=last_icount - icount0,
        max_writes_slow_block=max_slow,
        max_writes_any_block=max_any,
        z_updates=len(z_history),
        final_z=cache.z if cache_cfg.policy is Policy.DFB else 0,
    )
    cache_nj, mem_nj = energy_breakdown(report, hdev, timing, mem)
    report = replace(report, energy_cache_nj=cache_nj, energy_mem_nj=mem_nj)
    return RunResult(report, events, z_history)
