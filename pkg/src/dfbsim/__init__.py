"""Trace-driven simulator for way-partitioned SRAM/PCM hybrid last-level caches."""

from .cache import CacheConfig, CacheState, Region, decompose_address, init_cache, promote_mru
from .devices import PCM, SRAM, DeviceParams, HybridParams, MemoryParams, builtin_params, derive_hybrid, iso_area_ok
from .engine import EventKind, RunResult, SimEvent, TimingConfig, run, service_latency
from .metrics import SimReport
from .replacement import Policy, ZTable, dfb_select_victim, lru_select_victim, update_z
from .trace import AccessRecord, Op, Trace, gen_cyclic, gen_skewed, gen_zipf, l1_filter, parse_trace

__version__ = "0.1.0"

__all__ = [
    "AccessRecord",
    "builtin_params",
    "CacheConfig",
    "CacheState",
    "decompose_address",
    "derive_hybrid",
    "DeviceParams",
    "dfb_select_victim",
    "EventKind",
    "gen_cyclic",
    "gen_skewed",
    "gen_zipf",
    "HybridParams",
    "init_cache",
    "iso_area_ok",
    "l1_filter",
    "lru_select_victim",
    "MemoryParams",
    "Op",
    "parse_trace",
    "PCM",
    "Policy",
    "promote_mru",
    "Region",
    "run",
    "RunResult",
    "service_latency",
    "SimEvent",
    "SimReport",
    "SRAM",
    "TimingConfig",
    "Trace",
    "update_z",
    "ZTable",
]
