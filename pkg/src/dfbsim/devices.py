"""Technology constants for the SRAM and PCM cache regions.

Values are for a 1 MB SRAM and an 8 MB PCM last-level cache at 32 nm,
8-way, 64 B blocks. Units: mm^2, ns, nJ, W.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path

MiB = 1 << 20


class Technology(str, Enum):
    SRAM_1MB = "SRAM-1MB"
    PCM_8MB = "PCM-8MB"


@dataclass(frozen=True)
class DeviceParams:
    area_mm2: float
    hit_latency_ns: float
    miss_latency_ns: float
    write_latency_ns: float
    hit_energy_nj: float
    miss_energy_nj: float
    write_energy_nj: float
    leakage_w: float
    capacity_bytes: int
    endurance_limited: bool

    def __post_init__(self):
        for f in fields(self):
            if f.type == "float" and not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be strictly positive, got {getattr(self, f.name)!r}")
        if self.capacity_bytes <= 0:
            raise ValueError("capacity_bytes must be positive")


_BUILTIN = {
    Technology.SRAM_1MB: DeviceParams(
        area_mm2=1.894,
        hit_latency_ns=0.697,
        miss_latency_ns=0.217,
        write_latency_ns=0.3,
        hit_energy_nj=0.29,
        miss_energy_nj=0.006,
        write_energy_nj=0.282,
        leakage_w=2.194,
        capacity_bytes=1 * MiB,
        endurance_limited=False,
    ),
    Technology.PCM_8MB: DeviceParams(
        area_mm2=1.602,
        hit_latency_ns=0.905,
        miss_latency_ns=0.274,
        write_latency_ns=150.384,
        hit_energy_nj=3.326,
        miss_energy_nj=0.969,
        write_energy_nj=76.418,
        leakage_w=1.029,
        capacity_bytes=8 * MiB,
        endurance_limited=True,
    ),
}


def builtin_params(kind: Technology | str) -> DeviceParams:
    return _BUILTIN[Technology(kind)]


SRAM = builtin_params(Technology.SRAM_1MB)
PCM = builtin_params(Technology.PCM_8MB)


@dataclass(frozen=True)
class MemoryParams:
    """Main memory behind the LLC: per-access dynamic energy and static power."""

    access_energy_nj: float = 70.0
    leakage_w: float = 0.18


@dataclass(frozen=True)
class HybridParams:
    """A way-partitioned cache: ways ``0..n_fast-1`` use ``fast``, the rest ``slow``.

    Area and leakage scale linearly with the way split. Tag-miss latency and
    energy are those of the slow technology. Per-access hit and write costs
    stay per region and are looked up at access time.
    """

    fast: DeviceParams
    slow: DeviceParams
    n_fast: int
    assoc: int
    area_mm2: float
    leakage_w: float
    miss_latency_ns: float
    miss_energy_nj: float


def derive_hybrid(fast: DeviceParams, slow: DeviceParams, n_fast: int, assoc: int) -> HybridParams:
    if assoc < 1:
        raise ValueError(f"assoc must be >= 1, got {assoc}")
    if not 0 <= n_fast <= assoc:
        raise ValueError(f"n_fast must be in [0, {assoc}], got {n_fast}")
    f = n_fast / assoc
    s = (assoc - n_fast) / assoc
    return HybridParams(
        fast=fast,
        slow=slow,
        n_fast=n_fast,
        assoc=assoc,
        area_mm2=f * fast.area_mm2 + s * slow.area_mm2,
        leakage_w=f * fast.leakage_w + s * slow.leakage_w,
        miss_latency_ns=slow.miss_latency_ns,
        miss_energy_nj=slow.miss_energy_nj,
    )


def uniform(dev: DeviceParams, assoc: int) -> HybridParams:
    """Wrap a single-technology cache as a degenerate hybrid.

    Endurance-limited devices occupy the slow region (``n_fast = 0``), others
    the fast region (``n_fast = assoc``). Miss costs come from ``dev`` itself.
    """
    n_fast = 0 if dev.endurance_limited else assoc
    return derive_hybrid(dev, dev, n_fast, assoc)


def iso_area_ok(candidate: float, reference: float) -> bool:
    if candidate <= 0 or reference <= 0:
        raise ValueError("areas must be positive")
    return candidate <= reference


_FIELD_TYPES = {f.name: f.type for f in fields(DeviceParams)}


def parse_device_text(text: str, base: DeviceParams | None = None) -> DeviceParams:
    """Parse ``key = value`` lines into DeviceParams.

    Keys not given fall back to ``base``; without a base every field is
    required. Blank lines and ``#`` comments are ignored.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (p.strip() for p in line.partition("="))
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if key not in _FIELD_TYPES:
            raise ValueError(f"line {lineno}: unknown device key {key!r}")
        kind = _FIELD_TYPES[key]
        try:
            if kind == "bool":
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                values[key] = value.lower() in ("true", "1", "yes")
            elif kind == "int":
                values[key] = int(value, 0)
            else:
                values[key] = float(value)
        except ValueError:
            raise ValueError(f"line {lineno}: bad {kind} value for {key}: {value!r}") from None
    if base is None:
        missing = sorted(set(_FIELD_TYPES) - set(values))
        if missing:
            raise ValueError(f"missing device keys: {', '.join(missing)}")
        return DeviceParams(**values)
    merged = {name: getattr(base, name) for name in _FIELD_TYPES}
    merged.update(values)
    return DeviceParams(**merged)


def load_device_file(path: str | Path, base: DeviceParams | None = None) -> DeviceParams:
    return parse_device_text(Path(path).read_text(encoding="utf-8"), base)
