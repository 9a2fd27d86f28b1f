"""Run the four cache designs on one trace and compare them to a baseline."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

from .cache import CacheConfig
from .devices import MiB, PCM, SRAM, DeviceParams, HybridParams, MemoryParams, derive_hybrid, uniform
from .engine import TimingConfig, run
from .metrics import (
    MeanKind,
    SimReport,
    energy_saving_pct,
    fast_write_fraction,
    mpki,
    relative_lifetime,
    relative_performance,
    summarize,
)
from .replacement import Policy, ZTable
from .trace import Trace

SCHEMA_VERSION = 1


class Design(str, Enum):
    PCM = "PCM"
    SRAM = "SRAM"
    HYBRID_LRU = "HYBRID_LRU"
    HYBRID_DFB = "HYBRID_DFB"


ALL_DESIGNS = tuple(Design)

RELATIVE_METRICS = (
    "energy_saving_pct",
    "relative_lifetime",
    "relative_performance",
    "mpki_delta",
    "fast_write_fraction",
)
PLAIN_METRICS = ("hit_rate", "mpki", "energy_nj")
METRICS = RELATIVE_METRICS + PLAIN_METRICS
GEOMETRIC_METRICS = ("relative_lifetime", "relative_performance")


@dataclass(frozen=True)
class CacheOverrides:
    """Knobs applied on top of the built-in design presets."""

    hybrid_n_fast: int = 2
    z_initial: int = 4
    interval_cycles: int = 5_000_000
    adapt_z: bool = True
    dfb_thresholds: ZTable | None = None
    prefer_invalid: bool = False
    banks: int | None = None


def design_setup(
    design: Design | str,
    overrides: CacheOverrides = CacheOverrides(),
    sram: DeviceParams = SRAM,
    pcm: DeviceParams = PCM,
) -> tuple[CacheConfig, HybridParams]:
    """Cache geometry and device parameters of one preset.

    PCM: 8 MiB, 8 banks, LRU. SRAM: 1 MiB, 1 bank, LRU. Hybrids: 8 MiB,
    8 banks, ``hybrid_n_fast`` SRAM ways.
    """
    design = Design(design)
    o = overrides
    common = dict(
        assoc=8,
        block_bytes=64,
        interval_cycles=o.interval_cycles,
        z_initial=o.z_initial,
        adapt_z=o.adapt_z,
        z_table=o.dfb_thresholds,
        prefer_invalid=o.prefer_invalid,
    )
    if design is Design.PCM:
        cfg = CacheConfig(8 * MiB, n_fast=0, policy=Policy.LRU, banks=o.banks or 8, **common)
        return cfg, uniform(pcm, 8)
    if design is Design.SRAM:
        cfg = CacheConfig(1 * MiB, n_fast=8, policy=Policy.LRU, banks=o.banks or 1, **common)
        return cfg, uniform(sram, 8)
    policy = Policy.LRU if design is Design.HYBRID_LRU else Policy.DFB
    cfg = CacheConfig(8 * MiB, n_fast=o.hybrid_n_fast, policy=policy, banks=o.banks or 8, **common)
    return cfg, derive_hybrid(sram, pcm, o.hybrid_n_fast, 8)


@dataclass
class ExperimentSpec:
    trace: Trace
    designs: Sequence[Design] = ALL_DESIGNS
    baseline: Design = Design.PCM
    cache: CacheOverrides = CacheOverrides()
    timing: TimingConfig = TimingConfig()
    memory: MemoryParams = MemoryParams()
    sram: DeviceParams = SRAM
    pcm: DeviceParams = PCM
    warmup_accesses: int = 0
    jobs: int = 1
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        self.designs = tuple(dict.fromkeys(Design(d) for d in self.designs))
        self.baseline = Design(self.baseline)
        if not self.designs:
            raise ValueError("at least one design is required")
        if self.baseline not in self.designs:
            raise ValueError(f"baseline {self.baseline.value} is not among the designs")
        if self.warmup_accesses < 0:
            raise ValueError("warmup_accesses must be non-negative")


@dataclass
class DesignResult:
    design: Design
    report: SimReport
    relative: dict[str, float]

    def metric(self, name: str) -> float:
        if name in self.relative:
            return self.relative[name]
        r = self.report
        if name == "hit_rate":
            return r.hit_rate
        if name == "mpki":
            return mpki(r.misses, r.instructions) if r.instructions else math.nan
        if name == "energy_nj":
            return r.energy_nj
        raise KeyError(name)


@dataclass
class ExperimentResult:
    baseline: Design
    results: dict[Design, DesignResult]
    description: dict = field(default_factory=dict)


def _simulate(args) -> SimReport:
    design, spec = args
    cfg, dev = design_setup(design, spec.cache, spec.sram, spec.pcm)
    result = run(spec.trace, cfg, dev, spec.timing, mem=spec.memory, warmup_accesses=spec.warmup_accesses)
    result.report.check()
    return result.report


def compare(report: SimReport, base: SimReport) -> dict[str, float]:
    rel = {
        "energy_saving_pct": energy_saving_pct(report.energy_nj, base.energy_nj) if base.energy_nj else math.nan,
        "relative_lifetime": relative_lifetime(report.max_writes_slow_block, base.max_writes_slow_block),
        "relative_performance": relative_performance(report, base),
        "mpki_delta": math.nan,
        "fast_write_fraction": fast_write_fraction(report.writes_fast, report.writes_slow),
    }
    if report.instructions > 0:
        rel["mpki_delta"] = mpki(report.misses, report.instructions) - mpki(base.misses, base.instructions)
    return rel


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    work = [(d, spec) for d in spec.designs]
    if spec.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=min(spec.jobs, len(work))) as pool:
            reports = list(pool.map(_simulate, work))
    else:
        reports = [_simulate(w) for w in work]
    by_design = dict(zip(spec.designs, reports))
    base = by_design[spec.baseline]
    results = {d: DesignResult(d, r, compare(r, base)) for d, r in by_design.items()}
    return ExperimentResult(spec.baseline, results, dict(spec.description))


def summarize_results(runs: Sequence[ExperimentResult]) -> dict[str, dict[str, float]]:
    """Average each relative metric per design across several traces."""
    out: dict[str, dict[str, float]] = {}
    designs = dict.fromkeys(d for r in runs for d in r.results)
    for d in designs:
        row = {}
        for name in RELATIVE_METRICS:
            values = [r.results[d].relative[name] for r in runs if d in r.results]
            values = [v for v in values if not math.isnan(v)]
            if not values:
                row[name] = math.nan
                continue
            kind = MeanKind.GEOMETRIC if name in GEOMETRIC_METRICS else MeanKind.ARITHMETIC
            row[name] = summarize(values, kind)
        out[d.value] = row
    return out


# -- serialization ---------------------------------------------------------

REPORT_FIELDS = SimReport.field_names()
CSV_FIELDS = ["v", "design", "baseline"] + REPORT_FIELDS + list(PLAIN_METRICS) + list(RELATIVE_METRICS)


def _num(x):
    """JSON/CSV-safe number: non-finite floats become the strings inf, -inf, nan."""
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _row(result: ExperimentResult, dr: DesignResult) -> dict:
    row = {"v": SCHEMA_VERSION, "design": dr.design.value, "baseline": result.baseline.value}
    row.update(dr.report.to_dict())
    for name in PLAIN_METRICS + RELATIVE_METRICS:
        row[name] = dr.metric(name)
    return row


def to_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for dr in result.results.values():
        writer.writerow({k: _num(v) for k, v in _row(result, dr).items()})
    return buf.getvalue()


def to_json(result: ExperimentResult) -> str:
    doc = {
        "v": SCHEMA_VERSION,
        "baseline": result.baseline.value,
        "trace": result.description,
        "designs": {
            dr.design.value: {k: _num(v) for k, v in _row(result, dr).items() if k not in ("v", "design", "baseline")}
            for dr in result.results.values()
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_plotdata(result: ExperimentResult, metric: str) -> str:
    """Two whitespace-separated columns, ``<design> <value>``, one line per design."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; valid metrics: {', '.join(METRICS)}")
    return "".join(f"{dr.design.value} {_num(dr.metric(metric))}\n" for dr in result.results.values())


def write_outputs(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (("results.csv", to_csv(result)), ("results.json", to_json(result))):
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    for metric in RELATIVE_METRICS:
        path = out / f"plot_{metric}.dat"
        path.write_text(emit_plotdata(result, metric), encoding="utf-8")
        written.append(path)
    return written

