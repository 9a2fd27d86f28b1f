"""Command-line entry point: ``dfbsim run|gen|filter|devices``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .config import KEYS, ConfigError, load_config
from .devices import PCM, SRAM, Technology, derive_hybrid, load_device_file
from .engine import TimingConfig
from .experiment import (
    CacheOverrides,
    Design,
    ExperimentResult,
    ExperimentSpec,
    run_experiment,
    write_outputs,
)
from .replacement import ZTable
from .trace import DEFAULT_SETS, Trace, TraceError, gen_cyclic, gen_skewed, gen_zipf, l1_filter, read_trace, write_trace

GLOBAL_KEYS = ("out", "seed", "warmup_accesses")


class UsageError(Exception):
    """Bad configuration or input; reported with exit status 2."""


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add_key_flags(parser: argparse.ArgumentParser, sections: tuple[str, ...]) -> None:
    for name, key in KEYS.items():
        if key.section in sections and name not in GLOBAL_KEYS:
            parser.add_argument(_flag(name), dest=name, type=key.type, default=None, help=key.help)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI-style config file")
    common.add_argument("--quiet", action="store_true", help="print nothing on success")
    for name in GLOBAL_KEYS:
        key = KEYS[name]
        common.add_argument(_flag(name), dest=name, type=key.type, default=None, help=key.help)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="dfbsim", description="SRAM/PCM hybrid LLC simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run the design comparison on one trace")
    _add_key_flags(p, ("experiment", "trace", "cache", "timing", "devices"))

    p = sub.add_parser("gen", parents=[common], help="write a synthetic trace")
    p.add_argument("output", help="trace file to write (.gz compresses)")
    _add_key_flags(p, ("trace",))

    p = sub.add_parser("filter", parents=[common], help="pass a trace through an L1 cache model")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--l1-capacity", dest="l1_capacity", type=int, default=None)
    p.add_argument("--l1-assoc", dest="l1_assoc", type=int, default=None)
    p.add_argument("--block-bytes", dest="block_bytes", type=int, default=64)

    p = sub.add_parser("devices", parents=[common], help="print device parameters as JSON")
    _add_key_flags(p, ("devices",))
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k in KEYS}


def _read_trace(path: str) -> Trace:
    if not Path(path).is_file():
        raise UsageError(f"trace file not found: {path}")
    try:
        return read_trace(path)
    except TraceError as e:
        raise UsageError(f"{path}: {e}") from None
    except (OSError, EOFError, UnicodeDecodeError) as e:
        raise UsageError(f"{path}: cannot read trace ({e})") from None


def build_trace(cfg: dict) -> tuple[Trace, dict]:
    """Trace named by the config, with a description recorded in the JSON output."""
    try:
        return _build_trace(cfg)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _build_trace(cfg: dict) -> tuple[Trace, dict]:
    if cfg["trace"]:
        trace = _read_trace(cfg["trace"])
        desc = {"source": "file", "path": cfg["trace"]}
    else:
        gen = cfg["generator"]
        common = dict(write_ratio=cfg["write_ratio"], seed=cfg["seed"], ipa=cfg["ipa"])
        if gen == "cyclic":
            params = dict(set_count_target=cfg["sets"], blocks_per_set=cfg["blocks_per_set"], laps=cfg["laps"])
            trace = gen_cyclic(**params, num_sets=DEFAULT_SETS, **common)
        elif gen == "skewed":
            params = dict(sets_hot=cfg["sets_hot"], hot_fraction=cfg["hot_fraction"],
                          total_accesses=cfg["accesses"], hot_blocks=cfg["hot_blocks"],
                          warm_blocks=cfg["warm_blocks"])
            trace = gen_skewed(**params, num_sets=DEFAULT_SETS, **common)
        elif gen == "zipf":
            params = dict(alpha=cfg["alpha"], universe_blocks=cfg["universe_blocks"],
                          total_accesses=cfg["accesses"])
            trace = gen_zipf(**params, **common)
        elif gen is None:
            raise UsageError("no trace given: set 'trace' or 'generator'")
        else:
            raise UsageError(f"unknown generator {gen!r}; expected cyclic, skewed or zipf")
        desc = {"source": "generator", "generator": gen, **params, **common}
    if cfg["l1_capacity"]:
        trace = l1_filter(trace, cfg["l1_capacity"], cfg["l1_assoc"])
        desc["l1_capacity"] = cfg["l1_capacity"]
        desc["l1_assoc"] = cfg["l1_assoc"]
    desc["accesses"] = len(trace)
    return trace, desc


def _devices(cfg: dict):
    try:
        sram = load_device_file(cfg["sram_params"], SRAM) if cfg["sram_params"] else SRAM
        pcm = load_device_file(cfg["pcm_params"], PCM) if cfg["pcm_params"] else PCM
    except OSError as e:
        raise UsageError(f"cannot read device file: {e}") from None
    return sram, pcm


def build_spec(cfg: dict) -> ExperimentSpec:
    trace, desc = build_trace(cfg)
    sram, pcm = _devices(cfg)
    designs = [d.strip() for d in cfg["designs"].split(",") if d.strip()]
    try:
        overrides = CacheOverrides(
            hybrid_n_fast=cfg["n_fast"],
            z_initial=cfg["z_initial"],
            interval_cycles=cfg["interval_cycles"],
            adapt_z=cfg["adapt_z"],
            dfb_thresholds=ZTable.parse(cfg["dfb_thresholds"]) if cfg["dfb_thresholds"] else None,
            prefer_invalid=cfg["prefer_invalid"],
            banks=cfg["banks"],
        )
        return ExperimentSpec(
            trace=trace,
            designs=[Design(d.upper()) for d in designs],
            baseline=Design(cfg["baseline"].upper()),
            cache=overrides,
            timing=TimingConfig(cfg["core_freq_ghz"], cfg["mem_latency_cycles"]),
            sram=sram,
            pcm=pcm,
            warmup_accesses=cfg["warmup_accesses"],
            jobs=cfg["jobs"],
            description=desc,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def format_table(result: ExperimentResult) -> str:
    head = f"{'design':<11} {'hit_rate':>8} {'mpki':>9} {'d_mpki':>9} {'energy%':>9} {'perf':>7} {'life':>9} {'fastW':>6}"
    lines = [head, "-" * len(head)]
    for d, dr in result.results.items():
        m = dr.metric
        lines.append(
            f"{d.value:<11} {m('hit_rate'):8.4f} {m('mpki'):9.3f} {m('mpki_delta'):9.3f} "
            f"{m('energy_saving_pct'):9.2f} {m('relative_performance'):7.3f} "
            f"{m('relative_lifetime'):9.2f} {m('fast_write_fraction'):6.3f}"
        )
    lines.append(f"(relative metrics against {result.baseline.value})")
    return "\n".join(lines)


def cmd_run(args, cfg) -> int:
    spec = build_spec(cfg)
    try:
        result = run_experiment(spec)
    except ValueError as e:
        raise UsageError(str(e)) from None
    written = write_outputs(result, cfg["out"])
    if not args.quiet:
        print(format_table(result))
        print(f"wrote {', '.join(str(p) for p in written[:2])} and {len(written) - 2} plot files")
    return 0


def cmd_gen(args, cfg) -> int:
    if not cfg["generator"]:
        raise UsageError("gen needs --generator cyclic|skewed|zipf")
    cfg = dict(cfg, trace=None)
    trace, _ = build_trace(cfg)
    write_trace(trace, args.output)
    if not args.quiet:
        print(f"wrote {len(trace)} accesses to {args.output}")
    return 0


def cmd_filter(args, cfg) -> int:
    trace = _read_trace(args.input)
    capacity = args.l1_capacity if args.l1_capacity is not None else 32 * 1024
    assoc = args.l1_assoc if args.l1_assoc is not None else 4
    try:
        out = l1_filter(trace, capacity, assoc, args.block_bytes)
    except ValueError as e:
        raise UsageError(str(e)) from None
    write_trace(out, args.output)
    if not args.quiet:
        print(f"{len(trace)} accesses in, {len(out)} out")
    return 0


def cmd_devices(args, cfg) -> int:
    sram, pcm = _devices(cfg)
    hybrid = derive_hybrid(sram, pcm, cfg["n_fast"], 8)
    doc = {
        Technology.SRAM_1MB.value: asdict(sram),
        Technology.PCM_8MB.value: asdict(pcm),
        "hybrid": {"n_fast": hybrid.n_fast, "assoc": hybrid.assoc, "area_mm2": hybrid.area_mm2,
                   "leakage_w": hybrid.leakage_w, "miss_latency_ns": hybrid.miss_latency_ns,
                   "miss_energy_nj": hybrid.miss_energy_nj},
    }
    print(json.dumps(doc, indent=2))
    return 0


COMMANDS = {"run": cmd_run, "gen": cmd_gen, "filter": cmd_filter, "devices": cmd_devices}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, _overrides(args))
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ConfigError) as e:
        print(f"dfbsim: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
