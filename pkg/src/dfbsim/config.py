"""Experiment configuration: an INI-style ``key = value`` file plus flag overrides.

Every key lives in exactly one section; the same key is accepted as a
``--key value`` command-line flag (underscores become dashes), and flags win
over the file.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class Key:
    section: str
    type: Callable[[str], Any]
    default: Any
    help: str


KEYS: dict[str, Key] = {
    # experiment
    "designs": Key("experiment", str, "PCM,SRAM,HYBRID_LRU,HYBRID_DFB", "comma-separated designs to run"),
    "baseline": Key("experiment", str, "PCM", "design the relative metrics are taken against"),
    "seed": Key("experiment", int, 0, "seed for synthetic trace generation"),
    "out": Key("experiment", str, "results", "output directory"),
    "warmup_accesses": Key("experiment", int, 0, "leading accesses excluded from all counters"),
    "jobs": Key("experiment", int, 1, "designs simulated in parallel"),
    # trace
    "trace": Key("trace", str, None, "trace file (.gz accepted); overrides generator"),
    "generator": Key("trace", str, None, "synthetic generator: cyclic, skewed or zipf"),
    "sets": Key("trace", int, 1, "cyclic: number of targeted sets"),
    "blocks_per_set": Key("trace", int, 9, "cyclic: conflicting blocks per set"),
    "laps": Key("trace", int, 10, "cyclic: sweeps over the blocks"),
    "sets_hot": Key("trace", int, 64, "skewed: number of hot sets"),
    "hot_fraction": Key("trace", float, 0.99, "skewed: share of accesses to hot sets"),
    "hot_blocks": Key("trace", int, 2, "skewed: hot blocks per hot set"),
    "warm_blocks": Key("trace", int, 2, "skewed: cold blocks touched in each hot set before its hot blocks"),
    "alpha": Key("trace", float, 1.0, "zipf: popularity exponent"),
    "universe_blocks": Key("trace", int, 1 << 16, "zipf: distinct blocks"),
    "accesses": Key("trace", int, 100_000, "skewed/zipf: trace length"),
    "write_ratio": Key("trace", float, 0.3, "probability an access is a write"),
    "ipa": Key("trace", int, 10, "instructions per access for synthetic traces"),
    "l1_capacity": Key("trace", int, 0, "L1 filter capacity in bytes, 0 disables"),
    "l1_assoc": Key("trace", int, 4, "L1 filter associativity"),
    # cache
    "n_fast": Key("cache", int, 2, "SRAM ways in the hybrid designs"),
    "z_initial": Key("cache", int, 4, "DFB threshold at start"),
    "interval_cycles": Key("cache", int, 5_000_000, "cycles between DFB threshold updates"),
    "adapt_z": Key("cache", _bool, True, "update the DFB threshold from interval miss rates"),
    "dfb_thresholds": Key("cache", str, None, "miss-rate table, e.g. '0.8:5, 0.9:4, 0.99:3, *:2'"),
    "prefer_invalid": Key("cache", _bool, False, "DFB/LRU fill an invalid way before evicting"),
    # timing
    "core_freq_ghz": Key("timing", float, 2.0, "core clock"),
    "mem_latency_cycles": Key("timing", int, 360, "main memory read latency"),
    "banks": Key("timing", int, None, "override the bank count of every design"),
    # devices
    "sram_params": Key("devices", str, None, "key = value file replacing SRAM constants"),
    "pcm_params": Key("devices", str, None, "key = value file replacing PCM constants"),
}


def defaults() -> dict[str, Any]:
    return {name: key.default for name, key in KEYS.items()}


def load_config(path: str | Path | None, overrides: dict[str, Any] | None = None) -> dict[str, Any]:
    """Merge defaults, the config file (if any), and already-typed overrides."""
    values = defaults()
    if path is not None:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as f:
                parser.read_file(f)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
        except configparser.Error as e:
            raise ConfigError(f"{path}: {e}") from None
        for section in parser.sections():
            for name, raw in parser.items(section):
                key = KEYS.get(name)
                if key is None:
                    raise ConfigError(f"{path}: unknown key {name!r} in [{section}]")
                if key.section != section:
                    raise ConfigError(f"{path}: key {name!r} belongs in [{key.section}], not [{section}]")
                try:
                    values[name] = key.type(raw)
                except ValueError as e:
                    raise ConfigError(f"{path}: bad value for {name}: {e}") from None
    for name, value in (overrides or {}).items():
        if name not in KEYS:
            raise ConfigError(f"unknown key {name!r}")
        if value is not None:
            values[name] = value
    return values
