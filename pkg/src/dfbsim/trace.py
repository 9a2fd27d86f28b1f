"""Access traces: text format, synthetic generators, and an L1 filter.

Text format, one record per line::

    R 0x1000 10
    W 0x40 12

``R``/``W``, a hex byte address, and the cumulative instruction count at the
access. Lines starting with ``#`` and blank lines are skipped. Files ending in
``.gz`` are read and written gzip-compressed.
"""

from __future__ import annotations

import bisect
import gzip
import io
import random
from dataclasses import dataclass
from enum import Enum
from itertools import accumulate
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

DEFAULT_IPA = 10  # instructions per access attached by the generators
DEFAULT_SETS = 16384  # 8 MiB, 8-way, 64 B blocks


class Op(str, Enum):
    READ = "R"
    WRITE = "W"


@dataclass(frozen=True)
class AccessRecord:
    op: Op
    addr: int
    icount: int

    @property
    def is_write(self) -> bool:
        return self.op is Op.WRITE


class TraceError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class Trace:
    """Column-oriented trace; iterating yields AccessRecord objects."""

    __slots__ = ("writes", "addrs", "icounts")

    def __init__(self, writes: Sequence[bool], addrs: Sequence[int], icounts: Sequence[int]):
        if not len(writes) == len(addrs) == len(icounts):
            raise ValueError("trace columns differ in length")
        self.writes = list(writes)
        self.addrs = list(addrs)
        self.icounts = list(icounts)

    @classmethod
    def from_records(cls, records: Iterable[AccessRecord]) -> "Trace":
        w, a, c = [], [], []
        for r in records:
            w.append(r.op is Op.WRITE)
            a.append(r.addr)
            c.append(r.icount)
        return cls(w, a, c)

    def columns(self) -> Iterator[tuple[bool, int, int]]:
        return zip(self.writes, self.addrs, self.icounts)

    def __len__(self) -> int:
        return len(self.addrs)

    def __iter__(self) -> Iterator[AccessRecord]:
        for w, a, c in self.columns():
            yield AccessRecord(Op.WRITE if w else Op.READ, a, c)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Trace(self.writes[i], self.addrs[i], self.icounts[i])
        return AccessRecord(Op.WRITE if self.writes[i] else Op.READ, self.addrs[i], self.icounts[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return (self.writes, self.addrs, self.icounts) == (other.writes, other.addrs, other.icounts)

    def __repr__(self) -> str:
        return f"Trace({len(self)} accesses)"


def parse_trace(stream: Iterable[str]) -> Trace:
    writes, addrs, icounts = [], [], []
    last = None
    for lineno, line in enumerate(stream, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("R", "W"):
            raise TraceError(lineno, f"expected 'R|W 0x<addr> <icount>', got {line!r}")
        op, addr_s, icount_s = parts
        if not addr_s.lower().startswith("0x"):
            raise TraceError(lineno, f"address must be hex with 0x prefix, got {addr_s!r}")
        try:
            addr = int(addr_s, 16)
            icount = int(icount_s, 10)
        except ValueError:
            raise TraceError(lineno, f"bad number in {line!r}") from None
        if icount < 0:
            raise TraceError(lineno, f"negative instruction count {icount}")
        if last is not None and icount < last:
            raise TraceError(lineno, f"instruction count went backwards ({last} -> {icount})")
        last = icount
        writes.append(op == "W")
        addrs.append(addr)
        icounts.append(icount)
    return Trace(writes, addrs, icounts)


def _open_text(path: str | Path, mode: str) -> IO[str]:
    path = Path(path)
    if path.suffix == ".gz":
        # fixed mtime keeps compressed output byte-identical across runs
        raw = gzip.GzipFile(path, mode + "b", mtime=0)
        return io.TextIOWrapper(raw, encoding="utf-8", newline="\n")
    return open(path, mode, encoding="utf-8", newline="\n")


def read_trace(path: str | Path) -> Trace:
    with _open_text(path, "r") as f:
        return parse_trace(f)


def serialize(trace: Trace) -> Iterator[str]:
    for w, a, c in trace.columns():
        yield f"{'W' if w else 'R'} 0x{a:x} {c}\n"


def write_trace(trace: Trace, path: str | Path) -> None:
    with _open_text(path, "w") as f:
        f.writelines(serialize(trace))


def concat(traces: Sequence[Trace]) -> Trace:
    """Join traces end to end, shifting instruction counts to stay monotone."""
    writes, addrs, icounts = [], [], []
    offset = 0
    for t in traces:
        writes.extend(t.writes)
        addrs.extend(t.addrs)
        icounts.extend(c + offset for c in t.icounts)
        if icounts:
            offset = icounts[-1]
    return Trace(writes, addrs, icounts)


def _finish(blocks: list[int], rng: random.Random, write_ratio: float, block_bytes: int, ipa: int) -> Trace:
    if not 0.0 <= write_ratio <= 1.0:
        raise ValueError("write_ratio must be in [0, 1]")
    rnd = rng.random
    writes = [rnd() < write_ratio for _ in blocks]
    return Trace(writes, [b * block_bytes for b in blocks], range(ipa, ipa * (len(blocks) + 1), ipa))


def gen_cyclic(
    set_count_target: int,
    blocks_per_set: int,
    laps: int,
    write_ratio: float = 0.0,
    seed: int = 0,
    *,
    num_sets: int = DEFAULT_SETS,
    block_bytes: int = 64,
    ipa: int = DEFAULT_IPA,
) -> Trace:
    """Round-robin sweep over ``blocks_per_set`` conflicting blocks in each of the first sets.

    Every lap touches block 0 of each targeted set, then block 1, and so on.
    With more blocks than ways, LRU misses on every access.
    """
    if not 1 <= set_count_target <= num_sets:
        raise ValueError(f"set_count_target must be in [1, {num_sets}]")
    if blocks_per_set < 1 or laps < 0:
        raise ValueError("blocks_per_set must be >= 1 and laps >= 0")
    lap = [b * num_sets + s for b in range(blocks_per_set) for s in range(set_count_target)]
    return _finish(lap * laps, random.Random(seed), write_ratio, block_bytes, ipa)


def gen_skewed(
    sets_hot: int,
    hot_fraction: float,
    total_accesses: int,
    write_ratio: float = 0.0,
    seed: int = 0,
    *,
    hot_blocks: int = 2,
    warm_blocks: int = 2,
    num_sets: int = DEFAULT_SETS,
    block_bytes: int = 64,
    ipa: int = DEFAULT_IPA,
) -> Trace:
    """Most accesses hammer a tiny working set in a few sets; the rest are uniform.

    Hot sets are spread evenly over the index space and each holds
    ``hot_blocks`` hot blocks. When ``hot_fraction > 0`` the trace opens with
    ``warm_blocks`` distinct cold reads per hot set, so the hot blocks are not
    the first arrivals in their sets. With the default of 2, a DFB cache
    starting at z = 4 places both hot blocks in its two fast ways. The
    remaining accesses pick the hot path with probability ``hot_fraction``
    and otherwise a uniformly random block from a large cold universe.
    """
    if not 0.0 <= hot_fraction <= 1.0:
        raise ValueError("hot_fraction must be in [0, 1]")
    if sets_hot < 1 or sets_hot > num_sets:
        raise ValueError(f"sets_hot must be in [1, {num_sets}]")
    rng = random.Random(seed)
    stride = num_sets // sets_hot
    hot_sets = [i * stride for i in range(sets_hot)]
    # tags: [0, hot_blocks) hot, then warm-up tags, then the cold universe
    cold_base = hot_blocks + warm_blocks
    cold_tags = 1 << 20

    blocks: list[int] = []
    if hot_fraction > 0:
        for s in hot_sets:
            blocks.extend((hot_blocks + k) * num_sets + s for k in range(warm_blocks))
        del blocks[total_accesses:]
    rnd = rng.random
    for _ in range(total_accesses - len(blocks)):
        if rnd() < hot_fraction:
            s = hot_sets[int(rnd() * sets_hot)]
            blocks.append(int(rnd() * hot_blocks) * num_sets + s)
        else:
            blocks.append((cold_base + int(rnd() * cold_tags)) * num_sets + int(rnd() * num_sets))
    return _finish(blocks, rng, write_ratio, block_bytes, ipa)


def gen_zipf(
    alpha: float,
    universe_blocks: int,
    total_accesses: int,
    write_ratio: float = 0.0,
    seed: int = 0,
    *,
    base_block: int = 0,
    block_bytes: int = 64,
    ipa: int = DEFAULT_IPA,
) -> Trace:
    """Block ``base_block + k`` is drawn with probability proportional to ``(k + 1) ** -alpha``."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if universe_blocks < 1:
        raise ValueError("universe_blocks must be >= 1")
    rng = random.Random(seed)
    cum = list(accumulate((k + 1) ** -alpha for k in range(universe_blocks)))
    total = cum[-1]
    rnd = rng.random
    hi = universe_blocks - 1
    blocks = [base_block + min(bisect.bisect_right(cum, rnd() * total), hi) for _ in range(total_accesses)]
    return _finish(blocks, rng, write_ratio, block_bytes, ipa)


def l1_filter(trace: Trace, l1_capacity: int, l1_assoc: int = 4, block_bytes: int = 64) -> Trace:
    """Pass ``trace`` through a write-back, write-allocate LRU L1.

    Emits each L1 miss (with the missing access's op) and each dirty L1
    eviction as a WRITE of the victim block; the writeback precedes the miss
    that caused it. ``l1_capacity = 0`` disables the filter.
    """
    if l1_capacity == 0:
        return Trace(trace.writes, trace.addrs, trace.icounts)
    from .cache import CacheConfig, CacheState, Policy

    cfg = CacheConfig(l1_capacity, assoc=l1_assoc, block_bytes=block_bytes, n_fast=0, policy=Policy.LRU, banks=1)
    l1 = CacheState(cfg)
    victim_fn = l1.victim_fn()
    writes, addrs, icounts = [], [], []
    for w, a, c in trace.columns():
        out = l1.access(w, a, victim_fn)
        if out.hit:
            continue
        if out.writeback_issued:
            writes.append(True)
            addrs.append(l1.block_address(out.victim_tag, (a // block_bytes) % cfg.num_sets))
            icounts.append(c)
        writes.append(w)
        addrs.append(a)
        icounts.append(c)
    return Trace(writes, addrs, icounts)
