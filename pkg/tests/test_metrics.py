import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfbsim.cache import CacheConfig
from dfbsim.devices import PCM, SRAM, MemoryParams, derive_hybrid, uniform
from dfbsim.engine import TimingConfig, run
from dfbsim.metrics import (
    UNBOUNDED,
    MeanKind,
    SimReport,
    energy,
    energy_breakdown,
    energy_saving_pct,
    fast_write_fraction,
    mpki,
    relative_lifetime,
    relative_performance,
    summarize,
)
from dfbsim.trace import gen_zipf

T = TimingConfig()
MEM = MemoryParams()
HYBRID = derive_hybrid(SRAM, PCM, 2, 8)
PCM8 = uniform(PCM, 8)


def test_leakage_only_one_second_pcm():
    report = SimReport(total_cycles=2_000_000_000)  # 1 s at 2 GHz
    assert energy(report, PCM8, T, MEM) == pytest.approx(1.209e9, rel=1e-12)


def test_one_slow_read_hit():
    report = SimReport(accesses=1, hits=1, read_hits_slow=1)
    assert energy(report, HYBRID, T, MEM) == pytest.approx(3.326, rel=1e-12)


def test_one_miss_filling_fast():
    report = SimReport(accesses=1, misses=1, writes_fast=1, fills_fast=1, mem_reads=1)
    cache_nj, mem_nj = energy_breakdown(report, HYBRID, T, MEM)
    assert cache_nj == pytest.approx(0.969 + 0.282, rel=1e-12)
    assert mem_nj == pytest.approx(70.0, rel=1e-12)


def test_writeback_costs_a_memory_access():
    report = SimReport(mem_writebacks=2)
    assert energy_breakdown(report, HYBRID, T, MEM)[1] == pytest.approx(140.0)


@pytest.mark.parametrize("scheme, baseline, pct", [(95, 100, 5.0), (100, 100, 0.0), (104.94, 100, -4.94)])
def test_energy_saving(scheme, baseline, pct):
    assert energy_saving_pct(scheme, baseline) == pytest.approx(pct, abs=1e-9)


def test_energy_saving_rejects_zero_baseline():
    with pytest.raises(ValueError):
        energy_saving_pct(1.0, 0.0)


@pytest.mark.parametrize("scheme, baseline, ratio", [(20, 100, 5.0), (100, 100, 1.0), (0, 100, UNBOUNDED)])
def test_relative_lifetime(scheme, baseline, ratio):
    assert relative_lifetime(scheme, baseline) == ratio


@given(st.integers(1, 10**9))
def test_relative_lifetime_identity(x):
    assert relative_lifetime(x, x) == 1.0


@pytest.mark.parametrize("misses, instr, value", [(1000, 1_000_000, 1.0), (0, 1_000_000, 0.0), (250, 250_000_000, 0.001)])
def test_mpki(misses, instr, value):
    assert mpki(misses, instr) == pytest.approx(value, rel=1e-12)


def test_mpki_rejects_zero_instructions():
    with pytest.raises(ValueError):
        mpki(1, 0)


@pytest.mark.parametrize("scheme, baseline, ratio", [(100, 136, 1.36), (100, 100, 1.0), (200, 100, 0.5)])
def test_relative_performance(scheme, baseline, ratio):
    s = SimReport(total_cycles=scheme, instructions=1000)
    b = SimReport(total_cycles=baseline, instructions=1000)
    assert relative_performance(s, b) == pytest.approx(ratio, rel=1e-12)


def test_relative_performance_rejects_different_traces():
    with pytest.raises(ValueError, match="different instruction counts"):
        relative_performance(SimReport(total_cycles=1, instructions=10), SimReport(total_cycles=1, instructions=20))


@pytest.mark.parametrize("fast, slow, frac", [(100, 0, 1.0), (0, 100, 0.0), (1, 3, 0.25)])
def test_fast_write_fraction(fast, slow, frac):
    assert fast_write_fraction(fast, slow) == frac


def test_fast_write_fraction_undefined_without_writes():
    assert math.isnan(fast_write_fraction(0, 0))


@given(st.integers(0, 1000), st.integers(0, 1000), st.integers(1, 50))
def test_fast_write_fraction_scale_invariant(a, b, k):
    if a + b:
        assert fast_write_fraction(a * k, b * k) == pytest.approx(fast_write_fraction(a, b), rel=1e-12)


@pytest.mark.parametrize(
    "values, kind, mean",
    [([1, 4], MeanKind.GEOMETRIC, 2.0), ([1, 3], MeanKind.ARITHMETIC, 2.0), ([2, 2, 2], "geometric", 2.0)],
)
def test_summarize(values, kind, mean):
    assert summarize(values, kind) == pytest.approx(mean, rel=1e-12)


@pytest.mark.parametrize("values", [[1, 0], [2, -1], []])
def test_summarize_rejects(values):
    with pytest.raises(ValueError):
        summarize(values, MeanKind.GEOMETRIC)


def test_geometric_mean_with_unbounded_member():
    assert summarize([2.0, UNBOUNDED], MeanKind.GEOMETRIC) == UNBOUNDED


def test_report_check_catches_inconsistency():
    SimReport(accesses=2, hits=1, misses=1, fills_slow=1, writes_slow=1, mem_reads=1).check()
    with pytest.raises(AssertionError):
        SimReport(accesses=2, hits=2, misses=1).check()


@pytest.mark.parametrize("split", [1, 500, 2999])
@pytest.mark.parametrize("policy", ["lru", "dfb"])
def test_energy_additive_across_segments(split, policy):
    trace = gen_zipf(0.8, 400, 3000, write_ratio=0.3, seed=split)
    c = CacheConfig(4 * 8 * 64, n_fast=2, policy=policy, banks=2, adapt_z=False)
    whole = run(trace, c, HYBRID).report
    head = run(trace[:split], c, HYBRID).report
    tail = run(trace, c, HYBRID, warmup_accesses=split).report
    assert head.total_cycles + tail.total_cycles == whole.total_cycles
    assert head.energy_nj + tail.energy_nj == pytest.approx(whole.energy_nj, rel=1e-6)
