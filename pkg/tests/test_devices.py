import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfbsim.devices import (
    PCM,
    SRAM,
    DeviceParams,
    MiB,
    Technology,
    builtin_params,
    derive_hybrid,
    iso_area_ok,
    parse_device_text,
    uniform,
)

REL = 1e-9


def test_builtin_sram_row():
    p = builtin_params(Technology.SRAM_1MB)
    assert (p.area_mm2, p.hit_latency_ns, p.miss_latency_ns, p.write_latency_ns) == (1.894, 0.697, 0.217, 0.3)
    assert (p.hit_energy_nj, p.miss_energy_nj, p.write_energy_nj, p.leakage_w) == (0.29, 0.006, 0.282, 2.194)
    assert p.capacity_bytes == 1 * MiB
    assert p.endurance_limited is False


def test_builtin_pcm_row():
    p = builtin_params("PCM-8MB")
    assert (p.area_mm2, p.hit_latency_ns, p.miss_latency_ns, p.write_latency_ns) == (1.602, 0.905, 0.274, 150.384)
    assert (p.hit_energy_nj, p.miss_energy_nj, p.write_energy_nj, p.leakage_w) == (3.326, 0.969, 76.418, 1.029)
    assert p.capacity_bytes == 8 * MiB
    assert p.endurance_limited is True


def test_builtin_rejects_unknown_kind():
    with pytest.raises(ValueError):
        builtin_params("DRAM-4GB")


def test_hybrid_two_of_eight():
    h = derive_hybrid(SRAM, PCM, 2, 8)
    assert h.area_mm2 == pytest.approx(1.675, rel=REL)
    assert h.leakage_w == pytest.approx(1.32025, rel=REL)
    assert round(h.leakage_w, 3) == 1.320
    assert h.miss_latency_ns == PCM.miss_latency_ns
    assert h.miss_energy_nj == PCM.miss_energy_nj
    assert h.fast is SRAM and h.slow is PCM


def test_hybrid_pure_pcm_endpoint():
    h = derive_hybrid(SRAM, PCM, 0, 8)
    assert h.area_mm2 == pytest.approx(1.602, rel=REL)
    assert h.leakage_w == pytest.approx(1.029, rel=REL)


def test_hybrid_pure_sram_endpoint():
    h = derive_hybrid(SRAM, PCM, 8, 8)
    assert h.area_mm2 == pytest.approx(SRAM.area_mm2, rel=REL)
    assert h.leakage_w == pytest.approx(SRAM.leakage_w, rel=REL)


@pytest.mark.parametrize("n_fast, assoc", [(9, 8), (-1, 8), (0, 0)])
def test_hybrid_rejects_bad_split(n_fast, assoc):
    with pytest.raises(ValueError):
        derive_hybrid(SRAM, PCM, n_fast, assoc)


@given(st.integers(1, 64).flatmap(lambda a: st.tuples(st.integers(0, a), st.just(a))))
def test_hybrid_area_is_convex_combination(split):
    n_fast, assoc = split
    h = derive_hybrid(SRAM, PCM, n_fast, assoc)
    expected = (n_fast * SRAM.area_mm2 + (assoc - n_fast) * PCM.area_mm2) / assoc
    assert math.isclose(h.area_mm2, expected, rel_tol=REL)


@given(st.integers(1, 32))
def test_hybrid_monotone_in_n_fast(assoc):
    hs = [derive_hybrid(SRAM, PCM, n, assoc) for n in range(assoc + 1)]
    assert all(a.area_mm2 <= b.area_mm2 for a, b in zip(hs, hs[1:]))
    assert all(a.leakage_w <= b.leakage_w for a, b in zip(hs, hs[1:]))


def test_uniform_wraps_single_technology():
    assert uniform(PCM, 8).n_fast == 0
    assert uniform(SRAM, 8).n_fast == 8
    assert uniform(SRAM, 8).miss_latency_ns == SRAM.miss_latency_ns


@pytest.mark.parametrize("candidate, reference, ok", [(1.675, 1.894, True), (1.894, 1.894, True), (1.895, 1.894, False)])
def test_iso_area(candidate, reference, ok):
    assert iso_area_ok(candidate, reference) is ok


def test_device_params_must_be_positive():
    with pytest.raises(ValueError):
        DeviceParams(0.0, 1, 1, 1, 1, 1, 1, 1, 1, True)


def test_device_file_overrides_base():
    p = parse_device_text("# tweaked PCM\nwrite_latency_ns = 100.0\nendurance_limited = true\n", PCM)
    assert p.write_latency_ns == 100.0
    assert p.hit_latency_ns == PCM.hit_latency_ns


def test_device_file_unknown_key():
    with pytest.raises(ValueError, match="unknown device key 'speed'"):
        parse_device_text("speed = 3\n", PCM)


def test_device_file_requires_all_keys_without_base():
    with pytest.raises(ValueError, match="missing device keys"):
        parse_device_text("area_mm2 = 1.0\n")
