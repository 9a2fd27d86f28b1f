import csv
import json

import pytest

from dfbsim.cli import main
from dfbsim.experiment import CSV_FIELDS, ExperimentSpec, emit_plotdata, run_experiment
from dfbsim.trace import gen_cyclic, read_trace, write_trace

THRASH = ["--generator", "cyclic", "--sets", "1", "--blocks-per-set", "9", "--laps", "10", "--write-ratio", "0"]


def run_cli(tmp_path, *args, out="out"):
    code = main(["run", "--quiet", "--out", str(tmp_path / out), *args])
    return code, tmp_path / out


def rows(out_dir):
    with open(out_dir / "results.csv", newline="") as f:
        return {r["design"]: r for r in csv.DictReader(f)}


def test_four_designs_on_thrash_trace(tmp_path):
    code, out = run_cli(tmp_path, *THRASH)
    assert code == 0
    table = rows(out)
    assert list(table) == ["PCM", "SRAM", "HYBRID_LRU", "HYBRID_DFB"]
    assert float(table["HYBRID_DFB"]["hit_rate"]) > float(table["HYBRID_LRU"]["hit_rate"])
    doc = json.loads((out / "results.json").read_text())
    assert doc["v"] == 1 and doc["baseline"] == "PCM"
    assert list(doc["designs"]) == list(table)
    assert doc["trace"]["generator"] == "cyclic"
    assert all(r["v"] == "1" for r in table.values())
    with open(out / "results.csv") as f:
        assert f.readline().rstrip("\n").split(",") == CSV_FIELDS


def test_self_baseline_identity(tmp_path):
    code, out = run_cli(tmp_path, *THRASH, "--designs", "HYBRID_DFB", "--baseline", "HYBRID_DFB")
    assert code == 0
    row = rows(out)["HYBRID_DFB"]
    assert float(row["relative_performance"]) == 1.0
    assert float(row["relative_lifetime"]) == 1.0
    assert float(row["energy_saving_pct"]) == 0.0
    assert float(row["mpki_delta"]) == 0.0


def test_missing_trace_exits_2(tmp_path, capsys):
    missing = tmp_path / "nope.trace"
    code, _ = run_cli(tmp_path, "--trace", str(missing))
    assert code == 2
    assert str(missing) in capsys.readouterr().err


def test_malformed_trace_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.trace"
    bad.write_text("R 0x40 10\nR 0x80 3\n")
    code, _ = run_cli(tmp_path, "--trace", str(bad))
    assert code == 2
    assert "line 2" in capsys.readouterr().err


def test_baseline_must_be_a_design(tmp_path, capsys):
    code, _ = run_cli(tmp_path, *THRASH, "--designs", "SRAM")
    assert code == 2
    assert "baseline" in capsys.readouterr().err


def test_plotdata_files(tmp_path):
    _, out = run_cli(tmp_path, *THRASH)
    lines = (out / "plot_relative_lifetime.dat").read_text().splitlines()
    assert "SRAM inf" in lines
    fractions = [line.split() for line in (out / "plot_fast_write_fraction.dat").read_text().splitlines()]
    assert [d for d, _ in fractions] == ["PCM", "SRAM", "HYBRID_LRU", "HYBRID_DFB"]
    assert all(0.0 <= float(v) <= 1.0 for _, v in fractions)


def test_plotdata_rejects_unknown_metric():
    result = run_experiment(ExperimentSpec(gen_cyclic(1, 9, 2)))
    with pytest.raises(ValueError, match="valid metrics: .*relative_lifetime"):
        emit_plotdata(result, "bogus")


def test_reruns_are_byte_identical(tmp_path):
    args = ["--generator", "skewed", "--accesses", "20000", "--sets-hot", "16", "--seed", "9"]
    run_cli(tmp_path, *args, out="a")
    run_cli(tmp_path, *args, "--jobs", "2", out="b")
    for name in ("results.csv", "results.json", "plot_energy_saving_pct.dat"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_config_file_and_flag_override(tmp_path):
    ini = tmp_path / "exp.ini"
    ini.write_text(
        "[experiment]\ndesigns = PCM, HYBRID_DFB\n\n"
        "[trace]\ngenerator = cyclic\nblocks_per_set = 9\nlaps = 4\nwrite_ratio = 0\n\n"
        "[cache]\nadapt_z = false  # fixed threshold\n"
    )
    code, out = run_cli(tmp_path, "--config", str(ini), "--laps", "6")
    assert code == 0
    doc = json.loads((out / "results.json").read_text())
    assert list(doc["designs"]) == ["PCM", "HYBRID_DFB"]
    assert doc["trace"]["laps"] == 6
    assert doc["designs"]["HYBRID_DFB"]["accesses"] == 54


@pytest.mark.parametrize(
    "text, message",
    [("[cache]\nbogus = 1\n", "unknown key 'bogus'"), ("[cache]\nlaps = 3\n", "belongs in [trace]"),
     ("[cache]\nadapt_z = maybe\n", "bad value for adapt_z")],
)
def test_config_errors(tmp_path, capsys, text, message):
    ini = tmp_path / "bad.ini"
    ini.write_text(text)
    code, _ = run_cli(tmp_path, "--config", str(ini), *THRASH)
    assert code == 2
    assert message in capsys.readouterr().err


def test_warmup_flag(tmp_path):
    _, out = run_cli(tmp_path, *THRASH, "--warmup-accesses", "9")
    table = rows(out)
    assert all(r["accesses"] == "81" for r in table.values())
    assert table["HYBRID_LRU"]["hits"] == "0"


def test_gen_then_run_from_file(tmp_path):
    path = tmp_path / "t.trace.gz"
    assert main(["gen", "--quiet", str(path), "--generator", "zipf", "--accesses", "500", "--seed", "3"]) == 0
    assert len(read_trace(path)) == 500
    code, out = run_cli(tmp_path, "--trace", str(path), "--designs", "PCM")
    assert code == 0 and rows(out)["PCM"]["accesses"] == "500"


def test_gen_requires_generator(tmp_path):
    assert main(["gen", str(tmp_path / "x.trace")]) == 2


def test_filter_command(tmp_path, capsys):
    src, dst = tmp_path / "in.trace", tmp_path / "out.trace"
    write_trace(gen_cyclic(1, 4, 50, num_sets=1), src)
    assert main(["filter", str(src), str(dst)]) == 0
    assert "200 accesses in, 4 out" in capsys.readouterr().out
    assert len(read_trace(dst)) == 4


def test_devices_command(capsys):
    assert main(["devices"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["PCM-8MB"]["write_latency_ns"] == 150.384
    assert doc["SRAM-1MB"]["endurance_limited"] is False
    assert doc["hybrid"]["area_mm2"] == pytest.approx(1.675)


def test_devices_with_override_file(tmp_path, capsys):
    f = tmp_path / "pcm.txt"
    f.write_text("write_latency_ns = 100.0\n")
    assert main(["devices", "--pcm-params", str(f)]) == 0
    assert json.loads(capsys.readouterr().out)["PCM-8MB"]["write_latency_ns"] == 100.0


def test_table_printed_without_quiet(tmp_path, capsys):
    assert main(["run", "--out", str(tmp_path / "o"), *THRASH]) == 0
    text = capsys.readouterr().out
    assert "HYBRID_DFB" in text and "relative metrics against PCM" in text
