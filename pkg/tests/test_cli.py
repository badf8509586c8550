import csv
import json

import pytest

from ccpolar.cli import load_config, main


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_construct_n8_swap(tmp_path, capsys):
    assert main(["construct", "--n", "8", "--k", "4", "--epsilon", "0.3", "--threshold", "0.5",
                 "--out-dir", str(tmp_path)]) == 0
    opt = json.loads((tmp_path / "optimized_layout.json").read_text())
    assert opt["kinds"] == "FFFFIIII" and opt["manifest"] == "manifest.json"
    swaps = json.loads((tmp_path / "swaps.json").read_text())["swaps"]
    assert [(s["i"], s["f"]) for s in swaps] == [(3, 4)]
    assert json.loads((tmp_path / "manifest.json").read_text())["command"] == "construct"
    assert "latency[sum-of-leaves]: 5 -> 2" in capsys.readouterr().out


def test_construct_zero_threshold(tmp_path):
    assert main(["construct", "--n", "8", "--k", "4", "--threshold", "0", "--out-dir", str(tmp_path)]) == 0
    base = json.loads((tmp_path / "baseline_layout.json").read_text())
    opt = json.loads((tmp_path / "optimized_layout.json").read_text())
    assert base["kinds"] == opt["kinds"] == "FFFIFIII"


def test_construct_1024_half_rate(tmp_path, capsys):
    assert main(["construct", "--n", "1024", "--rate", "0.5", "--threshold", "1e-3",
                 "--out-dir", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "swaps.json").read_text())["swaps"]
    out = capsys.readouterr().out
    assert "latency[one-per-mixed]: 266 -> 197" in out


def test_latency_from_layout_files(tmp_path, capsys):
    main(["construct", "--n", "8", "--k", "4", "--threshold", "0.5", "--out-dir", str(tmp_path)])
    capsys.readouterr()
    assert main(["latency", "--layout", str(tmp_path / "baseline_layout.json")]) == 0
    assert capsys.readouterr().out.startswith("sum-of-leaves: 5 cycles")
    assert main(["latency", "--layout", str(tmp_path / "optimized_layout.json"),
                 "--baseline", str(tmp_path / "baseline_layout.json")]) == 0
    assert "sum-of-leaves: 2 cycles (baseline 5, reduction 60.0%)" in capsys.readouterr().out


def test_latency_table_baseline_row(tmp_path, capsys):
    assert main(["latency", "--n", "1024", "--k", "307", "--threshold", "0", "--mode", "both",
                 "--out-dir", str(tmp_path)]) == 0
    rows = {r["mode"]: r for r in read_csv(tmp_path / "latency.csv")}
    assert rows["one-per-mixed"]["cycles"] == "303"
    assert set(rows) == {"sum-of-leaves", "plus-two-per-mixed", "one-per-mixed"}
    assert (tmp_path / "tree.json").exists()


def test_latency_requires_input():
    with pytest.raises(SystemExit):
        main(["latency"])


def write_cfg(path, text):
    path.write_text(text)
    return str(path)


def test_simulate_minimal(tmp_path):
    cfg = write_cfg(tmp_path / "c.txt", "n = 64\nk = 32\nebno_db = 2.0\nmax_frames = 100\nmin_frame_errors = 0\n")
    assert main(["simulate", "--config", cfg, "--workers", "1", "--out-dir", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "results.csv")
    assert len(rows) == 1 and rows[0]["frames"] == "100"
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert set(manifest["outputs"]) == {"results.csv", "results.json", "latency.csv"}


def test_simulate_seed_deterministic(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", json.dumps(
        {"n": 64, "rate": 0.5, "thresholds": [0.05], "ebno_db": [1.0, 2.0], "max_frames": 300}))
    outs = []
    for i, workers in enumerate(("1", "2")):
        d = tmp_path / f"o{i}"
        assert main(["simulate", "--config", cfg, "--seed", "42", "--workers", workers, "--out-dir", str(d)]) == 0
        outs.append([(d / f).read_bytes() for f in ("results.csv", "results.json", "latency.csv")])
    assert outs[0] == outs[1]


def test_simulate_flags_override_config(tmp_path):
    cfg = write_cfg(tmp_path / "c.txt", "n = 64\nk = 32\nebno_db = 1.0, 2.0\nmax_frames = 50\n")
    assert main(["simulate", "--config", cfg, "--ebno", "3", "--k", "20", "--workers", "1",
                 "--out-dir", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "results.csv")
    assert [r["ebno_db"] for r in rows] == ["3.0"] and rows[0]["rate"] == str(20 / 64)


@pytest.mark.parametrize("text", ["n = 64\nk = 32\nmax_frames = 0\n", "this is not a config\n",
                                  "{\"n\": 64, \"k\": 32, \"bogus\": 1}", "{broken json"])
def test_simulate_malformed_config(tmp_path, text, capsys):
    cfg = write_cfg(tmp_path / "bad.cfg", text)
    assert main(["simulate", "--config", cfg, "--workers", "1", "--out-dir", str(tmp_path)]) != 0
    assert "error" in capsys.readouterr().err


def test_simulate_missing_config_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.json"), "--out-dir", str(tmp_path)]) != 0


def test_load_config_key_value(tmp_path):
    cfg = write_cfg(tmp_path / "c.txt", "# comment\nn = 1024\nthresholds = 1e-4, 5e-4  # inline\nkernel = exact\n")
    assert load_config(cfg) == {"n": 1024, "thresholds": [1e-4, 5e-4], "kernel": "exact"}


def test_sweep_reference_grid(tmp_path):
    assert main(["sweep", "--mode", "one-per-mixed", "--out-dir", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "latency.csv")
    assert len(rows) == 36
    hit = [r for r in rows if r["n"] == "2048" and r["rate"] == "0.3" and r["T_h"] == "1e-16"]
    assert hit[0]["cycles"] == "493" and float(hit[0]["reduction_percent"]) == pytest.approx(14.41, abs=0.01)


def test_sweep_config(tmp_path):
    cfg = write_cfg(tmp_path / "s.txt", "n = 256, 512\nrate = 0.5\nthresholds = 1e-3, 1e-2\n")
    assert main(["sweep", "--config", cfg, "--mode", "sum-of-leaves", "--out-dir", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "latency.csv")) == 6
