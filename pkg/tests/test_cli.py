import csv
import json

import pytest

from firefight.cli import main


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_enclose_ring_baseline(tmp_path, capsys):
    code, io = _run(capsys, "enclose", "--c", 4, "--t", 2, "--baseline", "ring",
                    "--seed", 1, "--out", tmp_path)
    assert code == 0
    assert "enclosed=true time=1 burned=1" in io.out
    assert _rows(tmp_path / "summary.csv")[0]["burned"] == "1"


def test_enclose_ea_writes_artifacts(tmp_path, capsys):
    code, io = _run(capsys, "enclose", "--c", 2, "--t", 10, "--seed", 7, "--generations", 20,
                    "--out", tmp_path, "--render", "ascii", "--every", 4)
    assert code == 0
    assert io.out.startswith("enclosed=")
    for name in ("run.jsonl", "convergence.csv", "convergence.png", "best.genome",
                 "summary.csv"):
        assert (tmp_path / name).exists(), name
    assert len(_rows(tmp_path / "convergence.csv")) == 20
    head = json.loads((tmp_path / "run.jsonl").read_text().splitlines()[0])
    assert head["seed"] == 7
    assert list(tmp_path.glob("frame_*.txt"))


def test_enclose_rejects_small_c(tmp_path, capsys):
    code, io = _run(capsys, "enclose", "--c", "0.9", "--seed", 1, "--out", tmp_path)
    assert code == 2 and "error" in io.err


def test_bad_rational_exit_2(tmp_path, capsys):
    code, _ = _run(capsys, "enclose", "--c", "abc", "--seed", 1, "--out", tmp_path)
    assert code == 2


def test_seed_is_printed_when_drawn(tmp_path, capsys):
    code, io = _run(capsys, "enclose", "--c", 4, "--baseline", "ring", "--out", tmp_path)
    assert code == 0 and io.out.startswith("seed=")


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"c": "4", "t": 2, "baseline": "ring", "seed": 3}))
    code, io = _run(capsys, "enclose", "--config", cfg, "--out", tmp_path)
    assert code == 0 and "burned=1" in io.out
    code, io = _run(capsys, "enclose", "--config", cfg, "--c", "2", "--t", 10,
                    "--baseline", "optimal-c2",
                    "--out", tmp_path)
    assert "time=8 burned=18" in io.out
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert _run(capsys, "enclose", "--config", bad, "--out", tmp_path)[0] == 2


def test_replay_optimal_twice_identical_frames(tmp_path, capsys):
    code, _ = _run(capsys, "enclose", "--c", 2, "--baseline", "optimal-c2", "--seed", 1,
                   "--out", tmp_path)
    assert code == 0
    genome = tmp_path / "best.genome"
    outs = []
    for name in ("a", "b"):
        code, io = _run(capsys, "replay", genome, "--c", 2, "--tmax", 20, "--seed", 1,
                        "--render", "svg", "--out", tmp_path / name)
        assert code == 0
        assert "time=8 burned=18" in io.out
        outs.append([p.read_bytes() for p in sorted((tmp_path / name).glob("frame_*.svg"))])
    assert outs[0] == outs[1] and len(outs[0]) == 8


def test_replay_bad_genome(tmp_path, capsys):
    bad = tmp_path / "bad.genome"
    bad.write_text("start 0\nN F\n")
    code, io = _run(capsys, "replay", bad, "--c", 2, "--seed", 1, "--out", tmp_path)
    assert code == 2 and "line 1" in io.err
    missing = tmp_path / "missing.genome"
    assert _run(capsys, "replay", missing, "--c", 2, "--seed", 1, "--out", tmp_path)[0] == 1


def test_highway_symmetric_baseline(tmp_path, capsys):
    code, io = _run(capsys, "highway", "--baseline", "symmetric", "--c", "1.2", "--d", 20,
                    "--seed", 1, "--out", tmp_path)
    assert code == 0
    r = int(io.out.split()[0].split("=")[1])
    assert abs(r - 48) <= 2
    assert (tmp_path / "profile.png").exists()


def test_highway_diagonal_survives(tmp_path, capsys):
    code, io = _run(capsys, "highway", "--baseline", "diagonal", "--c", "1.5", "--d", 20,
                    "--tmax", 500, "--seed", 1, "--out", tmp_path)
    assert code == 0 and io.out.startswith("r=none")


def test_highway_climb_and_replay(tmp_path, capsys):
    code, io = _run(capsys, "highway", "--c", "1.2", "--d", 10, "--iterations", 200,
                    "--restarts", 2, "--seed", 5, "--out", tmp_path)
    assert code == 0
    first = io.out
    code, io = _run(capsys, "replay", tmp_path / "best.genome", "--scenario", "highway",
                    "--c", "1.2", "--d", 10, "--seed", 5, "--out", tmp_path / "re")
    assert code == 0 and io.out == first


def test_sweep_single_row(tmp_path, capsys):
    code, io = _run(capsys, "sweep", "--c-from", 2, "--c-to", 2, "--t", 10, "--seed", 7,
                    "--generations", 400, "--out", tmp_path)
    assert code == 0
    rows = _rows(tmp_path / "sweep.csv")
    assert len(rows) == 1 and rows[0]["c"] == "2.0"
    assert (tmp_path / "sweep.png").exists()


def test_sweep_rejects_bad_range(tmp_path, capsys):
    code, _ = _run(capsys, "sweep", "--c-from", 2, "--c-to", "1.8", "--seed", 1, "--out", tmp_path)
    assert code == 2


def test_oracle_command(tmp_path, capsys):
    code, io = _run(capsys, "oracle", "--c", 4, "--tmax", 1, "--seq-len", 3, "--start", 0, 1,
                    "--seed", 1, "--out", tmp_path)
    assert code == 0 and "burned=1" in io.out


def test_baselines_table(tmp_path, capsys):
    code, io = _run(capsys, "baselines", "--d", 20, "--seed", 1, "--out", tmp_path)
    assert code == 0
    rows = _rows(tmp_path / "baselines.csv")
    assert [r["c"] for r in rows] == ["1.1", "1.2", "1.3", "1.4", "1.5"]
    assert rows[-1]["diagonal_r"] == "none"
    assert (tmp_path / "baselines.png").exists()


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
