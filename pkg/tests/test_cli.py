import xml.etree.ElementTree as ET
from decimal import Decimal

import pytest

from optdyn.cli import main

D = Decimal


def run_cli(*args):
    return main(list(args))


def test_run_writes_csv_and_svg(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = run_cli(
        "run", "--algo", "oftrl", "--reg", "entropy", "--eta", "0.1",
        "--game", "hard:0.01", "--iters", "50", "--precision", "32",
        "--out", str(out), "--svg",
    )
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[1] == "t,x1,y1,gap,Ex,Ey,eta_t,clamps"
    assert "game=hard:0.01" in text.splitlines()[0]
    assert len(text.splitlines()) == 52  # echo + header + 50 rows
    svg = tmp_path / "t.svg"
    assert svg.exists()
    root = ET.fromstring(svg.read_text())
    assert root.tag.endswith("svg")
    assert len(list(root.iter())) > 10


def test_run_single_iteration_uniform_row(tmp_path):
    out = tmp_path / "one.csv"
    assert run_cli(
        "run", "--algo", "oomd", "--reg", "euclid", "--eta", "0.1",
        "--game", "hard:0.25", "--iters", "1", "--precision", "32",
        "--out", str(out),
    ) == 0
    row = out.read_text().splitlines()[2].split(",")
    assert row[0] == "1" and row[1] == "0.5" and row[2] == "0.5"


def test_run_rejects_bad_flags(tmp_path):
    out = str(tmp_path / "x.csv")
    base = ["run", "--algo", "oftrl", "--game", "hard:0.01", "--iters", "5",
            "--precision", "32", "--out", out]
    assert run_cli(*base, "--reg", "tsallis:1.5", "--eta", "0.1") == 1
    assert run_cli(*base, "--reg", "huber", "--eta", "0.1") == 1
    assert run_cli(*base, "--reg", "entropy") == 1  # no stepsize
    assert run_cli(*base, "--reg", "entropy", "--eta", "0.1",
                   "--adagrad-eps", "0.1") == 1  # both stepsizes
    assert run_cli(*base, "--reg", "entropy", "--eta", "-1") == 1
    assert run_cli("run", "--algo", "oftrl", "--reg", "entropy", "--eta", "0.1",
                   "--game", "mystery:1", "--iters", "5", "--precision", "32",
                   "--out", out) == 1
    assert run_cli("run", "--algo", "oftrl", "--reg", "entropy", "--eta", "0.1",
                   "--game", "hard:0.01", "--iters", "5", "--precision", "8",
                   "--out", out) == 1


def test_run_accepts_tsallis_and_game_file(tmp_path):
    game_file = tmp_path / "g.txt"
    game_file.write_text("2 2 1\n0.51 0.5\n0 1\n")
    out = tmp_path / "t.csv"
    assert run_cli(
        "run", "--algo", "oftrl", "--reg", "tsallis:0.5", "--eta", "0.1",
        "--game", f"file:{game_file}", "--iters", "3", "--precision", "32",
        "--out", str(out),
    ) == 0
    assert len(out.read_text().splitlines()) == 5


def test_stages_round_trip_matches_in_memory(tmp_path, capsys, ctx64):
    out = tmp_path / "t.csv"
    assert run_cli(
        "run", "--algo", "oftrl", "--reg", "entropy", "--eta", "0.1",
        "--game", "hard:0.05", "--iters", "700", "--precision", "64",
        "--out", str(out), "--full-precision",
    ) == 0
    capsys.readouterr()
    assert run_cli(
        "stages", "--traj", str(out), "--delta", "0.05", "--reg", "entropy",
        "--eta", "0.1", "--precision", "64",
    ) == 0
    text = capsys.readouterr().out

    from optdyn import (
        AlgorithmSpec, ConstantStep, NegativeEntropy, constants,
        detect_stages, hard_instance, run_oftrl,
    )
    spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1")))
    traj = run_oftrl(hard_instance(D("0.05")), spec, 700, ctx64)
    with ctx64.activate():
        want = detect_stages(traj, D("0.05"), constants(NegativeEntropy()))
    assert want.to_text() == text.strip()
    assert f"T_s={want.t_s}" in text
    assert want.t2 is not None


def test_stages_thinned_run_still_exact(tmp_path, capsys):
    out = tmp_path / "thin.csv"
    assert run_cli(
        "run", "--algo", "oftrl", "--reg", "entropy", "--eta", "0.1",
        "--game", "hard:0.05", "--iters", "700", "--precision", "64",
        "--out", str(out), "--thin", "97",
    ) == 0
    capsys.readouterr()
    assert run_cli(
        "stages", "--traj", str(out), "--delta", "0.05", "--reg", "entropy",
        "--eta", "0.1",
    ) == 0
    thin_text = capsys.readouterr().out
    # crossing iterates were force-retained, so first passages stay exact
    for line in ("T_s=51", "T1=99", "T2=560"):
        assert line in thin_text


def test_verify_commands(capsys):
    assert run_cli("verify", "--reg", "euclid", "--delta", "auto") == 0
    out = capsys.readouterr().out
    assert "passed=true" in out and "out_of_range=false" in out

    assert run_cli("verify", "--reg", "entropy", "--delta", "auto") == 0
    out = capsys.readouterr().out
    assert "passed=true" in out
    assert "delta_prime_discrepancy=true" in out

    assert run_cli("verify", "--reg", "logbar", "--delta", "0.4") == 0
    out = capsys.readouterr().out
    assert "out_of_range=true" in out


def test_lift_check_identity_and_small(capsys):
    assert run_cli("lift-check", "--delta", "0.05", "--n", "1", "--reg", "euclid",
                   "--eta", "0.1", "--iters", "20") == 0
    out = capsys.readouterr().out
    assert "max_within_half_spread=0" in out
    assert run_cli("lift-check", "--delta", "0.05", "--n", "2", "--reg", "entropy",
                   "--eta", "0.1", "--iters", "30") == 0
    assert "passed=true" in capsys.readouterr().out


def test_sweep_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run_cli(
        "sweep", "--deltas", "0.05,0.05,0.1", "--reg", "entropy", "--eta", "0.1",
        "--iters", "800", "--precision", "64", "--thin", "10", "--out", str(out),
    ) == 0
    err = capsys.readouterr().err
    assert "duplicate delta" in err
    lines = out.read_text().splitlines()
    assert lines[0] == "delta,flat_len,peak_gap,peak_iteration,complete"
    assert len(lines) == 3  # deduplicated
    assert lines[1].startswith("0.05,")


def test_sweep_empty_deltas(tmp_path):
    out = tmp_path / "empty.csv"
    assert run_cli("sweep", "--deltas", "", "--reg", "entropy", "--eta", "0.1",
                   "--iters", "10", "--out", str(out)) == 0
    assert out.read_text() == "delta,flat_len,peak_gap,peak_iteration,complete\n"


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "optdyn", "verify", "--reg", "euclid", "--delta", "auto"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "passed=true" in proc.stdout
