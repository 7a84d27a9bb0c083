import numpy as np
import pytest

from dicat import oracle
from dicat.blockfile import load_block
from dicat.cli import build_parser, main
from dicat.export import read_csv_field
from dicat.grid import make_domain


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_precompute_small_matches_oracle(tmp_path, capsys):
    out = tmp_path / "c2.dicat"
    code, io = run(capsys, "precompute", "--lx", 2, "--ly", 2, "--target", 1e-12, "--out", out)
    assert code == 0 and "Pre-comp" in io.out
    mask = np.zeros((5, 5), bool)
    mask[2, 2] = True
    g = np.zeros((5, 5))
    g[2, 2] = 1
    ref = oracle.direct_solve_2d_small(make_domain(2, 5, 5, g, extra_boundary=mask))
    np.testing.assert_allclose(load_block(out).H0, ref, atol=1e-12)


def test_precompute_full_size(tmp_path, capsys):
    out = tmp_path / "cat100.dicat"
    code, _ = run(capsys, "precompute", "--lx", 100, "--ly", 100, "--target", 1e-3, "--out", out)
    assert code == 0
    assert load_block(out).residual_fluid <= 1e-3


def test_precompute_missing_out(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["precompute", "--lx", "2"])
    assert exc.value.code == 1


def test_precompute_bad_extent(tmp_path, capsys):
    code, io = run(capsys, "precompute", "--lx", 1, "--out", tmp_path / "x.dicat")
    assert code == 1 and "error" in io.err


def test_precompute_unwritable(tmp_path, capsys):
    code, _ = run(capsys, "precompute", "--lx", 3, "--out", tmp_path / "no" / "x.dicat")
    assert code == 1


def test_solve_s1_coarse_target(tmp_path, capsys, desk_blocks):
    out = tmp_path / "s1.csv"
    code, io = run(capsys, "solve", "--problem", "s1", "--size", 100, "--target", 0.1,
                   "--block", desk_blocks[100][0], "--out", out)
    assert code == 0 and "error" in io.out
    assert np.abs(read_csv_field(out) - 100).max() <= 0.1
    assert (tmp_path / "s1.csv.trace.csv").exists()


def test_solve_s2_desk_scale(tmp_path, capsys, desk_blocks):
    out = tmp_path / "s2.csv"
    target = 0.05
    code, _ = run(capsys, "solve", "--problem", "s2", "--size", 200, "--target", target,
                  "--block", desk_blocks[200][0], "--out", out)
    assert code == 0
    g = np.zeros((200, 200))
    g[0, :] = 100
    ref = oracle.sparse_solve(make_domain(2, 200, 200, g))
    assert np.abs(read_csv_field(out) - ref).max() <= 10 * target


def test_solve_ode_columns(tmp_path, capsys):
    out = tmp_path / "ode.csv"
    code, _ = run(capsys, "solve", "--problem", "ode", "--size", 500, "--out", out)
    assert code == 0
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert data.dtype.names == ("x", "y", "value", "analytic")
    np.testing.assert_allclose(data["analytic"], np.cos(data["x"]) * np.exp(-data["x"] / 10))


def test_solve_gs_and_formats(tmp_path, capsys):
    code, io = run(capsys, "solve", "--problem", "poisson2d", "--size", 20, "--target", 1e-6,
                   "--solver", "gs", "--out", tmp_path / "p.pgm", "--format", "pgm")
    assert code == 0 and "sweeps" in io.out
    assert (tmp_path / "p.pgm").read_bytes().startswith(b"P5")


def test_solve_gs_reaches_target_against_reference(tmp_path, capsys):
    out = tmp_path / "s2.csv"
    code, io = run(capsys, "solve", "--problem", "s2", "--size", 30, "--target", 0.1,
                   "--solver", "gs", "--out", out)
    assert code == 0
    ref = oracle.sparse_solve(make_domain(2, 30, 30, np.pad(np.full((1, 30), 100.0), ((0, 29), (0, 0)))))
    assert np.abs(read_csv_field(out) - ref).max() <= 0.1


def test_solve_requires_block(tmp_path, capsys):
    code, io = run(capsys, "solve", "--problem", "s1", "--size", 10, "--out", tmp_path / "x.csv")
    assert code == 1 and "--block" in io.err


def test_solve_unknown_problem(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--problem", "heat", "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 1


def test_solve_guard_failure_exit_code(tmp_path, capsys):
    blk = tmp_path / "coarse.dicat"
    run(capsys, "precompute", "--lx", 19, "--target", 1e-2, "--out", blk)
    code, _ = run(capsys, "solve", "--problem", "s1", "--size", 20, "--target", 1e-8,
                  "--block", blk, "--out", tmp_path / "x.csv")
    assert code == 2


def test_threads_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("DICAT_THREADS", "many")
    code, _ = run(capsys, "precompute", "--lx", 2, "--out", tmp_path / "x.dicat")
    assert code == 1


def test_bench_single_row(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code, io = run(capsys, "bench", "--scenario", "S1", "--sizes", "20", "--solvers", "di",
                   "--out", out)
    assert code == 0 and "Pre-comp" in io.out
    rows = out.read_text().splitlines()
    assert len(rows) == 2 and rows[0].startswith("scenario,size,solver,target,precomp,init")
    assert rows[1].split(",")[9] == "1.0"


def test_bench_large_needs_flag(capsys):
    code, io = run(capsys, "bench", "--sizes", "1000")
    assert code == 1 and "--large" in io.err


def test_large_flag_exists():
    args = build_parser().parse_args(["bench", "--large"])
    assert args.large


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "dicat", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "precompute" in r.stdout
