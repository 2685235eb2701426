import numpy as np
import pytest

from cropopt import cli
from cropopt.cli import main
from cropopt.exceptions import SolverError
from cropopt.io import SUMMARY_HEADER, read_csv
from cropopt.mesh import load_mesh


def _config(tmp_path, domain, solver="oracle", h=0.05, extra=""):
    path = tmp_path / f"{domain}.cfg"
    path.write_text(f"domain = {domain}\ndomain.h = {h}\nD = 0.01\nalpha = 1\nT = 1\n"
                    f"L = 0.4\nsolver = {solver}\n{extra}", encoding="utf-8")
    return path


def _run(args, tmp_path, out="out"):
    return main([*args[:1], "--config", str(args[1]), "--out", str(tmp_path / out)])


def test_mesh_command(tmp_path, capsys):
    cfg = _config(tmp_path, "omega4", h=0.1)
    assert _run(["mesh", cfg], tmp_path) == 0
    m = load_mesh(tmp_path / "out" / "mesh.txt")
    assert m.area == pytest.approx(4.0)
    assert "vertices" in capsys.readouterr().out


def test_solve_oracle_disk(tmp_path):
    cfg = _config(tmp_path, "omega3")
    assert _run(["solve", cfg], tmp_path) == 0
    out = tmp_path / "out"
    header, rows = read_csv(out / "summary.csv")
    assert ",".join(header) == SUMMARY_HEADER and len(rows) == 1
    row = dict(zip(header, rows[0]))
    assert row["domain"] == "omega3"
    assert abs(float(row["area"]) - 0.4) <= 1e-12
    assert float(row["J"]) == pytest.approx(2.83285, rel=0.05)
    m = load_mesh(out / "mesh.txt")
    _, control = read_csv(out / "control_oracle.csv")
    _, state = read_csv(out / "state_oracle.csv")
    assert len(control) == m.n_triangles and len(state) == m.n_vertices
    assert not (out / "history_oracle.csv").exists()


def test_solve_both_on_cross(tmp_path):
    cfg = _config(tmp_path, "omega2", solver="both")
    assert _run(["solve", cfg], tmp_path) == 0
    out = tmp_path / "out"
    _, rows = read_csv(out / "summary.csv")
    assert len(rows) == 2
    J_oracle, J_uzawa = float(rows[0][6]), float(rows[1][6])
    assert abs(J_oracle - J_uzawa) <= 1e-2
    header, hist = read_csv(out / "history_uzawa.csv")
    assert header == ["iter", "J", "area", "lambda"] and len(hist) > 0
    assert rows[1][8] == "" and rows[1][9] == ""


def test_solve_zero_budget(tmp_path):
    cfg = _config(tmp_path, "omega4", h=0.1)
    cfg.write_text(cfg.read_text().replace("L = 0.4", "L = 0"))
    assert _run(["solve", cfg], tmp_path) == 0
    out = tmp_path / "out"
    _, control = read_csv(out / "control_oracle.csv")
    assert all(float(r[2]) == 0.0 for r in control)
    from cropopt.mesh import benchmark_domain, generate_mesh
    from cropopt.model import ProblemParams, cost_J
    m = generate_mesh(benchmark_domain(4, 0.1))
    J0 = cost_J(m, ProblemParams(L=0.0), np.zeros(m.n_triangles))
    _, rows = read_csv(out / "summary.csv")
    assert float(rows[0][6]) == J0


def test_compare_disk(tmp_path, capsys):
    cfg = _config(tmp_path, "omega3", extra="baselines = 20\nseed = 3\n")
    assert _run(["compare", cfg], tmp_path) == 0
    header, rows = read_csv(tmp_path / "out" / "compare.csv")
    assert header == ["domain", "control", "seed", "J", "area"]
    J = [float(r[3]) for r in rows]
    assert J == sorted(J, reverse=True)
    assert rows[0][1] == "oracle" and rows[-1][1] == "annulus"
    assert sum(r[1] == "random" for r in rows) == 20
    assert {r[2] for r in rows if r[1] == "random"} == {str(s) for s in range(3, 23)}
    assert "PASS" in capsys.readouterr().out


def test_compare_deterministic(tmp_path):
    cfg = _config(tmp_path, "omega3", h=0.1, extra="baselines = 5\nseed = 11\n")
    assert _run(["compare", cfg], tmp_path, "a") == 0
    assert _run(["compare", cfg], tmp_path, "b") == 0
    assert (tmp_path / "a" / "compare.csv").read_bytes() == \
        (tmp_path / "b" / "compare.csv").read_bytes()


def test_solve_deterministic(tmp_path):
    cfg = _config(tmp_path, "omega1", solver="both", h=0.1,
                  extra="uzawa.max_iters = 50\n")
    assert _run(["solve", cfg], tmp_path, "a") == 0
    assert _run(["solve", cfg], tmp_path, "b") == 0
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_compare_benchmark_ordering(tmp_path, capsys):
    cfg = _config(tmp_path, "omega3", extra="baselines = 2\n")
    assert main(["compare", "--config", str(cfg), "--out", str(tmp_path / "o"),
                 "--benchmark"]) == 0
    assert "omega2 > omega4 > omega1 > omega3" in capsys.readouterr().out
    _, rows = read_csv(tmp_path / "o" / "compare.csv")
    assert {r[0] for r in rows} == {"omega1", "omega2", "omega3", "omega4"}


def test_compare_flags_annulus_failure(tmp_path, monkeypatch):
    import cropopt.oracle as oracle_mod
    real = oracle_mod.make_annulus_control

    def inflated(mesh, params):
        res = real(mesh, params)
        return type(res)(np.ones_like(res.control), res.inner_radius, res.threshold,
                         res.quantization_gap)
    monkeypatch.setattr(cli, "make_annulus_control", inflated)
    cfg = _config(tmp_path, "omega3", h=0.1, extra="baselines = 2\n")
    assert _run(["compare", cfg], tmp_path) == cli.EXIT_CHECK


def test_symcheck_rectangle(tmp_path, capsys):
    cfg = _config(tmp_path, "omega4")
    assert _run(["symcheck", cfg], tmp_path) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "star_violation = 0" in out


def test_symcheck_disk_reports_ball_distance(tmp_path, capsys):
    cfg = _config(tmp_path, "omega3", h=0.025)
    assert _run(["symcheck", cfg], tmp_path) == 0
    assert "ball_symdiff" in capsys.readouterr().out


def test_symcheck_failure_exit(tmp_path):
    cfg = _config(tmp_path, "omega3", h=0.1, extra="symcheck.disk_tol = 0.001\n")
    assert _run(["symcheck", cfg], tmp_path) == cli.EXIT_CHECK


def test_symcheck_refuses_lshape(tmp_path, capsys):
    cfg = _config(tmp_path, "omega1", h=0.1)
    assert _run(["symcheck", cfg], tmp_path) == 2
    assert "rectangle and disk" in capsys.readouterr().err


def test_config_error_exit(tmp_path, capsys):
    cfg = _config(tmp_path, "omega3", extra="eta = 0.5\n")
    assert _run(["solve", cfg], tmp_path) == 2
    assert "line 8" in capsys.readouterr().err
    assert main(["solve", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_solver_error_exit(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise SolverError("conjugate gradients did not converge", 0.5)
    monkeypatch.setattr(cli, "solve_exact", broken)
    cfg = _config(tmp_path, "omega4", h=0.1)
    assert _run(["solve", cfg], tmp_path) == 3
    assert "did not converge" in capsys.readouterr().err


def test_output_dir_from_config(tmp_path, monkeypatch):
    cfg = _config(tmp_path, "omega4", h=0.2, extra=f"output_dir = {tmp_path / 'cfgout'}\n")
    assert main(["mesh", "--config", str(cfg)]) == 0
    assert (tmp_path / "cfgout" / "mesh.txt").exists()


def test_usage_error_without_command():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
