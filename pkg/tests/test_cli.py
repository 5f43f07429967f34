from __future__ import annotations

import json

from heunquant.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_roots_all_c(capsys):
    code, out, _ = run(capsys, "roots", "--mode", "c", "--a", "1", "--b", "1/10", "--N", "10", "--L", "10", "--all")
    assert code == 0
    vals = [float(line.split()[1]) for line in out.splitlines() if not line.startswith("#")]
    assert [round(v, 6) for v in vals] == [0.074446, 0.086344, 0.104144, 0.13491, 0.20725, 1.571375]


def test_roots_all_B(capsys):
    code, out, _ = run(capsys, "roots", "--mode", "B", "--A", "1", "--N", "10", "--L", "10", "--all")
    assert code == 0
    assert len([l for l in out.splitlines() if not l.startswith("#")]) == 11


def test_roots_selected_and_json(capsys):
    code, out, _ = run(capsys, "roots", "--mode", "tension", "--N", "10", "--L", "10")
    assert code == 0 and out.strip().startswith("0.366018")
    code, out, _ = run(capsys, "roots", "--mode", "B", "--A", "1", "--N", "2", "--json")
    assert code == 0 and len(json.loads(out)["roots"]) == 3


def test_tension_N0_exit_3(capsys):
    code, _, err = run(capsys, "roots", "--mode", "tension", "--m", "1", "--N", "0", "--L", "0")
    assert code == 3 and "no solution as N=0" in err


def test_config_errors_exit_2(capsys):
    assert run(capsys, "roots", "--mode", "c", "--A", "1", "--N", "1")[0] == 2
    assert run(capsys, "roots", "--mode", "c", "--a", "1", "--N", "1")[0] == 2
    assert run(capsys, "spectrum", "--mode", "c", "--a", "1", "--b", "1", "--Nmin", "5", "--Nmax", "2")[0] == 2
    assert run(capsys, "roots", "--mode", "c", "--a", "x/y", "--b", "1", "--N", "1")[0] == 2
    assert run(capsys, "shoot", "--variable", "xi", "--E", "7")[0] == 2


def test_table5(capsys):
    code, out, _ = run(capsys, "spectrum", "--mode", "c", "--a", "1", "--b", "1/10", "--table5")
    assert code == 0
    rows = dict(line.split(",") for line in out.splitlines()[1:])
    assert round(float(rows["10"]), 7) == 0.0265903 and round(float(rows["20"]), 7) == 0.0207981


def test_spectrum_csv_is_byte_stable(capsys):
    argv = ("spectrum", "--mode", "tension", "--Nmin", "1", "--Nmax", "4", "--workers", "1")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second and len(first.splitlines()) == 1 + 2 + 3 + 4 + 5


def test_shoot_figures(capsys):
    code, out, _ = run(capsys, "shoot", "--fig", "3")
    assert code == 0 and len(out.splitlines()) == 9
    assert out.splitlines()[2].split(",")[:3] == ["fig3_2", "7.5", "flat"]
    code, out, _ = run(capsys, "shoot", "--fig", "1")
    assert code == 0 and len(out.splitlines()) == 13


def test_shoot_single_and_bisect(capsys):
    code, out, err = run(capsys, "shoot", "--E", "7.46")
    assert code == 0 and "classification=flat" in err and out.startswith("rho,y,yprime")
    code, out, _ = run(capsys, "shoot", "--a", "0", "--b", "0", "--variable", "xi", "--bisect",
                       "--E-lo", "7.4", "--E-hi", "7.7", "--max-iter", "30")
    assert code == 0 and json.loads(out)["E_star_decimal"].startswith("7.5")
    code, _, _ = run(capsys, "shoot", "--bisect", "--c", "7/2", "--E-lo", "7.27", "--E-hi", "7.31")
    assert code == 3


def test_fit_reference_model(capsys):
    code, out, _ = run(capsys, "fit", "--mode", "c", "--a", "1", "--b", "1/10", "--paper-model", "--Nmax", "8",
                       "--workers", "1")
    doc = json.loads(out)
    assert code == 0 and doc["family"] == "CfitRational" and "reference" in doc


def test_fit_rank_deficient_exit_4(capsys, tmp_path):
    table = tmp_path / "t.csv"
    table.write_text("N,L,value\n1,0,0.5\n2,1,0.4\n")
    code, _, _ = run(capsys, "fit", "--mode", "c", "--a", "1", "--b", "1/10", "--paper-model", "--table", str(table))
    assert code == 4


def test_config_file_and_force(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "roots.txt"
    cfg.write_text(f"# roots of the N=10 surface\nmode = c\na = 1\nb = 1/10\nN = 10\nL = 10\nall = true\nout = {out}\n")
    code, text, _ = run(capsys, "roots", "--config", str(cfg))
    assert code == 0 and out.read_text() == text
    assert run(capsys, "roots", "--config", str(cfg))[0] == 2
    assert run(capsys, "roots", "--config", str(cfg), "--force")[0] == 0
    # explicit flags win over the file
    code, text, _ = run(capsys, "roots", "--config", str(cfg), "--L", "0", "--force")
    assert code == 0 and "L=0" in text


def test_results_dir(capsys, tmp_path):
    code, _, _ = run(capsys, "growth", "--results-dir", str(tmp_path))
    assert code == 0
    doc = json.loads((tmp_path / "growth_growth.json").read_text())
    assert doc["stabilized"] is True


def test_help_lists_defaults(capsys):
    code, out, _ = run(capsys, "shoot", "--help")
    assert code == 0 and "default 5/2" in out and "--rho-max" in out
