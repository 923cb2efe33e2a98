import json

from polyprog.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_homogeneous_example(capsys):
    code, out, _ = run_cli(capsys, "analyze", "x, x+y, x+2y, x+y^3")
    assert code == 0
    doc = json.loads(out)
    assert doc["homogeneous"] is True
    assert doc["complexity"] == [1, 1, 1, 0]
    assert doc["layer_dims"] == {"1": 3, "2": 4}
    assert doc["eligible_upto_4"] is True


def test_analyze_inhomogeneous_example(capsys):
    code, out, _ = run_cli(capsys, "analyze", "x, x+y, x+2y, x+y^2")
    assert code == 0
    doc = json.loads(out)
    assert doc["homogeneous"] is False
    assert doc["inhomogeneity_witness"]["shared_poly"] == "y^2"
    assert doc["complexity"] == [2, 2, 2, 1]


def test_analyze_bad_expression(capsys):
    code, _, err = run_cli(capsys, "analyze", "x, x+y/2")
    assert code == 2
    assert "not integral" in err


def test_relations_listing(capsys):
    code, out, _ = run_cli(capsys, "relations", "x, x+y, x+2y", "--cap", "2")
    assert code == 0
    doc = json.loads(out)
    assert doc["dim"] == 1 and doc["stabilized"] is True


def test_gowers_table(capsys):
    code, out, _ = run_cli(capsys, "gowers", "--N", "101",
                           "--signal", "quadratic", "--s-max", "3")
    assert code == 0
    doc = json.loads(out)
    norms = {row["s"]: row["norm"] for row in doc["rows"]}
    assert abs(norms[2] - 101 ** -0.25) < 1e-9
    assert abs(norms[3] - 1.0) < 1e-9


def test_count_small_schedule(capsys):
    code, out, _ = run_cli(capsys, "count", "x, x+y^2, x+2y^2",
                           "--N", "11,31", "--seed", "5")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["rows"]) == 2
    for row in doc["rows"]:
        assert row["difference"] < 0.5


def test_popdiff(capsys):
    code, out, _ = run_cli(capsys, "popdiff", "x, x+y, x+2y",
                           "--N", "31", "--seed", "5", "--epsilon", "0.05")
    assert code == 0
    doc = json.loads(out)
    assert 0 in doc["qualifying"]


def test_weyl_scenario(tmp_path, capsys):
    scenario = {
        "order": 2,
        "system": "generators",
        "generators": [["sqrt2", "0"], ["0", "sqrt2+1/3"]],
        "progression": "x, x+y, x+2y, x+y^2",
        "N": 120,
        "radius": 1,
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario))
    code, out, _ = run_cli(capsys, "weyl", str(path),
                           "--decay-threshold", "0.9")
    assert code == 0
    doc = json.loads(out)
    assert doc["dim"] == 6 and doc["cosets"] == 3
    assert doc["confinement_distance"] < 1e-6
    assert doc["passed"] is True


def test_weyl_standard_scenario(tmp_path, capsys):
    scenario = {
        "order": 2,
        "rotation": "sqrt2",
        "base": ["sqrt3", "sqrt5"],
        "progression": "x, x+y, x+2y, x+y^3",
        "N": 100,
        "radius": 1,
    }
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario))
    code, out, _ = run_cli(capsys, "weyl", str(path),
                           "--decay-threshold", "0.9")
    assert code == 0
    doc = json.loads(out)
    assert doc["dim"] == 7 and doc["cosets"] == 1


def test_reports_byte_stable(capsys):
    _, first, _ = run_cli(capsys, "analyze", "x, x+y, x+2y, x+y^2")
    _, second, _ = run_cli(capsys, "analyze", "x, x+y, x+2y, x+y^2")
    assert first == second


def test_out_dir_and_csv(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "relations", "x, x+y, x+2y",
                           "--out", str(tmp_path), "--format", "csv")
    assert code == 0
    assert (tmp_path / "relations.json").exists()
    assert (tmp_path / "relations.csv").exists()
    doc = json.loads((tmp_path / "relations.json").read_text())
    assert doc["dim"] == 1


def test_config_file_overrides(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"epsilon": 0.5, "seed": 77}))
    code, out, _ = run_cli(capsys, "--config", str(cfg),
                           "popdiff", "x, x+y, x+2y", "--N", "31")
    assert code == 0
    doc = json.loads(out)
    assert doc["epsilon"] == 0.5


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run_cli(capsys, "--config", str(cfg),
                           "relations", "x, x+y")
    assert code == 2 or "bogus" in err
