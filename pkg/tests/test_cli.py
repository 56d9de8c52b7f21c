import csv
import io
import json
import math

import pytest

from widom import cli
from widom.cli import RunConfig
from widom.descriptors import DescriptorError

SQUARE = '[{"type":"intervals","data":[[-1,1]]},{"type":"intervals","data":[[-1,1]]}]'
X2_HALF = '{"terms":[{"alpha":[2],"re":1},{"alpha":[0],"re":-0.5}]}'


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# ---------------------------------------------------------------------------
# widom tables
# ---------------------------------------------------------------------------


def test_widom_table_on_the_square():
    out = rows(cli.render(["widom", "--set", SQUARE, "--max-total-degree", "3"]))
    assert len(out) == 10
    assert [r["alpha"] for r in out[:6]] == ["0 0", "1 0", "0 1", "2 0", "1 1", "0 2"]
    assert float(out[0]["Winf"]) == 1.0
    assert all(float(r["Winf"]) >= 2.0 - 1e-9 for r in out[1:])


def test_widom_table_on_the_polydisk():
    out = rows(cli.render(["widom", "--set", "polydisk:2", "--max-total-degree", "2"]))
    assert len(out) == 6
    assert all(float(r["Winf"]) == pytest.approx(1.0, abs=1e-12) for r in out)


def test_widom_table_of_degree_zero():
    out = rows(cli.render(["widom", "--set", SQUARE, "--max-total-degree", "0"]))
    assert len(out) == 1 and out[0]["alpha"] == "0 0"


def test_widom_table_on_the_ball_reports_sup_factors():
    out = rows(cli.render(["widom", "--set", "ball2", "--max-total-degree", "2"]))
    assert len(out) == 6
    # (1, 1): |z1 z2| <= 1/2 on the sphere and tau^- = 1/sqrt(2)
    assert float(out[4]["Winf"]) == pytest.approx(0.5 / 0.5, rel=1e-12)


# ---------------------------------------------------------------------------
# profiles, capacities, one-dimensional commands
# ---------------------------------------------------------------------------


def _marker(out, name):
    return next(r for r in out if r["marker"] == name)


def test_profile_of_the_real_ball():
    out = rows(cli.render(["profile", "--set", "realball2", "--grid", "1001"]))
    m = _marker(out, "tau_minus")
    assert float(m["theta1"]) == pytest.approx(0.4, abs=1e-3)
    assert float(m["tau"]) == pytest.approx(0.4, abs=1e-6)
    assert float(_marker(out, "c")["tau"]) == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-9)
    assert float(_marker(out, "C")["tau"]) == pytest.approx(0.5, abs=1e-9)
    assert len(out) == 1001 + 3


def test_profile_of_the_ball():
    out = rows(cli.render(["profile", "--set", "ball2", "--grid", "1001"]))
    m = _marker(out, "tau_minus")
    assert float(m["theta1"]) == pytest.approx(0.5, abs=1e-3)
    assert float(m["tau"]) == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_profile_with_a_single_grid_point():
    out = rows(cli.render(["profile", "--set", "ball2", "--grid", "1"]))
    g = _marker(out, "grid_min")
    assert (float(g["theta1"]), float(g["theta2"]), float(g["tau"])) == (1.0, 0.0, 1.0)


def test_profile_rejects_product_sets():
    with pytest.raises(SystemExit) as exc:
        cli.main(["profile", "--set", SQUARE])
    assert exc.value.code == 2


def test_cap_command():
    out = rows(cli.render(["cap", "--set", '{"type":"intervals","data":[[-1,1]]}']))
    assert float(out[0]["capacity"]) == 0.5
    out = rows(cli.render(["cap", "--set", SQUARE]))
    assert [r["factor"] for r in out] == ["0", "1", "tau_minus"]
    out = rows(cli.render(["cap", "--set", "realball2"]))
    assert float(out[0]["c"]) == pytest.approx(1 / (2 * math.sqrt(2)))


def test_tau_command_with_direction():
    out = rows(cli.render(["tau", "--set", "realball2", "--theta", "0.4"]))
    assert float(out[0]["tau"]) == pytest.approx(0.4, rel=1e-12)


def test_chebyshev_command_json():
    out = json.loads(cli.render(["chebyshev", "--set", '{"type":"intervals","data":[[-1,1]]}',
                                 "--degree", "3", "--format", "json"]))
    assert out[0]["norm"] == pytest.approx(0.25, rel=1e-9)
    assert out[0]["coefficients"] == pytest.approx([0.0, -0.75, 0.0, 1.0], abs=1e-9)


def test_orthopoly_command():
    out = rows(cli.render(["orthopoly", "--set", '{"type":"intervals","data":[[-1,1]]}', "--max-total-degree", "4"]))
    assert len(out) == 5
    # monic Chebyshev polynomials are orthogonal for the arcsine measure: ||T_n||^2 = 2^(1-2n)
    assert float(out[3]["monic_norm"]) == pytest.approx(math.sqrt(2.0**-5), rel=1e-12)


def test_eqmeasure_command():
    out = rows(cli.render(["eqmeasure", "--set", '{"type":"intervals","data":[[-1,1]]}', "--nodes", "16"]))
    assert len(out) == 16
    assert sum(float(r["weight"]) for r in out) == pytest.approx(1.0, abs=1e-15)
    assert all(float(r["potential"]) == pytest.approx(-math.log(2), abs=1e-12) for r in out)


def test_mahler_command_equality_witness():
    out = rows(cli.render(["mahler", "--set", '{"type":"intervals","data":[[-1,1]]}', "--poly", X2_HALF]))
    assert [r["k"] for r in out] == ["0", "1", "2"]
    assert float(out[2]["bound"]) == pytest.approx(1.0, rel=1e-12)
    assert all(r["holds"] == "true" for r in out)


def test_mahler_command_rejects_variable_mismatch():
    with pytest.raises(SystemExit) as exc:
        cli.main(["mahler", "--set", SQUARE, "--poly", X2_HALF])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# configuration, determinism, output
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("argv", [
    ["widom", "--set", SQUARE, "--max-total-degree", "2", "--format", "json"],
    ["profile", "--set", "realball2", "--grid", "51"],
    ["cap", "--set", "simplex:2", "--seed", "7"],
])
def test_output_is_deterministic(argv):
    assert cli.render(argv) == cli.render(argv)


def test_run_config_json_round_trip():
    cfg = RunConfig.from_args(cli.build_parser().parse_args(
        ["widom", "--set", SQUARE, "--max-total-degree", "3", "--tol", "1e-7", "--seed", "5"]))
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg
    assert again.to_json() == cfg.to_json()


def test_config_file_and_flag_override(tmp_path):
    cfg = RunConfig(command="widom", set=json.loads(SQUARE), max_total_degree=1, format="json")
    path = tmp_path / "run.json"
    path.write_text(cfg.to_json())
    out = json.loads(cli.render(["widom", "--config", str(path)]))
    assert len(out) == 3
    out = rows(cli.render(["widom", "--config", str(path), "--max-total-degree", "2", "--format", "csv"]))
    assert len(out) == 6


@pytest.mark.parametrize("argv,field", [
    (["widom", "--set", "cube:3", "--max-total-degree", "1"], "cube"),
    (["widom", "--set", SQUARE], "max_total_degree"),
    (["cap", "--set", '{"type":"intervals","data":[[1,0]]}'], "interval"),
    (["widom", "--set", SQUARE, "--max-total-degree", "1", "--tol", "-1"], "tol"),
    (["mahler", "--set", SQUARE], "poly"),
])
def test_malformed_configuration_is_a_usage_error(argv, field, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2
    assert field in capsys.readouterr().err


def test_unknown_config_fields_are_rejected():
    with pytest.raises(DescriptorError, match="colour"):
        RunConfig.from_json('{"command": "cap", "colour": 1}')
    with pytest.raises(DescriptorError, match="command"):
        RunConfig(command="plot")


def test_out_writes_a_file(tmp_path, capsys):
    target = tmp_path / "cap.csv"
    assert cli.main(["cap", "--set", '{"type":"unit_circle"}', "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert rows(target.read_text())[0]["capacity"] == "1"


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_runs_only_the_selected_suite(capsys):
    assert cli.main(["verify", "--suite", "mahler", "--format", "json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert list(summary["suites"]) == ["mahler"]
    assert summary["passed"] and summary["seed"] == 42 and summary["failed_invariants"] == []
    assert all(inv["checked"] > 0 for inv in summary["suites"]["mahler"].values())


def test_corrupted_capacity_fails_naming_frostman(capsys):
    code = cli.main(["verify", "--suite", "sets1d", "--corrupt-capacity", "1.01", "--format", "json"])
    captured = capsys.readouterr()
    assert code == 1
    assert "frostman" in captured.err
    summary = json.loads(captured.out)
    assert "sets1d.frostman" in summary["failed_invariants"]
    assert "witness" in summary["suites"]["sets1d"]["frostman"]


def test_verify_is_deterministic():
    argv = ["verify", "--suite", "cli", "--suite", "sets1d", "--format", "json"]
    assert cli.render(argv) == cli.render(argv)
