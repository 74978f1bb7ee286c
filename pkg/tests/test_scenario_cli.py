"""Scenario documents and the maxcov command line."""

import csv
import io
import json

import pytest
import sympy as sp

from maxcov.cli import CSV_HEADER, EXIT_CONFIG, EXIT_OK, EXIT_RESIDUAL, format_value, main
from maxcov.errors import ScenarioError
from maxcov.forms_core import basis_form, wedge
from maxcov.maxwell import convection_state
from maxcov.scalars import JetField, T, X, Y, Z, PolynomialField
from maxcov.scenario import (
    build_state,
    config_from_forms,
    dump_scenario,
    load_scenario,
    parse_scenario,
    scenario_forms,
)

dt, dx, dy, dz = (basis_form(i) for i in range(4))


def read_rows(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    assert tuple(header) == CSV_HEADER
    return list(reader)


def run(capsys, *argv):
    code = main(list(argv))
    return code, read_rows(capsys.readouterr().out)


# --------------------------------------------------------------------------
# scenario documents
# --------------------------------------------------------------------------

def test_forms_survive_a_round_trip():
    A = dy * PolynomialField.from_expr((T - X) ** 2) + dz * sp.Rational(1, 3)
    config = config_from_forms({"A": A}, name="wave", beta="5/13")
    parsed = parse_scenario(dump_scenario(config))
    assert parsed.beta == "5/13"
    assert scenario_forms(parsed)["A"] == A


def test_jet_coefficients_survive_a_round_trip():
    A = dy * JetField(sp.sin(T - X))
    config = config_from_forms({"A": A})
    assert config.backend == "jet"
    parsed = parse_scenario(dump_scenario(config))
    assert scenario_forms(parsed)["A"][(2,)].as_expr() == sp.sin(T - X)


def test_dump_is_stable():
    config = config_from_forms({"A": dt * PolynomialField.from_expr(X)})
    assert dump_scenario(config) == dump_scenario(parse_scenario(dump_scenario(config)))


def test_malformed_key_is_reported():
    doc = {"source_mode": "potential", "fields": {"A": {"grade": 1, "coefficients": {}}, "F": {"grade": 2, "coefficients": {"10": []}}}}
    with pytest.raises(ScenarioError, match="'10' is not strictly increasing"):
        parse_scenario(json.dumps(doc))


def test_invalid_json_reports_line_and_column():
    with pytest.raises(ScenarioError, match="line 2") as excinfo:
        parse_scenario('{\n  "beta": ,\n}')
    assert excinfo.value.location.startswith("line 2, column")


@pytest.mark.parametrize(
    "doc, message",
    [
        ({"fields": {"A": {"grade": 2, "coefficients": {}}}}, "must have grade 1"),
        ({"fields": {"Q": {"grade": 1, "coefficients": {}}}}, "unknown field"),
        ({"source_mode": "explicit", "fields": {"F": {"grade": 2, "coefficients": {}}}}, "needs field G"),
        ({"beta": "0", "fields": {"A": {"grade": 1, "coefficients": {}}}}, "degenerate boost"),
        ({"beta": 0.6, "fields": {"A": {"grade": 1, "coefficients": {}}}}, "as strings"),
        ({"fields": {"A": {"grade": 1, "coefficients": {"1": {"expr": "sin(t)"}}}}}, "backend to 'jet'"),
        ({"source_mode": "convection"}, "needs a charge block"),
        ({"source_mode": "convection", "charge": {"phi": [], "axis": 4}}, "axis"),
        ({"source_mode": "convection", "charge": {"phi": {"expr": "exp(x)"}, "axis": 1}}, "backend to 'jet'"),
    ],
)
def test_invalid_scenarios_are_rejected(doc, message):
    with pytest.raises(ScenarioError, match=message):
        parse_scenario(json.dumps(doc))


def test_missing_file_is_a_scenario_error(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read scenario"):
        load_scenario(tmp_path / "nope.json")


def test_static_charge_scenario_builds_consistent_fields(scenario_path):
    state = build_state(load_scenario(scenario_path("static_charge.json")))
    assert state.J == basis_form(1, 2, 3) * -6
    assert state.F == wedge(dt, dx) * PolynomialField.from_expr(2 * X) + wedge(dt, dy) * PolynomialField.from_expr(2 * Y) + wedge(dt, dz) * PolynomialField.from_expr(2 * Z)


def test_convection_scenario_boosts_the_static_charge(scenario_path):
    config = load_scenario(scenario_path("convection_charge.json"))
    assert config.checks_convection
    state = build_state(config)
    expected = convection_state(X ** 2 + Y ** 2 + Z ** 2, 1, "5/13")
    assert (state.F, state.G, state.J) == (expected.F, expected.G, expected.J)


def test_potential_scenario_uses_vacuum_constitutive_law(scenario_path):
    state = build_state(load_scenario(scenario_path("potential_plane_wave.json")))
    assert state.F == wedge(dt - dx, dy) * PolynomialField.from_expr(2 * (T - X))
    assert state.J.is_zero


# --------------------------------------------------------------------------
# command line
# --------------------------------------------------------------------------

def test_format_value():
    assert format_value(sp.Rational(3, 4)) == "3/4"
    assert format_value(sp.Integer(-2)) == "-2"
    assert format_value(5) == "5"
    assert format_value(0.1) == "0.1"


def test_check_passes_for_potential_fields(capsys, scenario_path):
    code, rows = run(capsys, "check", str(scenario_path("potential_plane_wave.json")))
    assert code == EXIT_OK
    assert len(rows) == 4 * 20 * 2
    assert all(row[-1] == "0" for row in rows)


def test_check_in_fiducial_frame_misses_the_witness(capsys, scenario_path):
    code, rows = run(capsys, "check", str(scenario_path("detection.json")), "--frame", "0")
    assert code == EXIT_OK
    assert {row[0] for row in rows} == {"0"}


def test_check_in_z_boost_frame_sees_the_witness(capsys, scenario_path):
    code, rows = run(capsys, "check", str(scenario_path("detection.json")), "--frame", "3")
    assert code == EXIT_RESIDUAL
    magnetic = [row[-1] for row in rows if row[6] == "magnetic"]
    assert set(magnetic) == {"3/4"}


def test_covariantize_flags_the_witness(capsys, scenario_path):
    code, rows = run(capsys, "covariantize", str(scenario_path("detection.json")))
    assert code == EXIT_RESIDUAL
    flagged = {(row[6], row[7]) for row in rows if row[-1] != "0"}
    assert flagged == {("dF", "GX1X2")}


def test_covariantize_oracle_rows_match(capsys, scenario_path):
    code, rows = run(capsys, "covariantize", str(scenario_path("static_charge.json")), "--oracle", "--points", "3")
    assert code == EXIT_OK
    quantities = {row[6] for row in rows}
    assert quantities == {"dF", "dG-J", "dF_direct", "dG-J_direct"}
    assert len(rows) == 3 * 2 * 4 * 2


def test_jet_scenario_passes_within_tolerance(capsys, scenario_path):
    code, rows = run(capsys, "check", str(scenario_path("jet_plane_wave.json")))
    assert code == EXIT_OK
    assert all(abs(float(row[-1])) <= 1e-9 for row in rows)


def test_output_is_deterministic(tmp_path, scenario_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    scenario = str(scenario_path("static_charge.json"))
    assert main(["covariantize", scenario, "--seed", "11", "--out", str(first)]) == EXIT_OK
    assert main(["covariantize", scenario, "--seed", "11", "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_seed_flag_changes_the_points(tmp_path, scenario_path):
    scenario = str(scenario_path("static_charge.json"))
    outputs = []
    for seed in ("1", "2"):
        out = tmp_path / f"{seed}.csv"
        main(["check", scenario, "--seed", seed, "--out", str(out)])
        outputs.append(out.read_text())
    assert outputs[0] != outputs[1]


def test_report_for_static_charge(capsys, scenario_path):
    code, rows = run(capsys, "report", str(scenario_path("static_charge.json")))
    assert code == EXIT_OK
    assert {row[-1] for row in rows if row[7] == "G^G"} == {"0"}
    flux_rows = [row for row in rows if row[1] == "box"]
    assert {row[6] for row in flux_rows} == {"stokes_B", "stokes_D", "magnetic_flux", "gauss_D", "faraday", "ampere"}
    assert len(flux_rows) == 4 * 16
    faces = {row[7] for row in flux_rows if row[6] == "faraday"}
    assert faces == {"X1+", "X1-", "X2+", "X2-", "X3+", "X3-"}


def test_report_for_empty_fields(capsys, scenario_path):
    code, rows = run(capsys, "report", str(scenario_path("empty.json")))
    assert code == EXIT_OK
    assert {row[-1] for row in rows if row[6] == "invariant"} == {"0"}


def test_report_for_convecting_charge(tmp_path, capsys):
    state = convection_state(X ** 2 + Y ** 2 + Z ** 2, 1, "3/5")
    config = config_from_forms(
        {"F": state.F, "G": state.G, "J": state.J},
        name="convection",
        source_mode="explicit",
        convection=True,
    )
    path = tmp_path / "convection.json"
    path.write_text(dump_scenario(config), encoding="utf-8")
    code, _ = run(capsys, "report", str(path), "--points", "4")
    assert code == EXIT_OK


def test_bad_beta_exits_with_config_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"beta": "1", "fields": {"A": {"grade": 1, "coefficients": {}}}}), encoding="utf-8")
    assert main(["check", str(path)]) == EXIT_CONFIG


def test_missing_scenario_exits_with_config_error(tmp_path):
    assert main(["report", str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_bad_frame_selection_exits_with_config_error(scenario_path):
    assert main(["check", str(scenario_path("empty.json")), "--frame", "7"]) == EXIT_CONFIG


def test_covariantize_passes_for_potential_fields(capsys, scenario_path):
    code, rows = run(capsys, "covariantize", str(scenario_path("potential_plane_wave.json")), "--points", "2")
    assert code == EXIT_OK
    assert len(rows) == 2 * 2 * 4


@pytest.mark.parametrize("count", ["0", "-3"])
def test_non_positive_point_count_exits_with_config_error(count, scenario_path):
    assert main(["check", str(scenario_path("empty.json")), "--points", count]) == EXIT_CONFIG


def test_report_flags_the_witness_through_integral_laws(capsys, scenario_path):
    code, rows = run(capsys, "report", str(scenario_path("detection.json")), "--points", "1")
    assert code == EXIT_RESIDUAL
    magnetic = {row[0]: float(row[-1]) for row in rows if row[6] == "magnetic_flux"}
    assert magnetic["3"] == pytest.approx(0.75)
    assert [magnetic[label] for label in "012"] == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
    faraday = {row[7]: float(row[-1]) for row in rows if row[0] == "0" and row[6] == "faraday"}
    assert faraday["X3+"] == pytest.approx(1.0)
    assert faraday["X3-"] == pytest.approx(-1.0)


def test_report_for_convection_source_mode(capsys, scenario_path):
    code, rows = run(capsys, "report", str(scenario_path("convection_charge.json")))
    assert code == EXIT_OK
    assert {row[-1] for row in rows if row[7] == "G^G"} == {"0"}
    assert all(abs(float(row[-1])) <= 1e-10 for row in rows if row[1] == "box")
