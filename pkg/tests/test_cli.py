import json
import subprocess
import sys
from fractions import Fraction

import pytest

from stringy.cli import main
from stringy.exact import parse_rational


def terms(*pairs):
    return [{"exp": list(e), "coef": str(c)} for e, c in pairs]


def problem(n, polys, u, **options):
    data = {"n": n, "polys": [{"weight": str(w), "terms": t} for w, t in polys], "u": [str(x) for x in u]}
    if options:
        data["options"] = options
    return data


BETA = problem(1, [(3, terms(((0,), 1), ((1,), 1)))], [1])
QUADRATIC = problem(1, [(3, terms(((0,), 1), ((1,), 1), ((2,), 1)))], [1])
DIRICHLET = problem(2, [(3, terms(((0, 0), 1), ((1, 0), 1), ((0, 1), 1)))], [1, 1])
LINE = {
    "n": 1,
    "hyperplanes": [
        {"coeffs": ["0", "1"], "alpha": "1"},
        {"coeffs": ["-1", "1"], "alpha": "1"},
        {"coeffs": ["-3", "1"], "alpha": "1/2"},
        {"coeffs": ["1", "0"], "alpha": "-5/2"},
    ],
    "infinity": 4,
}


def run(capsys, tmp_path, command, data, *flags):
    path = tmp_path / "input.json"
    path.write_text(json.dumps(data))
    code = main([command, str(path), *flags])
    out = capsys.readouterr().out
    return code, (json.loads(out) if "--pretty" not in flags else out)


def test_amplitude_beta_all_pipelines(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "amplitude", BETA, "--pipelines", "triangulation,dual_volume,grothendieck,quadrature")
    assert code == 0 and report["agreement"]
    assert report["exact"] == "3/2"
    assert report["pipelines"]["triangulation"]["exact"] == "3/2"
    assert report["pipelines"]["grothendieck"]["value"] == pytest.approx(1.5, rel=1e-12)
    assert report["pipelines"]["quadrature"]["extrapolated"] == pytest.approx(1.5, rel=1e-2)
    assert set(report["timings"]) == {"triangulation", "dual_volume", "grothendieck", "quadrature"}
    assert "seed" in report["provenance"] and "lift" in report["provenance"]


def test_amplitude_default_pipelines(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "amplitude", DIRICHLET, "--seed", "4")
    assert code == 0
    assert set(report["pipelines"]) == {"triangulation", "dual_volume", "grothendieck"}
    assert report["provenance"]["seed"] == 4


def test_unknown_pipeline(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "amplitude", BETA, "--pipelines", "magic")
    assert code == 2 and report["error"] == "ParseError"


def test_dual_volume_dirichlet(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "dual-volume", DIRICHLET)
    assert code == 0 and report["exact"] == "3"
    assert "polytope" in report and "dual" in report


def test_triangulate_quadratic_is_deterministic(capsys, tmp_path):
    _, a = run(capsys, tmp_path, "triangulate", QUADRATIC, "--seed", "9")
    _, b = run(capsys, tmp_path, "triangulate", QUADRATIC, "--seed", "9")
    assert a == b
    assert a["columns"] == [[1, 0], [1, 1], [1, 2]]
    assert a["volume"] == 2


def test_triangulate_point_file_with_lift(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "triangulate", {"points": [[1, 0], [1, 1], [1, 2]], "lift": [0, -1, 0]})
    assert code == 0
    assert report["triangulation"]["simplices"] == [[1, 2], [2, 3]]


def test_crit_beta_has_one_certified_point(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "crit", BETA)
    assert code == 0 and report["certified"]
    assert len(report["points"]) == 1
    assert report["stationary_sum"] == pytest.approx(1.5, rel=1e-12)


def test_arrangement_line_matches_closed_form(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "arrangement", LINE)
    assert code == 0 and report["symmetric"]
    alphas = [Fraction(1), Fraction(1), Fraction(1, 2)]
    a_inf = Fraction(-5, 2)
    expected = [[(1 / alphas[i] if i == j else 0) + 1 / a_inf for j in range(3)] for i in range(3)]
    assert [[parse_rational(x) for x in row] for row in report["matrix"]] == expected
    assert report["basis"] == [[1], [2], [3]]
    assert report["vertices"] == 4


def test_stringy_beta(capsys, tmp_path):
    code, report = run(capsys, tmp_path, "stringy", BETA, "--eps", "0.1,0.05,0.025")
    assert code == 0
    assert report["extrapolated"] == pytest.approx(1.5, rel=1e-2)


def test_exp_volume(capsys, tmp_path):
    data = {"n": 1, "p": {"terms": terms(((0,), 1), ((1,), 1))}, "X": ["2"]}
    code, report = run(capsys, tmp_path, "exp-volume", data, "--eps", "0.1,0.05,0.025")
    assert code == 0
    assert report["limit"]["cone_volume"] == "1/2"
    assert report["limit"]["float"] == pytest.approx(0.5 * 2.718281828459045**-1, rel=1e-12)
    assert report["extrapolated"] == pytest.approx(report["limit"]["float"], rel=1e-2)


def test_gamma_series(capsys, tmp_path):
    data = problem(1, [("5/3", terms(((0,), 1), ((1,), 10), ((2,), 1)))], ["1/2"], lift=[0, -1, 0], z=[1, 10, 1])
    code, report = run(capsys, tmp_path, "gamma-series", data, "--order", "20")
    assert code == 0
    assert report["order"] == 20 and report["R"] == "1/4"
    assert report["rel_err"] < 1e-3


def test_pretty_output(capsys, tmp_path):
    code, text = run(capsys, tmp_path, "dual-volume", BETA, "--pretty")
    assert code == 0
    assert any(line.startswith("exact") and '"3/2"' in line for line in text.splitlines())


def without_timings(text):
    report = json.loads(text)
    report.pop("timings", None)
    return json.dumps(report)


def test_report_is_byte_identical_apart_from_timings(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps(QUADRATIC))
    outputs = []
    for _ in range(2):
        main(["amplitude", str(path), "--seed", "3"])
        outputs.append(without_timings(capsys.readouterr().out))
    assert outputs[0] == outputs[1]


def test_exact_values_round_trip(capsys, tmp_path):
    _, report = run(capsys, tmp_path, "amplitude", QUADRATIC)
    value = parse_rational(report["exact"])
    assert value == Fraction(6, 5)
    assert float(value) == report["float"]


def test_standard_input_and_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "stringy.cli", "dual-volume"],
        input=json.dumps(BETA),
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["exact"] == "3/2"


@pytest.mark.parametrize(
    "command, data, error",
    [
        ("amplitude", problem(1, [(3, terms(((0,), 1), ((1,), 1)))], [0]), "NotInterior"),
        ("amplitude", problem(1, [(3, terms(((0,), 1), ((1,), 1)))], [4]), "NotInterior"),
        ("amplitude", problem(1, [(2, terms(((0,), 1), ((1,), 1), ((2,), 1)))], [2], lift=[0, -1, 0]), "ParameterOnWall"),
        ("amplitude", problem(1, [(3, terms(((0,), 1), ((2,), 1)))], [1]), "NotSaturated"),
        (
            "arrangement",
            {"n": 2, "infinity": 4, "hyperplanes": [
                {"coeffs": ["0", "1", "0"], "alpha": "1"},
                {"coeffs": ["-1", "1", "0"], "alpha": "1"},
                {"coeffs": ["0", "0", "1"], "alpha": "1"},
                {"coeffs": ["1", "0", "0"], "alpha": "-3"},
            ]},
            "NonGenericArrangement",
        ),
        ("arrangement", {**LINE, "hyperplanes": LINE["hyperplanes"][:3] + [{"coeffs": ["1", "0"], "alpha": "1"}]}, "NonZeroWeightSum"),
        ("amplitude", {"n": 1, "polys": []}, "ParseError"),
    ],
)
def test_input_errors_exit_two(capsys, tmp_path, command, data, error):
    code, report = run(capsys, tmp_path, command, data)
    assert code == 2
    assert report["error"] == error
    assert "exact" not in report


def test_non_saturated_lattice_can_be_repaired(capsys, tmp_path):
    data = problem(1, [(3, terms(((0,), 1), ((2,), 1)))], [1])
    code, report = run(capsys, tmp_path, "amplitude", data, "--repair", "--pipelines", "triangulation,dual_volume")
    assert code == 0
    assert report["pipelines"]["triangulation"]["lattice_index"] == 2
    assert report["pipelines"]["triangulation"]["exact"] == report["exact"]
