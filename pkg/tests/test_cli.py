"""Command-line interface: map loading, reports, exit codes, renders."""

import dataclasses
import io
import json
from contextlib import redirect_stdout

import pytest

from critfin import cli
from critfin.algebra import poly_parse
from critfin.config import DEFAULT, Config
from critfin.dynamics import endo_new
from critfin.errors import InputError, SolverError


def run(argv):
    """Invoke the CLI in-process, capturing stdout."""
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


@pytest.fixture(scope="module")
def f_analysis(tmp_path_factory):
    """One full `analyze` run on the plane fixture, shared across tests."""
    report_path = tmp_path_factory.mktemp("reports") / "f.json"
    code, out = run(["analyze", "f", "--report", str(report_path)])
    return code, out, json.loads(report_path.read_text())


# ---------------------------------------------------------------------------
# map loading
# ---------------------------------------------------------------------------


def test_bundled_fixture_names():
    assert cli.fixture_names() == ["f", "g3", "g4", "lattes4", "power", "quadratic"]


def test_load_map_accepts_fixture_name_with_or_without_suffix():
    f1, _ = cli.load_map("power")
    f2, doc = cli.load_map("power.json")
    assert f1 == f2
    assert doc["degree"] == 2


def test_load_map_from_path(tmp_path):
    path = tmp_path / "mymap.json"
    path.write_text(
        json.dumps(
            {"dimension": 1, "degree": 3, "components": ["z^3 - w^3", "w^3"], "name": "cubic"}
        )
    )
    f, doc = cli.load_map(str(path))
    assert f.k == 1 and f.degree == 3
    assert doc["name"] == "cubic"


@pytest.mark.parametrize(
    "doc",
    [
        "[1, 2]",
        '{"dimension": 1, "degree": 2}',
        '{"dimension": 3, "degree": 2, "components": ["z^2", "w^2", "t^2", "u^2"]}',
        '{"dimension": 1, "degree": 2, "components": ["z^2", "w^2", "t^2"]}',
        '{"dimension": 1, "degree": 2, "components": ["z^2", 7]}',
        '{"dimension": 1, "degree": 2, "components": ["z^2 +", "w^2"]}',
        '{"dimension": 1, "degree": 3, "components": ["z^2", "w^2"]}',
        '{"dimension": 1, "degree": 2, "components": ["z^2", "w^3"]}',
        "not json at all",
    ],
)
def test_load_map_rejects_malformed_documents(tmp_path, doc):
    path = tmp_path / "bad.json"
    path.write_text(doc)
    with pytest.raises(InputError):
        cli.load_map(str(path))


def test_load_map_unknown_source_names_the_bundled_maps():
    with pytest.raises(InputError, match="quadratic"):
        cli.load_map("nosuchmap")


def test_every_bundled_fixture_parses_and_matches_its_declared_degree():
    for name in cli.fixture_names():
        f, doc = cli.load_map(name)
        assert f.degree == doc["degree"]
        assert f.k == doc["dimension"]


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def test_analyze_verdict_lines(f_analysis):
    code, out, _ = f_analysis
    assert code == cli.EXIT_OK
    assert "critically finite of order 1: true" in out
    assert "1-critically finite: false" in out
    assert "critically finite of order 2: true" in out
    assert "2-critically finite: false" in out
    assert "superattracting-nilpotent-nonzero" in out


def test_report_identity_and_seed(f_analysis):
    _, _, report = f_analysis
    assert report["schema_version"] == cli.SCHEMA_VERSION
    assert report["tool"]["name"] == "critfin"
    assert report["seed"] == 0
    assert report["map"]["name"] == "f"


def test_report_map_echo_round_trips(f_analysis):
    _, _, report = f_analysis
    echo = report["map"]
    reparsed = endo_new([poly_parse(c, echo["dimension"] + 1) for c in echo["components"]])
    original, _ = cli.load_map("f")
    assert reparsed == original


def test_report_classification_and_periodic_points(f_analysis):
    _, _, report = f_analysis
    levels = report["classification"]["levels"]
    assert levels["1"]["finite_order"] is True
    assert levels["1"]["verdict"] is False
    assert levels["1"]["l"] == 1
    assert {c["poly"] for c in levels["1"]["C"]} == {"z", "w", "t"}
    points = report["periodic_points"]
    assert len(points) == 21
    origin = next(
        p for p in points if p["point"]["exact"] and p["point"]["coords"] == ["0", "0", "1"]
    )
    assert origin["classification"] == "superattracting-nilpotent-nonzero"
    assert origin["period"] == 1
    assert origin["decided_under"]["residual_tol"] == DEFAULT.residual_tol


def test_report_echoes_every_config_knob(f_analysis):
    _, _, report = f_analysis
    knobs = {field.name for field in dataclasses.fields(Config)}
    assert set(report["config"]) == knobs
    assert report["config"]["residual_tol"] == DEFAULT.residual_tol


def test_mutating_any_knob_changes_the_echo():
    f, doc = cli.load_map("quadratic")
    base = cli.build_report(f, doc, _tiny_classification(f), [], DEFAULT, seed=0)
    for field in dataclasses.fields(Config):
        old = getattr(DEFAULT, field.name)
        bumped = DEFAULT.with_overrides(**{field.name: old * 2 + 1})
        mutated = cli.build_report(f, doc, _tiny_classification(f), [], bumped, seed=0)
        assert mutated["config"] != base["config"], field.name
        assert mutated["config"][field.name] != base["config"][field.name]


def _tiny_classification(f):
    from critfin.postcritical import classify

    return classify(f, order=1)


def test_analyze_order_flag_restricts_levels(tmp_path):
    report_path = tmp_path / "p1.json"
    code, out = run(["analyze", "power", "--order", "1", "--report", str(report_path)])
    assert code == cli.EXIT_OK
    report = json.loads(report_path.read_text())
    assert list(report["classification"]["levels"]) == ["1"]


def test_analyze_order_two_exposes_the_vertex_inventory(tmp_path):
    report_path = tmp_path / "p2.json"
    code, _ = run(["analyze", "power", "--order", "2", "--report", str(report_path)])
    assert code == cli.EXIT_OK
    levels = json.loads(report_path.read_text())["classification"]["levels"]
    C2 = levels["2"]["C"]
    assert len(C2) == 3 and all(c["kind"] == "point" for c in C2)
    assert levels["2"]["F"], "the second-order tail set is nonempty for the power map"
    assert levels["2"]["verdict"] is False


def test_analyze_seed_is_echoed(tmp_path):
    report_path = tmp_path / "seeded.json"
    code, _ = run(["--seed", "7", "analyze", "quadratic", "--report", str(report_path)])
    assert code == cli.EXIT_OK
    assert json.loads(report_path.read_text())["seed"] == 7


def test_analyze_budget_exhaustion_exits_3(capsys):
    code = cli.main(["analyze", "f", "--budget", "1"])
    assert code == cli.EXIT_BUDGET
    assert "budget" in capsys.readouterr().err


def test_budget_must_be_positive():
    code, _ = run(["analyze", "f", "--budget", "0"])
    assert code == cli.EXIT_INPUT


# ---------------------------------------------------------------------------
# certify-ramification
# ---------------------------------------------------------------------------


def test_certify_power_vertex_free_root():
    code, out = run(["certify-ramification", "power", "--point", "1,1,1", "--depth", "2"])
    assert code == cli.EXIT_OK
    cert = json.loads(out)
    assert cert["verdict"] == "all-within-bound"
    assert cert["bound"] == 2
    assert cert["max_passages"] == 0


def test_certify_f_generic_root():
    code, out = run(["certify-ramification", "f", "--point", "2,3,5", "--depth", "3"])
    assert code == cli.EXIT_OK
    cert = json.loads(out)
    assert cert["verdict"] == "all-within-bound"
    assert cert["root"] == {"coords": ["2", "3", "5"], "exact": True}
    assert cert["depth"] == 3


def test_certify_root_on_postcritical_line_is_not_applicable():
    code, out = run(["certify-ramification", "f", "--point", "0,1,1"])
    assert code == cli.EXIT_OK
    assert json.loads(out)["verdict"] == "not-applicable"


def test_certify_accepts_rational_coordinates():
    code, out = run(["certify-ramification", "power", "--point", "1/2,1/3,1", "--depth", "1"])
    assert code == cli.EXIT_OK
    # rational input lands on the primitive integer representative
    assert json.loads(out)["root"]["coords"] == ["3", "2", "6"]


@pytest.mark.parametrize("point", ["1,oops,1", "1,1", "1,1,1,1", "1,1/0,1"])
def test_certify_rejects_malformed_points(point):
    code, _ = run(["certify-ramification", "f", "--point", point])
    assert code == cli.EXIT_INPUT


def test_solver_shortfall_exits_4(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise SolverError("no root refinement converged")

    monkeypatch.setattr(cli, "certify_ramification", boom)
    code = cli.main(["certify-ramification", "f", "--point", "2,3,5"])
    assert code == cli.EXIT_SOLVER
    assert "solver" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# render
# ---------------------------------------------------------------------------


def test_render_writes_image_and_sidecar(tmp_path):
    out = tmp_path / "basins.ppm"
    code, text = run(
        ["render", "power", "--res", "64x64", "--iter", "120", "--out", str(out)]
    )
    assert code == cli.EXIT_OK
    data = out.read_bytes()
    assert data.startswith(b"P6\n64 64\n255\n")
    assert len(data) == len(b"P6\n64 64\n255\n") + 64 * 64 * 3
    sidecar = json.loads((tmp_path / "basins.json").read_text())
    assert set(sidecar) == {"legend", "colors", "summary"}
    assert sidecar["legend"]["0"] == "undecided"
    for name, fraction in sidecar["summary"].items():
        assert f"{fraction:.6f}  {name}" in text


def test_render_single_pixel(tmp_path):
    out = tmp_path / "one.ppm"
    code, _ = run(["render", "f", "--res", "1x1", "--iter", "60", "--out", str(out)])
    assert code == cli.EXIT_OK
    data = out.read_bytes()
    assert data.startswith(b"P6\n1 1\n255\n")
    assert len(data) == len(b"P6\n1 1\n255\n") + 3


def test_render_sidecar_name_for_non_ppm_suffix(tmp_path):
    out = tmp_path / "basins.img"
    code, _ = run(["render", "quadratic", "--res", "8x8", "--iter", "40", "--out", str(out)])
    assert code == cli.EXIT_OK
    assert (tmp_path / "basins.img.legend.json").is_file()


def test_render_custom_slice(tmp_path):
    out = tmp_path / "line.ppm"
    spec = json.dumps({"chart": 0, "base": [0, 0], "center": [0.5, 0.0], "extent": 2.5})
    code, _ = run(
        ["render", "f", "--slice", spec, "--res", "16x8", "--iter", "40", "--out", str(out)]
    )
    assert code == cli.EXIT_OK
    assert out.read_bytes().startswith(b"P6\n16 8\n255\n")


def test_render_slice_accepts_complex_strings(tmp_path):
    out = tmp_path / "cx.ppm"
    spec = json.dumps({"dir_u": ["1", 0], "dir_v": ["1j", 0]})
    code, _ = run(
        ["render", "f", "--slice", spec, "--res", "4x4", "--iter", "30", "--out", str(out)]
    )
    assert code == cli.EXIT_OK


@pytest.mark.parametrize(
    "spec",
    [
        "not json",
        "[1, 2]",
        '{"tilt": 1}',
        '{"chart": "z"}',
        '{"center": [1]}',
        '{"extent": "wide"}',
        '{"dir_u": 5}',
        '{"dir_u": ["abc", 0]}',
    ],
)
def test_render_rejects_malformed_slices(tmp_path, spec):
    code, _ = run(["render", "f", "--slice", spec, "--out", str(tmp_path / "x.ppm")])
    assert code == cli.EXIT_INPUT


@pytest.mark.parametrize("res", ["12y9", "0x4", "axb", "12", "12x-4"])
def test_render_rejects_malformed_resolutions(tmp_path, res):
    code, _ = run(["render", "f", "--res", res, "--out", str(tmp_path / "x.ppm")])
    assert code == cli.EXIT_INPUT


def test_render_rejects_nonpositive_iteration_count(tmp_path):
    code, _ = run(
        ["render", "f", "--res", "4x4", "--iter", "0", "--out", str(tmp_path / "x.ppm")]
    )
    assert code == cli.EXIT_INPUT


def test_unwritable_output_exits_5(tmp_path, capsys):
    out = tmp_path / "no" / "such" / "dir" / "x.ppm"
    code = cli.main(["render", "quadratic", "--res", "4x4", "--iter", "30", "--out", str(out)])
    assert code == cli.EXIT_OUTPUT
    assert "cannot write" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def test_help_exits_cleanly(capsys):
    assert cli.main(["--help"]) == cli.EXIT_OK
    assert "analyze" in capsys.readouterr().out


def test_missing_subcommand_is_invalid_input(capsys):
    assert cli.main([]) == cli.EXIT_INPUT
    capsys.readouterr()


def test_unknown_option_is_invalid_input(capsys):
    assert cli.main(["analyze", "f", "--frobnicate"]) == cli.EXIT_INPUT
    capsys.readouterr()


def test_exit_codes_cover_the_documented_failure_modes():
    assert cli.EXIT_OK == 0
    assert sorted(set(cli.EXIT_CODES.values())) == [2, 3, 4, 5]
