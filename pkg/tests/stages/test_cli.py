import logging
import math

import pytest

from app import main
from utils.helpers.errors import EXIT_DOMAIN, EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK
from utils.helpers.logger import logger, set_level
from utils.helpers.settings import load_settings

FAST = ["--quad-nodes", "16", "--quad-depth", "14"]


@pytest.fixture
def body(fixtures_dir):
    return lambda name: str(fixtures_dir / f"{name}.json")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_value_of_disk_at_alpha_minus_two(capsys, body):
    code, out, _ = run(capsys, *FAST, "value", body("disk_r2"), "--x", "0", "--y", "0", "--alpha", "-2")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "-0.785398163397"
    assert lines[1].startswith("quad_error ")


def test_value_at_area_exponent(capsys, body):
    code, out, _ = run(capsys, "value", body("unit_square"), "--x", "0.5", "--y", "0.5", "--alpha", "2")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "1.000000000000"


def test_log_value_of_unit_disk(capsys, body):
    code, out, _ = run(capsys, "value", body("unit_disk"), "--x", "0", "--y", "0", "--log")
    assert code == EXIT_OK
    assert float(out.splitlines()[0]) == pytest.approx(math.pi / 2, abs=1e-11)


def test_value_on_boundary_is_a_domain_error(capsys, body):
    code, out, err = run(capsys, "value", body("unit_square"), "--x", "1", "--y", "0.5", "--alpha", "0")
    assert code == EXIT_DOMAIN
    assert out == ""
    assert "potential undefined on boundary" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["value"],
        ["value", "body.json", "--x", "0", "--y", "0"],
        ["frobnicate"],
        ["field", "body.json", "--alpha", "one"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert err.startswith("error:")


def test_bad_body_files(capsys, body, tmp_path):
    for path in (body("bad_dimension"), body("unknown_key"), str(tmp_path / "missing.json")):
        code, _, _ = run(capsys, "value", path, "--x", "0", "--y", "0", "--alpha", "1")
        assert code == EXIT_INPUT


def test_out_of_range_flags(capsys, body):
    assert run(capsys, "field", body("unit_disk"), "--alpha", "1", "--res", "4")[0] == EXIT_INPUT
    assert run(capsys, "uf", body("unit_disk"), "--dirs", "8")[0] == EXIT_INPUT
    empty_sweep = ["trajectory", body("unit_disk"), "--alpha-from", "1", "--alpha-to", "0", "--steps", "3"]
    assert run(capsys, *empty_sweep)[0] == EXIT_INPUT


def test_intervals(capsys):
    code, out, _ = run(capsys, "intervals", "--R", "4", "--alpha", "1")
    assert code == EXIT_OK
    assert out == "±2.000000000000\n"
    assert run(capsys, "intervals", "--R", "4", "--alpha", "2")[1] == "continuum -1.000000000000 1.000000000000\n"
    assert run(capsys, "intervals", "--R", "1", "--alpha", "0")[0] == EXIT_INPUT


def test_field_is_deterministic(capsys, body):
    argv = [*FAST, "field", body("unit_square"), "--alpha", "-1", "--res", "8"]
    code, first, _ = run(capsys, *argv)
    assert code == EXIT_OK
    _, second, _ = run(capsys, *argv)
    assert first == second
    lines = first.splitlines()
    assert lines[0] == "x,y,value,regime,defined"
    assert len(lines) == 1 + 8 * 8
    assert all(line.split(",")[3] == "negative" for line in lines[1:])


def test_field_of_area_potential_is_constant(capsys, body, tmp_path):
    out_path = tmp_path / "field.csv"
    code, out, _ = run(capsys, "field", body("unit_disk"), "--alpha", "2", "--res", "8", "--out", str(out_path))
    assert code == EXIT_OK
    assert out == ""
    rows = out_path.read_text(encoding="utf-8").splitlines()[1:]
    for row in rows:
        _, _, value, _, defined = row.split(",")
        assert defined == "1"
        assert float(value) == pytest.approx(math.pi, abs=1e-8)


def test_uf_of_disk(capsys, body):
    code, out, _ = run(capsys, "uf", body("unit_disk"), "--dirs", "64")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "x,y"
    label, ratio = lines[-1].split(",")
    assert label == "diameter_ratio"
    assert float(ratio) <= 1e-6


def test_bounds_of_rectangle(capsys, body):
    code, out, _ = run(capsys, "bounds", body("rectangle_2x1"))
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "minmax 1.000000000000,0.500000000000 1.118033988750"
    maxmin = [line.split() for line in lines[1:]]
    assert len(maxmin) == 2
    assert [float(r) for _, _, r in maxmin] == pytest.approx([0.5, 0.5], abs=1e-9)
    xs = sorted(float(c.split(",")[0]) for _, c, _ in maxmin)
    assert xs == pytest.approx([0.5, 1.5], abs=0.02)


def test_center_of_right_triangle_at_alpha_four(capsys, body):
    code, out, _ = run(capsys, *FAST, "center", body("right_triangle"), "--alpha", "4", "--dirs", "64")
    assert code == EXIT_OK
    lines = out.splitlines()
    cx, cy = (float(v) for v in lines[0].split()[1].split(","))
    assert (cx, cy) == pytest.approx((1 / 3, 1 / 3), abs=1e-7)
    assert lines[1].startswith("extremal_value ")
    assert lines[2].startswith("regime above_m clusters 1")


def test_trajectory_of_disk(capsys, body, tmp_path):
    csv_path, svg_path = tmp_path / "path.csv", tmp_path / "path.svg"
    argv = [
        *FAST,
        "trajectory",
        body("unit_disk"),
        "--alpha-from",
        "-1",
        "--alpha-to",
        "3",
        "--steps",
        "3",
        "--dirs",
        "64",
        "--out",
        str(csv_path),
        "--svg",
        str(svg_path),
    ]
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_OK
    lines = csv_path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "alpha,cx,cy,value,clusters,converged"
    assert [line.split(",")[0] for line in lines[1:]] == ["-1.000000000000", "1.000000000000", "3.000000000000"]
    for line in lines[1:]:
        _, cx, cy, _, clusters, converged = line.split(",")
        assert abs(float(cx)) <= 1e-7 and abs(float(cy)) <= 1e-7
        assert (clusters, converged) == ("1", "1")
    svg = svg_path.read_text(encoding="utf-8")
    assert 'class="trajectory"' in svg
    assert 'class="minmax"' in svg


def test_validate_prints_one_line_per_check(capsys, body):
    code, out, _ = run(
        capsys, *FAST, "validate", body("unit_square"), "--alpha-list", "1", "--grid-resolution", "64", "--points", "2"
    )
    lines = out.splitlines()
    assert len(lines) == 4
    assert all(line.startswith("oracle 1.000000000000 ") for line in lines)
    assert all(line.split()[-1] in ("PASS", "FAIL") for line in lines)
    assert code == (EXIT_OK if all(line.endswith("PASS") for line in lines) else EXIT_NUMERICAL)


def test_ball_extremality(capsys, body):
    code, out, _ = run(capsys, *FAST, "extremality", body("unit_disk"), body("square_area_pi"), "--alpha", "4")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "name value reference gap stderr holds strict"
    assert lines[1].startswith("unit_disk ") and lines[1].endswith(" 1 0")
    assert lines[2].startswith("square_area_pi ") and lines[2].endswith(" 1 1")


@pytest.fixture
def configured_env(monkeypatch):
    load_settings.cache_clear()
    yield monkeypatch
    monkeypatch.undo()
    load_settings.cache_clear()
    set_level("WARNING")


def test_log_level_follows_settings(capsys, configured_env):
    configured_env.setenv("RIESZ_LOG_LEVEL", "INFO")
    code, _, _ = run(capsys, "intervals", "--R", "4", "--alpha", "1")
    assert code == EXIT_OK
    assert logger.level == logging.INFO


def test_invalid_configured_log_level(capsys, configured_env):
    configured_env.setenv("RIESZ_LOG_LEVEL", "chatty")
    code, _, err = run(capsys, "intervals", "--R", "4", "--alpha", "1")
    assert code == EXIT_INPUT
    assert "RIESZ_LOG_LEVEL" in err
