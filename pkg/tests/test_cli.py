import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from horoshrink.cli import main
from horoshrink.files import CurveFormatError, curve_to_csv, parse_curve, read_curve
from horoshrink.geometry import GeneratingCurve, vertical_plane_curve
from horoshrink.svg import nice_ticks
from horoshrink.verify import verify_curve

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@given(arrays(np.float64, (7, 4), elements=finite), st.floats(0.01, 10.0))
def test_csv_round_trip_is_bit_exact(data, z0):
    curve = GeneratingCurve("grim", np.arange(7.0), data[:, 1], data[:, 2], data[:, 3],
                            meta={"params": {"z0": z0}, "first_integral_c": z0 / 3})
    back = parse_curve(curve_to_csv(curve))
    assert back.family == "grim"
    assert back.meta == curve.meta
    for k, v in curve.columns().items():
        assert np.array_equal(back.columns()[k], v)


def test_bowl_schema_round_trip():
    r = np.linspace(0, 1, 6)
    curve = GeneratingCurve("bowl", r, r.copy(), 1 + r**2, None, param_name="r",
                            extra={"dz": 2 * r, "quad": r**3}, meta={"params": {"z0": 1.0}})
    text = curve_to_csv(curve)
    assert "r,x,z,dz,quad" in text.splitlines()
    back = parse_curve(text)
    assert back.param_name == "r" and back.theta is None
    assert np.array_equal(back.extra["quad"], r**3)


@pytest.mark.parametrize(
    "text,line",
    [
        ('# family="grim"\ns,x,z,theta\n1,2,3\n', 3),
        ('# family="grim"\ns,x,z,theta\n1,2,3,abc\n', 3),
        ('# family="grim"\ns,x,z\n', 2),
        ('# family=grim\n', 1),
        ('# family="bowl"\ns,x,z,theta\n', 2),
        ('# family="grim"\ns,x,z,theta\n0,0,1,0\n# late=1\n', 4),
    ],
)
def test_malformed_csv_reports_line(text, line):
    with pytest.raises(CurveFormatError) as info:
        parse_curve(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_grim_command_outputs(tmp_cwd):
    code = main(["grim", "--z0", "0.5", "--s-max", "12", "--n-samples", "1201", "--out", "g", "--svg", "g.svg"])
    assert code == 0
    doc = json.loads((tmp_cwd / "g.events.json").read_text())
    assert doc["family"] == "grim" and doc["status"] == "completed"
    assert doc["summary"]["z0_star"] > 1
    assert any(e["kind"] == "z-extremum-max" for e in doc["events"])
    root = ET.fromstring((tmp_cwd / "g.svg").read_text())
    assert root.get("viewBox") == "0 0 800 600"
    assert "stroke-dasharray" in (tmp_cwd / "g.svg").read_text()


def test_verify_reproduces_in_memory_report(tmp_cwd):
    for argv in (["grim", "--z0", "0.3", "--s-max", "10", "--n-samples", "1001"],
                 ["bowl", "--z0", "2", "--r-max", "10", "--n-samples", "1001"],
                 ["wing", "--x0", "1", "--z0", "1", "--s-max", "8", "--n-samples", "1001"]):
        assert main(argv + ["--out", "c"]) == 0
        assert main(["verify", "c.csv", "--out", "v.json"]) == 0
        mem = json.loads((tmp_cwd / "c.events.json").read_text())["verification"]
        assert json.loads((tmp_cwd / "v.json").read_text()) == mem


def test_verify_h1_and_vertical_plane(tmp_cwd):
    assert main(["grim", "--z0", "1", "--s-max", "5", "--n-samples", "51", "--out", "h"]) == 0
    assert main(["verify", "h.csv", "--out", "v.json"]) == 0
    assert json.loads((tmp_cwd / "v.json").read_text())["max_residual"] == 0.0
    (tmp_cwd / "vp.csv").write_text(curve_to_csv(vertical_plane_curve(0.0, (0.5, 5.0), 501)))
    assert verify_curve(read_curve(tmp_cwd / "vp.csv")).max_residual == 0.0


@pytest.mark.parametrize(
    "argv",
    [
        ["grim", "--z0", "-1"],
        ["grim", "--z0", "abc"],
        ["grim"],
        ["bowl", "--z0", "0"],
        ["wing", "--x0", "-1", "--z0", "1"],
        ["table", "--family", "grim", "--grid", "1.5"],
        ["table", "--family", "nope", "--grid", "0.5"],
        ["phase", "--seeds", "-1"],
        ["verify", "missing.csv"],
        ["grim", "--z0", "0.5", "--rtol", "-1"],
    ],
)
def test_usage_errors_exit_2(tmp_cwd, argv):
    assert main(argv) == 2


def test_malformed_verify_exit_2_with_line(tmp_cwd, capsys):
    (tmp_cwd / "bad.csv").write_text('# family="grim"\ns,x,z,theta\n1,2\n')
    assert main(["verify", "bad.csv"]) == 2
    assert "line 3" in capsys.readouterr().err


def test_numerical_failure_exit_1_with_partial_files(tmp_cwd):
    (tmp_cwd / "c.cfg").write_text("max_steps = 20\n")
    code = main(["grim", "--z0", "0.5", "--s-max", "50", "--n-samples", "501", "--config", "c.cfg", "--out", "p"])
    assert code == 1
    doc = json.loads((tmp_cwd / "p.events.json").read_text())
    assert doc["status"] == "max-steps" and "diagnostic" in doc
    assert (tmp_cwd / "p.csv").exists()


def test_config_file_overridden_by_flags(tmp_cwd):
    (tmp_cwd / "c.cfg").write_text("# solver\nrtol=1e-9\natol = 1e-11\n")
    assert main(["grim", "--z0", "0.5", "--s-max", "3", "--n-samples", "31", "--config", "c.cfg",
                 "--atol", "1e-13", "--out", "g"]) == 0
    cfg = json.loads((tmp_cwd / "g.events.json").read_text())["config"]
    assert cfg["rtol"] == 1e-9 and cfg["atol"] == 1e-13


def test_config_file_unknown_key(tmp_cwd):
    (tmp_cwd / "c.cfg").write_text("tolerance=1\n")
    assert main(["grim", "--z0", "0.5", "--config", "c.cfg"]) == 2


def test_phase_and_table_commands(tmp_cwd):
    assert main(["phase", "--seeds", "0.2,2,0.5:0.3", "--n-samples", "301", "--out", "ph"]) == 0
    doc = json.loads((tmp_cwd / "ph.json").read_text())
    assert doc["equilibrium"] == [1.0, 0.0]
    assert all(o["closure_error"] < 1e-6 for o in doc["orbits"] if o["period_s"] is not None)
    svg = (tmp_cwd / "ph.svg").read_text()
    ET.fromstring(svg)
    assert "(1, 0)" in svg
    assert main(["table", "--family", "grim", "--grid", "0.5,1", "--out", "t"]) == 0
    lines = (tmp_cwd / "t.csv").read_text().splitlines()
    assert lines[0] == "z0,z0_star,period_x,classification"
    assert lines[2] == "1,1,,horosphere-H1"


@given(finite, st.floats(1e-3, 1e6))
def test_nice_ticks_cover_range(lo, width):
    hi = lo + width
    ticks = nice_ticks(lo, hi)
    assert 2 <= len(ticks) <= 12
    assert all(lo - 1e-9 * width <= t <= hi + 1e-9 * width for t in ticks)
    assert all(b > a for a, b in zip(ticks, ticks[1:]))
