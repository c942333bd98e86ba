import json
import subprocess
import sys

import pytest

from nckin.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_linear_summary(capsys, fixture_dir):
    code, out, _ = _run(capsys, str(fixture_dir / "linear_path.txt"),
                        "--machine", str(fixture_dir / "dmu50_840d.cfg"), "--summary")
    assert code == 0
    doc = json.loads(out)
    assert doc["total_time_ms"] == pytest.approx(4237.0, rel=0.05)
    assert len(doc["junctions"]) == 7
    assert doc["case_histogram"] == {"10": 8}
    for j in doc["junctions"]:
        expected = 100.0 * (5000.0 - j["v_transition_mm_min"]) / 5000.0
        assert j["feed_drop_pct"] == pytest.approx(expected, abs=1e-6)
        assert {"v_in_mm_min", "v_lim_j_mm_min", "v_lim_a_mm_min"} <= set(j)


def test_circular_policy_reports_legacy_feed(capsys, fixture_dir):
    code, out, _ = _run(capsys, str(fixture_dir / "linear_path.txt"), "--junction", "circular",
                        "--summary")
    assert code == 0
    junctions = json.loads(out)["junctions"]
    assert all(j["policy"] == "circular" and j["v_disc_mm_min"] > 0.0 for j in junctions)


@pytest.mark.parametrize("name", ["linear_path.txt", "circular_path.txt"])
def test_stop_policy_strictly_slower(capsys, fixture_dir, name):
    path = str(fixture_dir / name)
    _, out, _ = _run(capsys, path, "--summary")
    base = json.loads(out)
    _, out, _ = _run(capsys, path, "--summary", "--junction", "stop")
    stop = json.loads(out)
    assert all(j["v_in_mm_min"] == 0.0 for j in stop["junctions"])
    assert stop["total_time_ms"] > base["total_time_ms"]


def test_missing_config(capsys, fixture_dir):
    code, _, err = _run(capsys, str(fixture_dir / "linear_path.txt"), "--machine", "nope.cfg")
    assert code == 1
    assert "nope.cfg" in err


def test_bad_program(capsys, tmp_path):
    prog = tmp_path / "bad.nc"
    prog.write_text("G91\nG1 X1 F100\n")
    code, _, err = _run(capsys, str(prog))
    assert code == 1 and "G91" in err


def test_overrides_must_be_positive(capsys, fixture_dir):
    with pytest.raises(SystemExit):
        main([str(fixture_dir / "linear_path.txt"), "--feed", "-5"])


def test_overrides_apply(capsys, fixture_dir):
    path = str(fixture_dir / "linear_path.txt")
    _, out, _ = _run(capsys, path, "--summary")
    base = json.loads(out)["total_time_ms"]
    _, out, _ = _run(capsys, path, "--summary", "--feed", "2500")
    assert json.loads(out)["total_time_ms"] > base
    _, out, _ = _run(capsys, path, "--summary", "--tol", "0.005")
    assert json.loads(out)["total_time_ms"] != base


def test_trace_to_file(capsys, fixture_dir, tmp_path):
    out = tmp_path / "trace.json"
    code, stdout, _ = _run(capsys, str(fixture_dir / "circular_path.txt"), "--out", str(out),
                           "--format", "json", "--period", "4")
    assert code == 0 and stdout == ""
    doc = json.loads(out.read_text())
    assert doc["samples"][1]["t_ms"] == 4.0


def test_gcode_program(capsys, tmp_path):
    prog = tmp_path / "part.nc"
    prog.write_text("G90 G21\nG1 X20 F3000\nG3 X30 Y10 I0 J10\nG1 Y30\nX0\n")
    code, out, _ = _run(capsys, str(prog), "--summary")
    assert code == 0
    assert [j["kind"] for j in json.loads(out)["junctions"]] == ["tangent", "tangent", "corner"]


@pytest.mark.parametrize("name", ["linear_path.txt", "circular_path.txt"])
def test_deterministic_output(fixture_dir, tmp_path, name):
    docs = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        subprocess.run([sys.executable, "-m", "nckin", str(fixture_dir / name), "--out", str(out)],
                       check=True)
        docs.append(out.read_bytes())
    assert docs[0] == docs[1] and len(docs[0]) > 1000


def test_validate(capsys, fixture_dir, tmp_path):
    code, out, _ = _run(capsys, "validate", str(fixture_dir / "circular_path.txt"),
                        "--machine", str(fixture_dir / "dmu50_840d.cfg"))
    assert code == 0 and out.strip() == "ok"
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("a_max = -1 m/s^2\n")
    code, _, err = _run(capsys, "validate", "--machine", str(cfg))
    assert code == 1 and "machine" in err


def test_cases_subcommand(capsys):
    code, out, _ = _run(capsys, "cases", "--length", "0.1", "--v-in", "0.2", "--v-out", "0.1",
                        "--v-f", "0.5", "--a", "9.8", "--j", "40")
    doc = json.loads(out)
    assert code == 0 and doc["case"] == "6"
    assert [k for k, v in doc["conditions"].items() if v] == ["6"]
