"""Command-line interface: exit codes, report schema, reproducibility."""

import json

import pytest

from evofam.cli import build_family, main


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 2


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == 0
    assert main(["scan", "--help"]) == 0


def test_verify_radial_passes(capsys):
    code, out, err = run(capsys, ["verify", "--family", "radial"])
    assert code == 0
    report = json.loads(out)
    assert list(report) == ["family", "grid", "seed", "residuals",
                            "hyperbolic_sup", "moduli", "certificates",
                            "verdicts"]
    assert report["family"] == "radial"
    assert all(v["pass"] for v in report["verdicts"].values())
    assert set(report["residuals"]) == {"ef1", "ef2", "ef3"}


def test_verify_corrupted_fails_composition(capsys):
    code, out, _ = run(capsys, ["verify", "--family", "corrupted-demo",
                                "--interval", "0,2"])
    assert code == 1
    report = json.loads(out)
    assert not report["verdicts"]["composition_law"]["pass"]
    assert report["verdicts"]["identity_on_diagonal"]["pass"]


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "unheard-of"],
    ["verify", "--interval", "zero,one"],
    ["verify", "--interval", "1"],
    ["verify", "--interval", "2,1"],
    ["verify", "--radii", "0.9,0.5"],
    ["scan", "--family", "glued:radial"],
    ["scan", "--family", "glued:hamel:default+radial"],
    ["counterexample", "--spec-file", "/no/such/file.toml"],
])
def test_unusable_configuration_exits_2(capsys, argv):
    code, _, err = run(capsys, argv)
    assert code == 2
    assert err.strip()


def test_registry_names_build(capsys):
    for name in ("radial", "rotation:linear", "rotation:quadratic",
                 "rotation:const", "corrupted-demo", "glued:radial+rotation:linear",
                 "mobius-conjugated:radial", "loewner:radial", "hamel:default"):
        family, meta = build_family(name, 0.0, 1.0)
        assert family.at(family.a, family.b) is not None
    assert build_family("loewner:radial", 0.0, 1.0)[1]["iterative"]
    assert not build_family("radial", 0.0, 1.0)[1]["iterative"]


def test_scan_radial_consistent_with_continuity(capsys):
    code, out, _ = run(capsys, ["scan", "--family", "radial"])
    assert code == 0
    report = json.loads(out)
    assert report["verdicts"]["consistent_with_joint_continuity"]["pass"]
    assert report["verdicts"]["univalence_certified"]["pass"]
    assert report["certificates"][0]["steps"] >= 2
    assert set(report["moduli"]) == {"right", "left", "joint", "diagonal"}
    assert len(report["moduli"]["right"]["deltas"]) == 7


def test_scan_hamel_flags_discontinuity(capsys):
    code, out, _ = run(capsys, ["scan", "--family", "hamel:default"])
    assert code == 1
    report = json.loads(out)
    verdict = report["verdicts"]["consistent_with_joint_continuity"]
    assert not verdict["pass"]
    assert verdict["observed"] > verdict["threshold"]
    # the axioms themselves still hold
    assert report["verdicts"]["composition_law"]["pass"]
    assert report["moduli"]["diagonal"]["max_deriv_drift"] == pytest.approx(2.0)


def test_scan_writes_csv_tables(capsys, tmp_path):
    prefix = str(tmp_path / "scan")
    code, _, _ = run(capsys, ["scan", "--family", "radial",
                              "--csv-prefix", prefix])
    assert code == 0
    for tag in ("right", "left", "joint"):
        lines = (tmp_path / f"scan_{tag}.csv").read_text().splitlines()
        assert lines[0] == "delta,radius,modulus"
        assert len(lines) > 1


def test_out_flag_writes_file_and_quiets_stdout(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, ["verify", "--out", str(target)])
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["family"] == "radial"


def test_reports_are_byte_identical_for_same_config(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, ["scan", "--family", "radial", "--seed", "9", "--out", str(a)])
    run(capsys, ["scan", "--family", "radial", "--seed", "9", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_threads_do_not_change_bytes(capsys, tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, ["verify", "--family", "radial", "--out", str(a)])
    monkeypatch.setenv("EVOFAM_THREADS", "3")
    run(capsys, ["verify", "--family", "radial", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_bounds_clean_and_widened(capsys):
    code, out, _ = run(capsys, ["bounds", "--trials", "40"])
    assert code == 0
    report = json.loads(out)
    assert report["violations"] == []
    assert report["checks"] > 1000

    code, out, _ = run(capsys, ["bounds", "--trials", "3", "--widen"])
    assert code == 1
    report = json.loads(out)
    assert report["violations"]
    assert all("widened-demo" in v["map"] for v in report["violations"])


def test_bounds_zero_trials_warns(capsys):
    code, _, err = run(capsys, ["bounds", "--trials", "0"])
    assert code == 0
    assert "audits nothing" in err


def test_counterexample_report(capsys):
    code, out, _ = run(capsys, ["counterexample"])
    assert code == 0
    report = json.loads(out)
    ce = report["counterexample"]
    assert ce["gap"] >= 0.79
    assert len(ce["sequence"]) == 18
    assert ce["limit_point"] == pytest.approx(2 ** 0.5)
    assert ce["mirrored_left"]["limit_point"] == pytest.approx(2 - 2 ** 0.5)
    assert min(ce["distances"]) == pytest.approx(ce["gap"])
    assert all(v["pass"] for v in report["verdicts"].values())


def test_counterexample_radius_scales_gap(capsys):
    code, out, _ = run(capsys, ["counterexample", "--radius", "0.25"])
    assert code == 0
    assert json.loads(out)["counterexample"]["gap"] == \
        pytest.approx(0.5 * 0.7933533402912352, rel=1e-12)


def test_counterexample_linear_spec_reports_failure(capsys, tmp_path):
    path = tmp_path / "linear.toml"
    path.write_text('basis = ["1", "sqrt2"]\n'
                    "images = [2.0, 2.8284271247461903]\n")
    code, _, err = run(capsys, ["counterexample", "--spec-file", str(path)])
    assert code == 1
    assert "no discontinuity" in err


def test_counterexample_malformed_spec(capsys, tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("basis = [oops\n")
    code, _, err = run(capsys, ["counterexample", "--spec-file", str(path)])
    assert code == 2


def test_hamel_interval_note(capsys):
    code, _, err = run(capsys, ["verify", "--family", "hamel:default",
                                "--interval", "0,5"])
    assert code == 0
    assert "interval ignored" in err
