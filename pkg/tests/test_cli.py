"""End-to-end CLI tests: exit-code contract, exact outputs, certificate
roundtrips and tamper detection."""

import json

import pytest

from ergobreak.cli import main


def run_cli(*argv):
    return main(list(argv))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_lorenz_invariant_intervals(tmp_path, capsys):
    out = tmp_path / "lorenz.json"
    assert run_cli("lorenz", "--a", "11/10", "--xd", "3/10", "--invariant-intervals", "--out", str(out)) == 0
    payload = read_json(out)
    assert payload["regime"] == "two"
    assert payload["intervals"][0] == ["7/25", "33/100"]
    assert payload["intervals"][1] == ["67/100", "18/25"]


def test_lorenz_single_interval_regime(tmp_path):
    out = tmp_path / "one.json"
    assert run_cli("lorenz", "--a", "19/10", "--xd", "3/10", "--invariant-intervals", "--out", str(out)) == 0
    assert read_json(out)["regime"] == "one"


def test_reduce_eval_full_pipeline_hand_value(tmp_path):
    out = tmp_path / "g.json"
    code = run_cli(
        "reduce-eval", "--n", "3", "--eps", "1/4",
        "--point", "1/10,2/5,9/10", "--stage", "G", "--out", str(out),
    )
    assert code == 0
    payload = read_json(out)
    # exact pipeline value derived by hand; the sample point sits on an atom
    # boundary, so no single closed form applies there
    assert payload["value"] == ["37/60", "1/12"]
    assert payload["fiber"] == "11/12"


def test_reduce_eval_matches_closed_form_on_interior_point(tmp_path):
    out = tmp_path / "g2.json"
    code = run_cli(
        "reduce-eval", "--n", "3", "--eps", "1/4",
        "--point", "1/10,2/5,4/5", "--stage", "G", "--out", str(out),
    )
    assert code == 0
    assert read_json(out)["value"] == ["23/60", "23/60"]


def test_reduce_eval_stages(tmp_path):
    out = tmp_path / "stage.json"
    assert run_cli("reduce-eval", "--n", "3", "--eps", "1/4",
                   "--point", "4/5,1/10,3/10", "--stage", "P", "--out", str(out)) == 0
    assert read_json(out)["value"] == ["-1/5", "1/10", "3/10"]
    assert run_cli("reduce-eval", "--n", "3", "--eps", "1/4",
                   "--point", "4/5,1/10,3/10", "--stage", "pi", "--out", str(out)) == 0
    assert read_json(out)["value"] == ["-1/5", "1/10", "3/10"]
    assert run_cli("reduce-eval", "--n", "3", "--eps", "1/4",
                   "--point", "1/10,2/5,9/10", "--stage", "phi", "--out", str(out)) == 0
    payload = read_json(out)
    assert payload["value"] == ["3/10", "1/2"] and payload["fiber"] == "9/10"


def test_build_and_verify_certificate_roundtrip(tmp_path):
    cert = tmp_path / "c.json"
    assert run_cli("build-asiup", "--d", "3", "--k", "1", "--a", "51/50", "--out", str(cert)) == 0
    assert run_cli("verify-cert", str(cert)) == 0

    # tamper with one byte of a stored weight: replay must fail with code 2
    data = cert.read_text()
    tampered = data.replace('"51/50"', '"52/50"', 1)
    bad = tmp_path / "bad.json"
    bad.write_text(tampered)
    assert run_cli("verify-cert", str(bad)) == 2


def test_build_asiup_failing_rate_exits_2(tmp_path):
    cert = tmp_path / "fail.json"
    assert run_cli("build-asiup", "--d", "3", "--k", "1", "--a", "9/8", "--out", str(cert)) == 2
    payload = read_json(cert)
    assert payload["verdict"] == "fail"
    # the failed certificate still replays cleanly
    assert run_cli("verify-cert", str(cert)) == 2


def test_build_asiup_rate_above_bound_exits_2(tmp_path):
    assert run_cli("build-asiup", "--d", "3", "--k", "1", "--a", "6/5",
                   "--out", str(tmp_path / "x.json")) == 2


def test_planar_route_matches_acceptance_case(tmp_path):
    cert = tmp_path / "planar.json"
    assert run_cli("build-asiup", "--d", "2", "--planar", "--eps", "49/100", "--out", str(cert)) == 0
    assert run_cli("verify-cert", str(cert)) == 0
    failing = tmp_path / "planar_fail.json"
    assert run_cli("build-asiup", "--d", "2", "--planar", "--eps", "1/10", "--out", str(failing)) == 2


def test_search_a_certifies(tmp_path):
    cert = tmp_path / "searched.json"
    assert run_cli("search-a", "--d", "3", "--k", "1", "--precision", "1/16", "--out", str(cert)) == 0
    assert run_cli("verify-cert", str(cert)) == 0


def test_simulate_and_polar_and_density(tmp_path):
    orbit_csv = tmp_path / "orbit.csv"
    assert run_cli("simulate-torus", "--n", "3", "--eps", "0.43", "--steps", "800",
                   "--burn-in", "100", "--seed", "3", "--out", str(orbit_csv)) == 0
    lines = orbit_csv.read_text().splitlines()
    assert lines[0].startswith("# ergobreak")
    assert lines[2] == "t,u1,u2,u3"
    assert len(lines) == 3 + 801

    polar_csv = tmp_path / "polar.csv"
    assert run_cli("polar", "--n", "3", "--eps", "0.43", "--steps", "700",
                   "--burn-in", "200", "--seed", "3", "--out", str(polar_csv)) == 0
    rows = polar_csv.read_text().splitlines()
    assert rows[2] == "t,i,angle,radius"
    assert len(rows) == 3 + 3 * 500

    dens = tmp_path / "density.json"
    assert run_cli("density", "--d", "2", "--eps", "0.3", "--steps", "2000",
                   "--burn-in", "100", "--seed", "0", "--bins", "8", "--out", str(dens)) == 0
    payload = read_json(dens)
    assert abs(sum(payload["cells"].values()) - 1.0) < 1e-12


def test_classify_verb(tmp_path):
    out = tmp_path / "verdict.json"
    assert run_cli("classify", "--n", "3", "--eps", "0.43", "--steps", "20000",
                   "--seed", "0", "--out", str(out)) == 0
    payload = read_json(out)
    assert payload["label"].startswith("perm(")
    assert payload["inversion_symmetric"] is False


def test_atoms_table(tmp_path):
    out = tmp_path / "atoms.json"
    assert run_cli("atoms", "--d", "3", "--varrho", "1/4", "--eps", "1/4", "--out", str(out)) == 0
    payload = read_json(out)
    names = {entry["atom"] for entry in payload["atoms"]}
    assert names == {"A0", "A1", "A2", "A3", "B0", "B1", "B2", "B3"}


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as err:
        run_cli("simulate-torus", "--eps", "0.3", "--out", "x.csv")
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        run_cli("lorenz", "--a", "1/0", "--xd", "3/10", "--invariant-intervals")
    assert err.value.code == 1
    assert run_cli("lorenz", "--a", "5/2", "--xd", "3/10", "--invariant-intervals") == 1
