import json

import pytest

from ballconvex.cli import main

DISK = '{"type":"ball","center":[0,0],"radius":1}'


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_hull(capsys):
    code, out, _ = run(capsys, "hull", "--body", DISK, "--radius", "2", "--resolution", "16")
    assert code == 0
    doc = json.loads(out)
    assert doc["type"] == "ball-polyhedron" and len(doc["centers"]) == 16


def test_float_writes_certificate(capsys, tmp_path):
    out = tmp_path / "float.json"
    code, _, _ = run(capsys, "float", "--body", DISK, "--radius", "2", "--delta", "1e-3",
                     "--resolution", "16", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert len(doc["certificate"]) == 16
    assert all(abs(c["cut_volume"] - 1e-3) < 1e-6 for c in doc["certificate"])


def test_body_file(capsys, tmp_path):
    spec = tmp_path / "body.json"
    spec.write_text('{"type":"ellipsoid","semiaxes":[1.2,1.0]}')
    code, out, _ = run(capsys, "asa", "--body", str(spec), "--radius", "3", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "resolution,nodes,value" and len(lines) == 4


def test_covariogram(capsys):
    code, out, _ = run(capsys, "covariogram", "--body", DISK, "--ball", "0,0,1", "--at", "1,0",
                       "--samples", "200000", "--format", "csv")
    assert code == 0
    est, se = map(float, out.splitlines()[1].split(","))
    assert abs(est - 1.2283696986087567) < 4 * se


def test_sphere_integral(capsys):
    code, out, _ = run(capsys, "sphere-integral", "--coeffs", "1,4,9", "--mc", "100000")
    doc = json.loads(out)
    assert code == 0 and doc["relative_difference"] < 0.02


def test_cap(capsys):
    code, out, _ = run(capsys, "cap", "--semiaxes", "1,1.5,2", "--R", "5", "--h", "1e-3")
    doc = json.loads(out)
    assert code == 0 and 0.999 < doc["ratio"] < 1.0


def test_verify_limit(capsys):
    code, out, _ = run(capsys, "verify-limit", "--body", DISK, "--radius", "2", "--resolution", "16")
    assert code == 0
    assert out.splitlines()[0].startswith("delta,deficit,stderr,ratio,predicted")


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "verify-limit", "--body", DISK, "--radius", "0.5")[0] == 3
    assert run(capsys, "asa", "--body", '{"type":"cube"}')[0] == 2
    assert run(capsys, "sphere-integral", "--coeffs", "1,0")[0] == 3
    code, _, err = run(capsys, "verify-limit", "--body", DISK, "--radius", "2", "--resolution", "16",
                       "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 2 and "missing" in err
    empty = tmp_path / "battery.json"
    empty.write_text("[]")
    assert run(capsys, "props", "--battery", str(empty))[0] == 5


def test_argument_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cap", "--semiaxes", "a,b", "--R", "1", "--h", "1"])
    assert exc.value.code == 2
