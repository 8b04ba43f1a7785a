import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from bdspace.cli import main, parse_dvector, run_command
from bdspace.bdcore import ATOM, filler
from bdspace.errors import ParseError


def _records(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh]


def test_tnorm(tmp_path, capsys):
    assert main(["tnorm", "--vector", "{3:1,4:1,5:1}"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["command"] == "tnorm"
    assert rec["outputs"]["norm"]["exact"] == "3/2"


def test_alpha_and_not_found(tmp_path):
    out = tmp_path / "a.jsonl"
    assert main(["alpha", "--k-max", "8", "--out", str(out)]) == 0
    rec = _records(out)[0]
    assert rec["outputs"]["k"] == 4
    assert main(["alpha", "--system", "full", "--out", str(out)]) == 1


def test_alpha_blocks(capsys):
    assert main(["alpha", "--blocks", "6-6,7-7,8-8,9-9,10-10,11-11,12-12,13-13,14-14,15-15,"
                 "16-16,17-17,18-18,19-19,20-20,21-21,22-22,23-23,24-24,25-25"]) == 0
    assert json.loads(capsys.readouterr().out)["outputs"]["k"] <= 20


def test_validate_and_eval(capsys):
    node = "4|a|-|2|(1,0,1,0,1);(1,2,3,0,1)"
    assert main(["validate", "--node", node]) == 0
    heavy = "4|a|-|2|(1,0,1,0,2);(1,2,3,0,2)"
    assert main(["validate", "--node", heavy]) == 1
    capsys.readouterr()
    g = "5|a|-|1|(1,2,3,3|a|-|1|(1,0,0,0,1),2)"
    assert main(["eval", "--node", g, "--dvector", f"1@{filler(3).id}"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["outputs"]["value"]["exact"] == "14/75"


def test_parse_dvector():
    x = parse_dvector(f"1/2@{filler(2).id} -3@0")
    assert dict(x.items()) == {filler(2): Fraction(1, 2), ATOM: -3}
    with pytest.raises(ParseError):
        parse_dvector("1@")


def test_constants_csv(tmp_path):
    out, table = tmp_path / "c.jsonl", tmp_path / "c.csv"
    assert main(["constants", "--out", str(out), "--csv", str(table)]) == 0
    rec = _records(out)[0]
    assert rec["outputs"]["C"]["exact"] == "440"
    with open(table) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1 and rows[0]["outputs.isoBound.exact"] == "15"


def test_certify_and_verify(tmp_path):
    cert, out = tmp_path / "cert.json", tmp_path / "o.jsonl"
    assert main(["certify-growth", "--cert", str(cert), "--out", str(out)]) == 0
    assert _records(out)[0]["outputs"]["ks"] == [4, 19, 79]
    assert main(["verify", "--cert", str(cert), "--out", str(out)]) == 0
    assert _records(out)[0]["outputs"]["verified"] is True
    assert main(["verify", "--cert", str(cert), "--system", "full", "--out", str(out)]) == 1


def test_exit_codes(tmp_path, capsys):
    assert main(["no-such-command"]) == 2
    assert main([]) == 2
    assert main(["tnorm", "--vector", "{0:1}"]) == 2
    assert main(["certify-growth", "--system", "full", "--out", str(tmp_path / "x")]) == 1
    assert main(["certify-growth", "--max-rank", "50", "--out", str(tmp_path / "x")]) == 3
    assert main(["constants", "--theta", "3/2"]) == 2
    err = capsys.readouterr().err
    assert "E_PRECONDITION" in err


def test_empty_vector(capsys):
    assert main(["tnorm", "--vector", "{}"]) == 0
    assert json.loads(capsys.readouterr().out)["outputs"]["norm"]["exact"] == "0"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nsystem = singletons\nomega = 2/5\n")
    assert main(["alpha", "--config", str(cfg)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["outputs"]["k"] == 3
    # explicit flags win over the file
    assert main(["alpha", "--config", str(cfg), "--system", "schreier", "--omega", "1/2"]) == 0
    assert json.loads(capsys.readouterr().out)["outputs"]["k"] == 4


def test_deterministic_records():
    a = run_command(["contrast", "--samples", "10"])[1]
    b = run_command(["contrast", "--samples", "10"])[1]
    assert a == b
    assert all("seconds" not in r for r in a)
    timed = run_command(["constants", "--timing"])[1]
    assert "seconds" in timed[0]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "bdspace", "constants"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["outputs"]["projBound"]["exact"] == "30"
