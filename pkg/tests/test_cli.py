import json
import subprocess
import sys
from pathlib import Path

import pytest

from latnf.cli import main

FIELD_QI = {"poly": [1, 0, 1]}
FIELD_QR2 = {"poly": [-2, 0, 1]}


@pytest.fixture()
def qi_file(tmp_path):
    p = tmp_path / "qi.json"
    p.write_text(json.dumps(FIELD_QI))
    return str(p)


@pytest.fixture()
def qr2_file(tmp_path):
    p = tmp_path / "qr2.json"
    p.write_text(json.dumps(FIELD_QR2))
    return str(p)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestFieldCommand:
    def test_qi_report(self, qi_file, capsys):
        code, out, _ = run_cli(["field", qi_file, "--split-bound", "11"],
                               capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["disc"] == -4
        assert rep["signature"] == [0, 1]
        assert "2" in rep["splitting"]
        assert rep["config"]["version"]

    def test_qs5_disc(self, tmp_path, capsys):
        p = tmp_path / "f.json"
        p.write_text(json.dumps({"poly": [5, 0, 1]}))
        code, out, _ = run_cli(["field", str(p)], capsys)
        assert json.loads(out)["disc"] == -20

    def test_malformed_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, _, err = run_cli(["field", str(p)], capsys)
        assert code == 2
        assert "precondition" in err

    def test_reducible_poly_precondition(self, tmp_path, capsys):
        p = tmp_path / "red.json"
        p.write_text(json.dumps({"poly": [-1, 0, 1]}))
        code, _, err = run_cli(["field", str(p)], capsys)
        assert code == 2


class TestIdealCommand:
    def test_norm_and_mul(self, qi_file, tmp_path, capsys):
        a = tmp_path / "a.json"
        a.write_text(json.dumps({"denom": 1, "hnf": [[2, 0], [0, 2]]}))
        code, out, _ = run_cli(["ideal", qi_file, str(a), "--op", "norm"],
                               capsys)
        assert code == 0 and json.loads(out)["norm"] == "4"
        code, out, _ = run_cli(["ideal", qi_file, str(a), "--op", "mul",
                                "--other", str(a)], capsys)
        assert code == 0
        assert json.loads(out)["hnf"] == [[4, 0], [0, 4]]
        code, out, _ = run_cli(["ideal", qi_file, str(a), "--op", "inv"],
                               capsys)
        assert json.loads(out)["denom"] == 2


class TestReduceCommand:
    def test_lll_identity(self, tmp_path, capsys):
        m = tmp_path / "m.json"
        m.write_text(json.dumps({"exact": True, "rows": 2, "cols": 2,
                                 "data": [["1", "0"], ["0", "1"]]}))
        code, out, _ = run_cli(["reduce", str(m), "--alg", "bkz",
                                "--blocksize", "2"], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["ledger"]["c1_bound"] is True

    def test_bkz_full_random(self, tmp_path, capsys):
        m = tmp_path / "m.json"
        m.write_text(json.dumps({"exact": True, "rows": 3, "cols": 3,
                                 "data": [["7", "2", "0"], ["1", "9", "3"],
                                          ["4", "0", "11"]]}))
        code, out, _ = run_cli(["reduce", str(m), "--alg", "bkz-full",
                                "--blocksize", "2"], capsys)
        assert code == 0
        assert json.loads(out)["ledger"]["full_bound"] is True

    def test_bkp_error_too_large(self, tmp_path, capsys):
        m = tmp_path / "m.json"
        m.write_text(json.dumps({"exact": True, "rows": 2, "cols": 2,
                                 "data": [["1", "0"], ["0", "1"]]}))
        code, _, err = run_cli(["reduce", str(m), "--alg", "bkp",
                                "--err", "1/2", "--mu", "1/2",
                                "--r0", "2"], capsys)
        assert code == 2


class TestSampleCommand:
    def test_prime_mode(self, qi_file, capsys):
        code, out, _ = run_cli(["sample", qi_file, "--mode", "prime",
                                "--count", "5", "--bound", "20",
                                "--seed", "3"], capsys)
        assert code == 0
        lines = [json.loads(l) for l in out.strip().splitlines()]
        assert len(lines) == 5
        assert all(l["checks"]["norm_le_bound"] for l in lines)

    def test_gaussian_mode(self, qi_file, capsys):
        code, out, _ = run_cli(["sample", qi_file, "--mode", "gaussian",
                                "--count", "3", "--seed", "1"], capsys)
        assert code == 0
        assert all(json.loads(l)["checks"]["window"]
                   for l in out.strip().splitlines())

    def test_count_zero_empty(self, qi_file, capsys):
        code, out, _ = run_cli(["sample", qi_file, "--mode", "prime",
                                "--count", "0"], capsys)
        assert code == 0 and out.strip() == ""

    def test_box_mode(self, qi_file, capsys):
        code, out, _ = run_cli(["sample", qi_file, "--mode", "box",
                                "--count", "1", "--seed", "5",
                                "--radius-constant", "2"], capsys)
        assert code == 0
        line = json.loads(out.strip().splitlines()[0])
        assert line["checks"]["member"] is True
        assert line["config"]["radius_constant"] == 2

    def test_determinism(self, qi_file, capsys):
        _, out1, _ = run_cli(["sample", qi_file, "--mode", "prime",
                              "--count", "4", "--seed", "9"], capsys)
        _, out2, _ = run_cli(["sample", qi_file, "--mode", "prime",
                              "--count", "4", "--seed", "9"], capsys)
        assert out1 == out2


class TestConfigEcho:
    def test_paper_gap_constants_echoed(self, qi_file, capsys):
        code, out, _ = run_cli(["field", qi_file, "--b-sm", "17",
                                "--kessler-c", "900"], capsys)
        cfgd = json.loads(out)["config"]
        assert cfgd["b_sm"] == 17
        assert cfgd["kessler_c"] == 900
        assert cfgd["radius_constant"] == 48
        assert cfgd["tour_cap_c"] == 1.0


class TestEntryPoint:
    def test_module_invocation(self, qi_file):
        out = subprocess.run(
            [sys.executable, "-m", "latnf.cli", "field", qi_file],
            capture_output=True, text=True, timeout=120)
        assert out.returncode == 0
        assert json.loads(out.stdout)["disc"] == -4
