import io
import json

import pytest

from condbound.bounds import BoundQuery, evaluate
from condbound.cli import run
from condbound.serialize import dumps, result_from_dict, result_to_dict, round_sig
from condbound.sums import ReductionSpec


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    return code, out.getvalue()


def test_bound_q_table_row():
    code, text = invoke("bound-q", "--rank", "0", "--good", "3", "--mult", "2", "--lambda", "1.47")
    assert code == 0
    data = json.loads(text)
    assert data["B_R"] == pytest.approx(12.956, abs=0.05)
    assert data["B_Z"] == 14
    assert set(data["breakdown"]) == {"rank_term", "prime_sum", "arch_term", "disc_term"}


def test_bound_field_sqrt_m23_scan(fixtures_dir):
    code, text = invoke("bound-field", "--fields", str(fixtures_dir / "q_sqrt_m23.jsonl"))
    data = json.loads(text)
    assert code == 0
    assert data["B_R"] == pytest.approx(0.45, abs=0.02)
    assert data["egr_excluded"] is False
    assert "B_Z" not in data


def test_bound_field_many(fixtures_dir):
    code, text = invoke("bound-field", "--fields", str(fixtures_dir / "hcf_m23.jsonl"), "--lambda", "3.58")
    data = json.loads(text)
    assert [d["label"] for d in data] == ["2.0.23.1", "3.1.23.1", "6.0.12167.1"]
    assert data[2]["B_R"] == pytest.approx(2.01, abs=0.05)


def test_bound_av_types():
    code, text = invoke("bound-av", "--dim", "2", "--type", "2:0,2,0", "--type", "3:1,1,0", "--lambda", "1.62")
    assert code == 0
    assert json.loads(text)["B_R"] == pytest.approx(185.9, abs=0.5)


def test_bound_av_mixed_flags():
    code, text = invoke("bound-av", "--dim", "2", "--mult", "2", "--type", "3:1,1,0", "--lambda", "1.62")
    assert json.loads(text)["B_R"] == pytest.approx(185.9, abs=0.5)


def test_config_file(tmp_path):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({"rank": 1, "lambda": 1.68, "testfunc": {"kind": "odlyzko"}}))
    code, text = invoke("bound-q", "--config", str(cfg))
    assert json.loads(text)["B_R"] == pytest.approx(34.566, abs=0.1)
    # flags override the file
    code, text = invoke("bound-q", "--config", str(cfg), "--rank", "0", "--lambda", "1.31")
    assert json.loads(text)["B_R"] == pytest.approx(10.394, abs=0.01)


def test_scan_fields_csv(fixtures_dir):
    code, text = invoke("scan-fields", "--fields", str(fixtures_dir / "hcf_m23.jsonl"), "--out", "csv")
    lines = text.strip().splitlines()
    assert code == 0
    assert lines[0].startswith("label,degree")
    assert lines[1].startswith("2.0.23.1,2,") and lines[1].endswith(",false,6.0.12167.1,true")


def test_scan_fields_json_counts(fixtures_dir):
    code, text = invoke("scan-fields", "--fields", str(fixtures_dir / "quadratic_rd11.135.jsonl"),
                        "--lambda-grid", "1:3:0.01", "--workers", "2")
    assert json.loads(text)["counts"] == {"2": {"direct": 10, "with_subfields": 10}}


def test_optimize_testfunc():
    code, text = invoke("optimize-testfunc", "--dim", "2", "--rank", "1", "--type", "2:0,0,2", "--type", "3:1,0,1",
                        "--lambda", "2.15", "--basis-degree", "1")
    data = json.loads(text)
    assert code == 0
    assert data["coeffs"][0] == pytest.approx(1.3846, rel=1e-3)
    assert data["polynomial"]["B_R"] < data["odlyzko"]["B_R"]


def test_reproduce_table_one():
    code, text = invoke("reproduce-tables", "--table", "1")
    lines = text.strip().splitlines()
    assert code == 0
    assert len(lines) == 14
    assert all(line.endswith(",true") for line in lines[1:])


@pytest.mark.parametrize("argv", [
    ["bound-q", "--lambda", "-1"],
    ["bound-q", "--good", "2", "--add", "2"],
    ["bound-q", "--testfunc", "gauss"],
    ["bound-q", "--dim", "2"],
    ["bound-field"],
    ["bound-field", "--fields", "/no/such/file.jsonl"],
    ["reproduce-tables", "--table", "9"],
    ["bound-av", "--dim", "2", "--type", "2:1,0"],
    ["bogus"],
    ["bound-q", "--lambda-grid", "1:2"],
])
def test_validation_errors_exit_one(argv, capsys):
    assert invoke(*argv)[0] == 1


def test_numerical_failure_exits_two(monkeypatch):
    from condbound import cli
    from condbound.errors import ToleranceNotReached

    def boom(_):
        raise ToleranceNotReached("forced")

    monkeypatch.setitem(cli.COMMANDS, "bound-q", boom)
    assert invoke("bound-q")[0] == 2


def test_determinism(fixtures_dir):
    argv = ["scan-fields", "--fields", str(fixtures_dir / "cyclotomic.jsonl"), "--lambda-grid", "1:5:0.05"]
    assert invoke(*argv)[1] == invoke(*argv)[1]
    argv = ["bound-av", "--dim", "3", "--good", "2", "--rank", "1"]
    assert invoke(*argv)[1] == invoke(*argv)[1]


def test_round_trip():
    r = evaluate(BoundQuery(rank=1, spec=ReductionSpec.elliptic({2: "add"})), 2.15)
    text = dumps(result_to_dict(r))
    back = result_from_dict(json.loads(text))
    assert dumps(result_to_dict(back)) == text
    assert back.B_R == round_sig(r.B_R) and back.B_Z == r.B_Z and back.flags == r.flags


def test_twelve_significant_digits():
    assert round_sig(12.955957757113671) == 12.9559577571
    assert dumps({"x": 1 / 3}) == '{\n  "x": 0.333333333333\n}\n'
