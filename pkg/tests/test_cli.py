import csv
import io
import json
import subprocess
import sys

import pytest

from floorprimes import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line]


def test_gx(capsys):
    code, out, _ = run(capsys, "gx", "10")
    assert code == 0
    assert out == "x,value,method\n10,3,fast\n"


def test_fx_json(capsys):
    code, out, _ = run(capsys, "fx", "10", "--format", "json")
    assert jsonl(out) == [{"x": 10, "value": 4, "method": "fast"}]


def test_fpp_brute(capsys):
    code, out, _ = run(capsys, "fpp", "100", "--brute", "--format", "json")
    assert jsonl(out)[0]["value"] == 41 and jsonl(out)[0]["method"] == "brute"


def test_timing_column(capsys):
    _, out, _ = run(capsys, "gx", "100", "--timing", "--format", "json")
    assert "elapsed" in jsonl(out)[0]


@pytest.mark.parametrize("argv", [["gx", "0"], ["gx", "ten"], ["fx", str(2**64)], ["bogus"]])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == cli.EXIT_USAGE


def test_brute_ceiling(capsys, monkeypatch):
    code, _, err = run(capsys, "gx", "1000", "--brute", "--oracle-ceiling", "100")
    assert code == cli.EXIT_USAGE and "ceiling" in err
    monkeypatch.setenv("FLOORSET_ORACLE_CEILING", "100")
    code, _, _ = run(capsys, "gx", "1000", "--brute")
    assert code == cli.EXIT_USAGE
    # flag beats environment
    code, out, _ = run(capsys, "gx", "1000", "--brute", "--oracle-ceiling", "1000")
    assert code == 0


def test_env_format_fallback(capsys, monkeypatch):
    monkeypatch.setenv("FLOORSET_FORMAT", "json")
    _, out, _ = run(capsys, "gx", "10")
    assert jsonl(out)[0]["value"] == 3
    _, out, _ = run(capsys, "gx", "10", "--format", "csv")
    assert out.startswith("x,value")


def test_blocks(capsys):
    code, out, _ = run(capsys, "blocks", "10")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    assert rows[-1] == {"v": "1", "n_lo": "6", "n_hi": "10", "is_prime": "false"}
    _, out, _ = run(capsys, "blocks", "1")
    assert len(out.splitlines()) == 2
    _, out, _ = run(capsys, "blocks", "10", "--format", "json")
    assert [r["v"] for r in jsonl(out)] == [10, 5, 3, 2, 1]


def test_blocks_cap(capsys):
    code, _, err = run(capsys, "blocks", "1000000", "--row-cap", "100")
    assert code == cli.EXIT_USAGE and "--force" in err
    code, out, _ = run(capsys, "blocks", "1000000", "--row-cap", "100", "--force", "--format", "json")
    assert code == 0 and len(jsonl(out)) == 1999


def test_constants_defaults(capsys):
    code, out, _ = run(capsys, "constants", "--format", "json")
    rows = jsonl(out)
    assert [(r["constant"], r["method"]) for r in rows] == [
        ("P", "series"), ("P", "direct_bracket"), ("D", "series"), ("D", "direct_bracket")
    ]
    assert f"{rows[0]['value']:.6f}" == "0.330230"
    assert f"{rows[2]['value']:.5f}" == "0.41382"


def test_constants_options(capsys):
    _, out, _ = run(capsys, "constants", "--depth", "2", "--prime-limit", "100", "--format", "json")
    rows = jsonl(out)
    assert rows[0]["error_bound"] > 0.1
    assert rows[1]["error_bound"] == pytest.approx(1 / 101)


def test_csv_and_json_encode_same_data(capsys):
    _, c, _ = run(capsys, "report", "fx", "--points", "10,100,1000", "--bounds")
    _, j, _ = run(capsys, "report", "fx", "--points", "10,100,1000", "--bounds", "--format", "json")
    crow = list(csv.DictReader(io.StringIO(c)))
    jrow = jsonl(j)
    assert len(crow) == len(jrow) == 4
    for a, b in zip(crow, jrow):
        assert list(a) == list(b)
        for k, v in b.items():
            if v is None:
                assert a[k] == ""
            elif isinstance(v, float):
                assert float(a[k]) == v
            else:
                assert a[k] == str(v)


def test_report_fx(capsys):
    code, out, _ = run(capsys, "report", "fx", "--points", "10,100,1000", "--format", "json")
    rows = jsonl(out)
    assert len(rows) == 3 and rows[0]["exact"] == 4


def test_report_gx_point(capsys):
    _, out, _ = run(capsys, "report", "gx", "--points", "1000000", "--format", "json")
    (row,) = jsonl(out)
    assert row["normalized"] is not None


def test_report_grid(capsys):
    _, out, _ = run(capsys, "report", "fpp", "--grid", "10:10000", "--format", "json")
    assert [r["x"] for r in jsonl(out)] == [10, 100, 1000, 10000]


@pytest.mark.parametrize(
    "argv",
    [
        ["report", "fx", "--points", ""],
        ["report", "fx", "--points", "10,,20"],
        ["report", "gx", "--points", "1"],
        ["report", "gx", "--points", "10", "--bounds"],
        ["report", "fx", "--grid", "abc"],
    ],
)
def test_report_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == cli.EXIT_USAGE


def test_scan_theorem2(capsys):
    code, out, _ = run(capsys, "scan", "theorem2", "--to", "100000")
    assert code == 0
    (summary,) = jsonl(out)
    assert summary["type"] == "summary" and summary["counterexample_count"] == 0
    assert summary["agreement_count"] == summary["predicted_count"] == 9591


def test_scan_conjecture_exit_zero(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "scan", "conjecture4", "--to", "20000", "--report", str(report))
    assert code == 0
    data = json.loads(report.read_text())
    assert data["filter"] == "three_distinct_odd_primes"
    assert jsonl(out)[-1]["counterexample_count"] == len(data["counterexamples"])


def test_scan_theorem_counterexample_exit_code(capsys, monkeypatch):
    from floorprimes import identities

    real = identities.G
    monkeypatch.setattr(identities, "G", lambda x, s=None: real(x, s) + (x == 97))
    code, out, _ = run(capsys, "scan", "theorem2", "--to", "200")
    assert code == cli.EXIT_THEOREM
    rows = jsonl(out)
    assert rows[0]["type"] == "finding" and rows[0]["x"] == 97


def test_scan_rejects_csv(capsys):
    code, _, _ = run(capsys, "scan", "theorem2", "--to", "100", "--format", "csv")
    assert code == cli.EXIT_USAGE


def test_scan_checkpoint_mismatch(capsys, tmp_path):
    ckpt = str(tmp_path / "c.json")
    assert run(capsys, "scan", "theorem2", "--to", "1000", "--checkpoint", ckpt)[0] == 0
    code, _, err = run(capsys, "scan", "theorem3", "--to", "1000", "--checkpoint", ckpt, "--resume")
    assert code == cli.EXIT_USAGE and "checkpoint" in err


def test_scan_io_error(capsys, tmp_path):
    code, _, _ = run(capsys, "scan", "theorem2", "--to", "1000", "--checkpoint", str(tmp_path / "missing" / "c.json"))
    assert code == cli.EXIT_IO


def test_scan_deterministic_across_workers(capsys, monkeypatch):
    _, one, _ = run(capsys, "scan", "conjecture4", "--to", "30000", "--checkpoint-every", "5000")
    monkeypatch.setenv("FLOORSET_WORKERS", "4")
    _, four, _ = run(capsys, "scan", "conjecture4", "--to", "30000", "--checkpoint-every", "5000")
    assert one == four


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "floorprimes.cli", "fx", "10"], capture_output=True, text=True, check=True
    ).stdout
    assert out == "x,value,method\n10,4,fast\n"
