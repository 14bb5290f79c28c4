import json

import pytest

from oracleforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bench_writes_csv_and_summary(tmp_path, capsys):
    out = tmp_path / "pi.csv"
    code, stdout, err = run(capsys, "bench", "--pattern", "pull-inbound", "--n", "12", "--out", str(out),
                            "--transport", "inprocess")
    assert code == 0
    assert "22,770" in stdout and "12 measured, 0 failed" in err
    summary = json.loads(out.with_suffix(".summary.json").read_text())
    assert summary["measured"] == 12 and summary["stats"]["gas_used"]["std"] == 0
    assert len(out.read_text().splitlines()) == 13


def test_bench_default_paths(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    code, _, _ = run(capsys, "bench", "--pattern", "pull-outbound", "--n", "3")
    assert code == 0
    assert (tmp_path / "pull-outbound.csv").exists() and (tmp_path / "pull-outbound.summary.json").exists()


def test_bench_all_failed_exits_one(tmp_path, capsys):
    config = tmp_path / "outage.json"
    config.write_text(json.dumps({"offchain": {"transport": "inprocess", "outage_start": 0.0,
                                               "outage_duration": 1e9}}))
    code, _, err = run(capsys, "bench", "--config", str(config), "--pattern", "pull-inbound", "--n", "2",
                       "--out", str(tmp_path / "o.csv"))
    assert code == 1 and "0 measured, 2 failed" in err


def test_report_formats(tmp_path, capsys):
    out = tmp_path / "pu.csv"
    run(capsys, "bench", "--pattern", "push-inbound", "--n", "8", "--out", str(out), "--transport", "inprocess")
    code, table, _ = run(capsys, "report", str(out))
    assert code == 0 and "push-inbound" in table and "cost [EUR]" in table
    code, box, _ = run(capsys, "report", str(out), "--format", "boxplot")
    assert code == 0 and set(json.loads(box)["push-inbound"]) == {"dt_seconds", "gas_used", "cost_eur"}


def test_report_error_exits_one(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, _, err = run(capsys, "report", str(empty))
    assert code == 1 and "empty file" in err


def test_demo_qr_trace(tmp_path, capsys):
    out = tmp_path / "demo.json"
    code, stdout, _ = run(capsys, "demo", "qr-trace", "--scans", "10", "--restart-listener", "--seed", "5",
                          "--out", str(out))
    assert code == 0
    result = json.loads(stdout)
    assert result["status"] == "ok" and len(result["artifacts"]["6a-erp-delivery"]["messages"]) == 10
    assert json.loads(out.read_text()) == result


def test_demo_credit_check_outcomes(capsys):
    code, stdout, _ = run(capsys, "demo", "credit-check", "--transport", "inprocess")
    assert code == 0 and json.loads(stdout)["status"] == "ok"
    code, stdout, _ = run(capsys, "demo", "credit-check", "--tax-id", "DE-404", "--transport", "inprocess")
    assert code == 0 and json.loads(stdout)["status"] == "withheld"


def test_demo_failed_verification_exits_one(tmp_path, capsys):
    config = tmp_path / "outage.json"
    config.write_text(json.dumps({"offchain": {"outage_start": 0.0, "outage_duration": 1e9}}))
    code, stdout, err = run(capsys, "demo", "credit-check", "--config", str(config))
    assert code == 1
    assert json.loads(stdout)["status"] == "verification-failed"
    assert "at step 4-credit-lookup" in err


def test_config_error_exits_two(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({"chain": {"seeed": 1}}))
    code, _, err = run(capsys, "demo", "credit-check", "--config", str(config))
    assert code == 2 and "unknown keys seeed" in err


@pytest.mark.parametrize("argv", [
    ["bench", "--pattern", "bogus"],
    ["demo", "unknown"],
    ["bench", "--seed", "-1"],
    ["bench", "--n", "many"],
    [],
])
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
