import csv
import io
import json

import pytest

from oracleforge.bench.harness import (
    COLUMNS,
    InvariantViolation,
    Measurement,
    measurements_to_csv,
    run_benchmark,
)
from oracleforge.oracles import PatternKind

from conftest import inprocess_config


def test_measurement_computes_dt_and_cost():
    m = Measurement.create(PatternKind.PULL_INBOUND, "tx_hash_latency", t1=1.0, t2=1.5, gas_used=22_770,
                           gas_price_wei=8_500_000_000)
    assert m.dt == 0.5
    assert m.cost_eur == pytest.approx(0.0280369, abs=1e-7)


@pytest.mark.parametrize("kwargs", [
    dict(pattern="pull-inbound", kind="tx_hash_latency", t1=2.0, t2=1.0, t3=None, t4=None, dt=-1.0,
         gas_used=1, gas_price_wei=1, cost_eur=0.0),
    dict(pattern="pull-inbound", kind="tx_hash_latency", t1=1.0, t2=2.0, t3=None, t4=None, dt=0.7,
         gas_used=1, gas_price_wei=1, cost_eur=0.0),
    dict(pattern="pull-inbound", kind="tx_hash_latency", t1=1.0, t2=2.0, t3=None, t4=None, dt=1.0),
    dict(pattern="push-outbound", kind="tx_mined_latency", t1=None, t2=None, t3=1.0, t4=2.0, dt=1.0,
         gas_used=21_000, gas_price_wei=1, cost_eur=0.0),
    dict(pattern="push-outbound", kind="tx_mined_latency", t1=1.0, t2=2.0, t3=None, t4=None, dt=1.0),
    dict(pattern="pull-outbound", kind="wall_latency", t1=1.0, t2=2.0, t3=None, t4=None, dt=1.0),
])
def test_measurement_invariants(kwargs):
    with pytest.raises(InvariantViolation):
        Measurement(**kwargs)


def test_csv_has_fixed_header_and_full_precision():
    m = Measurement.create(PatternKind.PULL_OUTBOUND, "read_latency", t1=0.1, t2=0.1 + 1 / 3)
    rows = list(csv.reader(io.StringIO(measurements_to_csv([m]))))
    assert tuple(rows[0]) == COLUMNS
    assert float(rows[1][COLUMNS.index("dt_seconds")]) == m.dt
    assert rows[1][COLUMNS.index("gas_used")] == ""


@pytest.mark.parametrize("pattern", [k.value for k in PatternKind])
def test_single_invocation(pattern):
    result = run_benchmark(pattern, 1, inprocess_config())
    assert len(result.measurements) == 1 and result.failures == 0
    s = result.summary()
    assert s["stats"]["dt_seconds"]["n"] == 1 and s["stats"]["dt_seconds"]["std"] == 0
    assert (s["stats"]["gas_used"] is not None) == PatternKind(pattern).inbound


@pytest.mark.parametrize("pattern", ["pull-inbound", "push-outbound"])
def test_benchmark_is_deterministic(pattern):
    a = run_benchmark(pattern, 20, inprocess_config(chain={"seed": 9}))
    b = run_benchmark(pattern, 20, inprocess_config(chain={"seed": 9}))
    c = run_benchmark(pattern, 20, inprocess_config(chain={"seed": 10}))
    assert a.csv() == b.csv() and a.summary_json() == b.summary_json()
    assert a.csv() != c.csv()


@pytest.mark.parametrize("pattern", [k.value for k in PatternKind])
def test_pipelined_mode_measures_everything(pattern):
    result = run_benchmark(pattern, 30, inprocess_config(), pipeline=True)
    assert result.pipeline and len(result.measurements) == 30 and result.failures == 0
    if PatternKind(pattern).inbound:
        assert {m.gas_used for m in result.measurements} >= {result.measurements[0].gas_used}


def test_pipelined_pull_inbound_overlaps_invocations():
    sequential = run_benchmark("pull-inbound", 30, inprocess_config())
    pipelined = run_benchmark("pull-inbound", 30, inprocess_config(), pipeline=True)
    assert pipelined.clock_time < sequential.clock_time / 3
    assert {m.gas_used for m in pipelined.measurements} == {22_770}


def test_outage_failures_are_counted_not_measured():
    config = inprocess_config(offchain={"outage_start": 0.0, "outage_duration": 1e9})
    result = run_benchmark("pull-inbound", 5, config)
    assert result.measurements == [] and result.failures == 5
    summary = result.summary()
    assert summary["measured"] == 0 and summary["stats"]["dt_seconds"] is None


def test_partial_outage_splits_counts():
    # Each order takes roughly one block; a 60 s window swallows a few.
    config = inprocess_config(offchain={"outage_start": 30.0, "outage_duration": 60.0})
    result = run_benchmark("pull-inbound", 20, config)
    assert result.failures > 0 and len(result.measurements) + result.failures == 20


def test_summary_json_is_canonical(tmp_path):
    result = run_benchmark("pull-outbound", 10, inprocess_config())
    result.write(tmp_path / "a.csv", tmp_path / "a.json")
    data = json.loads((tmp_path / "a.json").read_text())
    assert list(data) == sorted(data)
    assert (tmp_path / "a.csv").read_text() == result.csv()


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        run_benchmark("pull-inbound", 0)
    with pytest.raises(ValueError):
        run_benchmark("sideways", 1)
