"""Benchmark harness: drive one pattern's standard workload and measure it.

Latency definitions::

    tx_hash_latency   dt = t2 - t1   submission start -> tx hash received
    read_latency      dt = t2 - t1   request in -> response out
    tx_mined_latency  dt = t4 - t3   block timestamp -> event received

Inbound patterns also record gas and the euro cost at the oracle's gas
price. Failed invocations are counted, never measured.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from ..chain import ChainError
from ..config import RunConfig, with_overrides
from ..contracts import PLACE_ORDER
from ..offchain import ScanRecord, emit_scans
from ..oracles import CorrelatedRequest, PatternKind, RequestError, RetryExhausted
from ..usecases.world import World
from .cost import CostModel, to_eur
from .stats import SummaryStats, boxplot, format_table, summarize

logger = logging.getLogger(__name__)

KINDS = ("tx_hash_latency", "tx_mined_latency", "read_latency")
COLUMNS = ("pattern", "kind", "t1", "t2", "t3", "t4", "dt_seconds", "gas_used", "gas_price_wei", "cost_eur")
KIND_FOR = {
    PatternKind.PULL_INBOUND: "tx_hash_latency",
    PatternKind.PUSH_INBOUND: "tx_hash_latency",
    PatternKind.PULL_OUTBOUND: "read_latency",
    PatternKind.PUSH_OUTBOUND: "tx_mined_latency",
}
INVOCATION_TIMEOUT = 900.0


class InvariantViolation(ValueError):
    pass


class InvocationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class Measurement:
    pattern: PatternKind
    kind: str
    t1: float | None
    t2: float | None
    t3: float | None
    t4: float | None
    dt: float
    gas_used: int | None = None
    gas_price_wei: int | None = None
    cost_eur: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "pattern", PatternKind(self.pattern))
        if self.kind not in KINDS:
            raise InvariantViolation(f"unknown measurement kind {self.kind!r}")
        start, end = ("t3", "t4") if self.kind == "tx_mined_latency" else ("t1", "t2")
        a, b = getattr(self, start), getattr(self, end)
        if a is None or b is None:
            raise InvariantViolation(f"{self.kind} needs {start} and {end}")
        if b < a:
            raise InvariantViolation(f"{end} ({b}) precedes {start} ({a})")
        if not math.isclose(self.dt, b - a, rel_tol=1e-9, abs_tol=1e-9):
            raise InvariantViolation(f"dt {self.dt} does not match {end} - {start} = {b - a}")
        gas = (self.gas_used, self.gas_price_wei, self.cost_eur)
        if self.pattern.inbound:
            if any(v is None for v in gas):
                raise InvariantViolation("inbound measurements carry gas_used, gas_price_wei and cost_eur")
        elif any(v is not None for v in gas):
            raise InvariantViolation("outbound measurements carry no gas fields")

    @classmethod
    def create(cls, pattern: PatternKind, kind: str, *, t1: float | None = None, t2: float | None = None,
               t3: float | None = None, t4: float | None = None, gas_used: int | None = None,
               gas_price_wei: int | None = None, cost: CostModel | None = None) -> Measurement:
        """Computes dt from the timestamps and the cost from the gas fields."""
        if kind == "tx_mined_latency":
            if t3 is None or t4 is None:
                raise InvariantViolation("tx_mined_latency needs t3 and t4")
            dt = t4 - t3
        else:
            if t1 is None or t2 is None:
                raise InvariantViolation(f"{kind} needs t1 and t2")
            dt = t2 - t1
        cost_eur = None
        if gas_used is not None and gas_price_wei is not None:
            cost_eur = to_eur(gas_used, gas_price_wei, cost or CostModel())
        return cls(pattern, kind, t1, t2, t3, t4, dt, gas_used, gas_price_wei, cost_eur)

    def csv_row(self) -> list[str]:
        def cell(value):
            return "" if value is None else repr(value)
        return [self.pattern.value, self.kind, cell(self.t1), cell(self.t2), cell(self.t3), cell(self.t4),
                cell(self.dt), cell(self.gas_used), cell(self.gas_price_wei), cell(self.cost_eur)]


def measurements_to_csv(measurements: list[Measurement]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS)
    for m in measurements:
        writer.writerow(m.csv_row())
    return out.getvalue()


# -- workloads -------------------------------------------------------------


class Workload:
    """The standard invocation of one pattern. ``invoke`` runs one
    invocation to completion; ``run_pipelined`` keeps all n in flight."""

    pattern: PatternKind

    def __init__(self, world: World, seed: int):
        self.world = world
        self.seed = seed

    def setup(self, n: int) -> None:
        pass

    def invoke(self, i: int) -> Measurement:
        raise NotImplementedError

    def run_pipelined(self, n: int) -> tuple[list[Measurement], int]:
        measurements, failures = [], 0
        for i in range(n):
            try:
                measurements.append(self.invoke(i))
            except FAILURES as exc:
                logger.info("invocation %d failed: %s", i, exc)
                failures += 1
        return measurements, failures

    def _measure_inbound(self, t1: float, t2: float, tx_hash: str) -> Measurement:
        receipt = self.world.wait_receipt(tx_hash, INVOCATION_TIMEOUT)
        if receipt.status != "success":
            raise InvocationFailed(f"transaction {tx_hash} reverted")
        return Measurement.create(self.pattern, KIND_FOR[self.pattern], t1=t1, t2=t2, gas_used=receipt.gas_used,
                                  gas_price_wei=self.world.gas_price, cost=self.world.cost)


class PullInboundWorkload(Workload):
    """Buyer places an order; measure the oracle's creditVerified response."""

    pattern = PatternKind.PULL_INBOUND

    def setup(self, n: int) -> None:
        self.oracle = self.world.credit_oracle()
        self.tax_ids = self.world.credit.tax_ids()

    def _place(self, i: int) -> int:
        order_id = i + 1
        payload = PLACE_ORDER.encode_call(order_id=order_id, buyer_name=f"buyer {order_id}",
                                          tax_id=self.tax_ids[i % len(self.tax_ids)])
        self.world.buyer.submit(self.world.customer, payload, correlation_id=order_id)
        return order_id

    def _finish(self, order_id: int) -> Measurement:
        if order_id not in self.oracle.responses:
            raise InvocationFailed(f"order {order_id} got no response")
        submission = self._submissions[self.oracle.responses[order_id]]
        return self._measure_inbound(submission.t1, submission.t2, submission.tx_hash)

    @property
    def _submissions(self):
        return {s.tx_hash: s for s in self.oracle.facade.submissions}

    def invoke(self, i: int) -> Measurement:
        dead_before = len(self.oracle.dead_letters)
        order_id = self._place(i)
        self.world.run_until(lambda: order_id in self.oracle.responses
                             or len(self.oracle.dead_letters) > dead_before, INVOCATION_TIMEOUT)
        return self._finish(order_id)

    def run_pipelined(self, n: int) -> tuple[list[Measurement], int]:
        order_ids = [self._place(i) for i in range(n)]
        self.world.settle()
        submissions = self._submissions
        measurements, failures = [], 0
        for order_id in order_ids:
            tx_hash = self.oracle.responses.get(order_id)
            receipt = self.world.chain.get_receipt(tx_hash) if tx_hash else None
            if receipt is None or receipt.status != "success":
                failures += 1
                continue
            s = submissions[tx_hash]
            measurements.append(self._measure_inbound(s.t1, s.t2, tx_hash))
        return measurements, failures


class _ScanFeed(Workload):
    def setup(self, n: int) -> None:
        self.scan = self.world.scan_oracle()
        self.feed: Iterator[ScanRecord] = emit_scans(n, self.seed)


class PushInboundWorkload(_ScanFeed):
    """A QR scan arrives; measure the oracle's registerGoods submission."""

    pattern = PatternKind.PUSH_INBOUND

    def invoke(self, i: int) -> Measurement:
        rejected = len(self.scan.rejections)
        self.scan.update_listener.push(next(self.feed))
        self.world.pump()
        if len(self.scan.rejections) > rejected:
            raise InvocationFailed(f"scan rejected: {self.scan.rejections[-1][1]}")
        tx_hash = self.scan.submitted[-1][1]
        submission = self.scan.facade.submissions[-1]
        return self._measure_inbound(submission.t1, submission.t2, tx_hash)

    def run_pipelined(self, n: int) -> tuple[list[Measurement], int]:
        for scan in self.feed:
            self.scan.update_listener.push(scan)
        self.world.settle()
        measurements, failures = [], len(self.scan.rejections)
        for s in self.scan.facade.submissions:
            try:
                measurements.append(self._measure_inbound(s.t1, s.t2, s.tx_hash))
            except InvocationFailed:
                failures += 1
        return measurements, failures


class PushOutboundWorkload(_ScanFeed):
    """A registered scan's event reaches the ERP; measure block timestamp
    to event receipt."""

    pattern = PatternKind.PUSH_OUTBOUND

    def setup(self, n: int) -> None:
        super().setup(n)
        self.erp = self.world.erp_oracle()

    def _delivered(self, tx_hash: str) -> Measurement:
        receipt = self.world.wait_receipt(tx_hash, INVOCATION_TIMEOUT)
        if receipt.status != "success" or not receipt.logs:
            raise InvocationFailed(f"transaction {tx_hash} produced no event")
        source = (tx_hash, receipt.logs[0].log_index)
        dead_before = len(self.erp.dead_letters)
        self.world.run_until(lambda: source in self.erp.delivered or len(self.erp.dead_letters) > dead_before,
                             INVOCATION_TIMEOUT)
        if source not in self.erp.delivered:
            raise InvocationFailed(f"event {source} was not delivered")
        return Measurement.create(self.pattern, "tx_mined_latency", t3=receipt.block_timestamp,
                                  t4=self.erp.delivered[source].t4)

    def invoke(self, i: int) -> Measurement:
        rejected = len(self.scan.rejections)
        self.scan.update_listener.push(next(self.feed))
        self.world.pump()
        if len(self.scan.rejections) > rejected:
            raise InvocationFailed(f"scan rejected: {self.scan.rejections[-1][1]}")
        return self._delivered(self.scan.submitted[-1][1])

    def run_pipelined(self, n: int) -> tuple[list[Measurement], int]:
        for scan in self.feed:
            self.scan.update_listener.push(scan)
        self.world.settle()
        measurements, failures = [], len(self.scan.rejections)
        for _, tx_hash in self.scan.submitted:
            try:
                measurements.append(self._delivered(tx_hash))
            except FAILURES:
                failures += 1
        return measurements, failures


class PullOutboundWorkload(Workload):
    """A trace request for a registered order; measure the response time.

    Reads are synchronous, so pipelining cannot overlap them and both
    modes behave the same.
    """

    pattern = PatternKind.PULL_OUTBOUND
    registered_orders = 25

    def setup(self, n: int) -> None:
        scan = self.world.scan_oracle()
        for record in emit_scans(min(n, self.registered_orders), self.seed):
            scan.update_listener.push(record)
        self.world.settle()
        self.order_ids = [record.order_id for record, _ in scan.submitted]
        self.trace = self.world.trace_oracle()

    def invoke(self, i: int) -> Measurement:
        request = CorrelatedRequest(i, {"order_id": self.order_ids[i % len(self.order_ids)]}, 0.0)
        clock = self.world.clock
        t1 = clock.now()
        response = self.trace.handle(request)
        t2 = clock.now()
        if not response["records"]:
            raise InvocationFailed(f"trace for order {request.payload['order_id']} came back empty")
        return Measurement.create(self.pattern, "read_latency", t1=t1, t2=t2)


WORKLOADS: dict[PatternKind, type[Workload]] = {
    PatternKind.PULL_INBOUND: PullInboundWorkload,
    PatternKind.PUSH_INBOUND: PushInboundWorkload,
    PatternKind.PULL_OUTBOUND: PullOutboundWorkload,
    PatternKind.PUSH_OUTBOUND: PushOutboundWorkload,
}
FAILURES = (InvocationFailed, TimeoutError, ChainError, RetryExhausted, ConnectionError, RequestError)


# -- running ---------------------------------------------------------------


@dataclass
class BenchmarkResult:
    pattern: PatternKind
    requested: int
    pipeline: bool
    seed: int
    measurements: list[Measurement] = field(default_factory=list)
    failures: int = 0
    clock_time: float = 0.0

    @property
    def dt_stats(self) -> SummaryStats | None:
        return summarize([m.dt for m in self.measurements]) if self.measurements else None

    def column_stats(self) -> dict[str, SummaryStats | None]:
        out: dict[str, SummaryStats | None] = {"dt_seconds": self.dt_stats, "gas_used": None, "cost_eur": None}
        if self.pattern.inbound and self.measurements:
            out["gas_used"] = summarize([m.gas_used for m in self.measurements])
            out["cost_eur"] = summarize([m.cost_eur for m in self.measurements])
        return out

    def csv(self) -> str:
        return measurements_to_csv(self.measurements)

    def summary(self) -> dict:
        stats = self.column_stats()
        return {
            "pattern": self.pattern.value,
            "requested": self.requested,
            "measured": len(self.measurements),
            "failures": self.failures,
            "pipeline": self.pipeline,
            "seed": self.seed,
            "clock_time": self.clock_time,
            "stats": {k: v.to_json() if v else None for k, v in stats.items()},
            "boxplot": {"dt_seconds": boxplot([m.dt for m in self.measurements]).to_json()}
            if self.measurements else None,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def table(self) -> str:
        return format_table(summary_table_rows(self.pattern.value, self.column_stats()))

    def write(self, csv_path: str | Path | None = None, summary_path: str | Path | None = None) -> None:
        if csv_path:
            Path(csv_path).write_text(self.csv())
        if summary_path:
            Path(summary_path).write_text(self.summary_json())


def summary_table_rows(label: str, stats: dict[str, SummaryStats | None]) -> list[tuple[str, SummaryStats | None]]:
    rows: list[tuple[str, SummaryStats | None]] = [(label, None)]
    for column, title in (("dt_seconds", "  dt [s]"), ("gas_used", "  gas"), ("cost_eur", "  cost [EUR]")):
        if stats.get(column) is not None:
            rows.append((title, stats[column]))
    return rows


class BenchmarkError(RuntimeError):
    """Unexpected failure; ``partial`` holds what was measured so far."""

    def __init__(self, message: str, partial: BenchmarkResult):
        super().__init__(message)
        self.partial = partial


def run_benchmark(pattern: PatternKind | str, n: int, config: RunConfig | None = None,
                  pipeline: bool | None = None) -> BenchmarkResult:
    pattern = PatternKind(pattern)
    if n < 1:
        raise ValueError("n must be at least 1")
    config = config or RunConfig()
    config = with_overrides(config, benchmark={"pattern": pattern.value, "n": n, "pipeline": pipeline})
    result = BenchmarkResult(pattern, n, config.benchmark.pipeline, config.chain.seed)
    with World(config) as world:
        start = world.clock.now()
        workload = WORKLOADS[pattern](world, config.chain.seed)
        try:
            workload.setup(n)
            if result.pipeline:
                result.measurements, result.failures = workload.run_pipelined(n)
            else:
                for i in range(n):
                    try:
                        result.measurements.append(workload.invoke(i))
                    except FAILURES as exc:
                        logger.info("invocation %d failed: %s", i, exc)
                        result.failures += 1
        except Exception as exc:
            result.clock_time = world.clock.now() - start
            raise BenchmarkError(f"{pattern.value} benchmark aborted: {exc}", result) from exc
        result.clock_time = world.clock.now() - start
    logger.info("%s: %d measured, %d failed", pattern.value, len(result.measurements), result.failures)
    return result
