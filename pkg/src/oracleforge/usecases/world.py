"""Runtime wiring: one clock, one chain, the demo contracts, the off-chain
services and whichever oracles a scenario or benchmark builds.

Everything runs on a single cooperative loop. ``pump`` lets each oracle
drain its inbox; ``run_until`` alternates pumping with firing the next
scheduled clock event (block seals, event deliveries) until a predicate
holds.
"""

from __future__ import annotations

import logging
from typing import Callable

from ..bench.cost import CostModel
from ..chain import SimulatedChain, TransactionReceipt, address_for
from ..clock import make_clock
from ..codec import signature_digest
from ..config import RunConfig
from ..contracts import CREDIT_CHECK_REQUESTED, GOODS_REGISTERED, ArrivalContract, CustomerContract
from ..offchain import (
    CreditClient,
    CreditService,
    ErpClient,
    ErpSink,
    LocalCreditClient,
    LocalErpClient,
    ServiceServer,
    load_fixtures,
)
from ..oracles import (
    BlockchainFacade,
    EventListener,
    OffchainRequestHandler,
    OffchainStateRetriever,
    OffchainTransmitter,
    OnchainStateRetriever,
    OracleInstance,
    PullInboundOracle,
    PullOutboundOracle,
    PushInboundOracle,
    PushOutboundOracle,
    RetryPolicy,
    UpdateListener,
)
from .controllers import CreditCheckController, ErpForwardController, ScanController, TraceController

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 3600.0


class World:
    def __init__(self, config: RunConfig | None = None):
        self.config = config or RunConfig()
        cfg = self.config
        self.clock = make_clock(cfg.chain.clock_mode)
        self.chain = SimulatedChain(cfg.chain, self.clock)
        self.customer = self.chain.deploy(CustomerContract())
        self.arrival = self.chain.deploy(ArrivalContract())
        self.cost: CostModel = cfg.cost
        self.gas_price = cfg.cost.reference_gas_price_wei
        self.retry = RetryPolicy(backoff=cfg.oracles.retry_backoff)

        off = cfg.offchain
        self.credit = CreditService(load_fixtures(off.credit_fixtures), self.clock, off.credit_threshold,
                                    off.outage_start, off.outage_duration)
        self.erp = ErpSink(self.clock)
        self._servers: list[ServiceServer] = []
        if off.transport == "http":
            self.credit_client = CreditClient(cfg.oracles.credit_endpoint or self._serve(credit=self.credit,
                                                                                           port=off.credit_port))
            self.erp_client = ErpClient(cfg.oracles.erp_endpoint or self._serve(erp=self.erp, port=off.erp_port))
        else:
            self.credit_client = LocalCreditClient(self.credit)
            self.erp_client = LocalErpClient(self.erp)

        self.buyer = BlockchainFacade(self.chain, address_for("buyer"), self.gas_price)
        self.oracles: list[OracleInstance] = []

    def _serve(self, **services) -> str:
        server = ServiceServer(host=self.config.offchain.host, **services).start()
        self._servers.append(server)
        return server.url

    # -- oracle builders -------------------------------------------------

    def _filter(self, which, default_address: str, default_event: str) -> tuple[str, str]:
        address = which.address or default_address
        return address, signature_digest(which.event or default_event)

    def credit_oracle(self) -> PullInboundOracle:
        address, topic = self._filter(self.config.oracles.pull_inbound_filter, self.customer,
                                      CREDIT_CHECK_REQUESTED.signature)
        client = self.credit_client
        oracle = PullInboundOracle(
            EventListener(self.chain, address, topic),
            CreditCheckController(self.customer),
            OffchainStateRetriever(lambda request: client.lookup(request.payload["tax_id"]), self.clock, self.retry),
            BlockchainFacade(self.chain, address_for("oracle:credit"), self.gas_price),
        )
        oracle.start()
        self.oracles.append(oracle)
        return oracle

    def scan_oracle(self) -> PushInboundOracle:
        oracle = PushInboundOracle(
            UpdateListener(),
            ScanController(self.arrival, self.config.oracles.location),
            BlockchainFacade(self.chain, address_for("oracle:scan"), self.gas_price),
        )
        self.oracles.append(oracle)
        return oracle

    def trace_oracle(self, source: str = "call") -> PullOutboundOracle:
        oracle = PullOutboundOracle(OffchainRequestHandler(), TraceController(self.arrival, source),
                                    OnchainStateRetriever(self.chain))
        self.oracles.append(oracle)
        return oracle

    def erp_oracle(self) -> PushOutboundOracle:
        address, topic = self._filter(self.config.oracles.push_outbound_filter, self.arrival,
                                      GOODS_REGISTERED.signature)
        oracle = PushOutboundOracle(
            EventListener(self.chain, address, topic),
            ErpForwardController(),
            OffchainTransmitter(self.erp_client.deliver, self.clock, self.retry),
        )
        oracle.start()
        self.oracles.append(oracle)
        return oracle

    # -- driving ---------------------------------------------------------

    def pump(self) -> int:
        """Step every oracle until none has anything left to process."""
        total = 0
        while True:
            handled = sum(oracle.step() for oracle in self.oracles)
            if not handled:
                return total
            total += handled

    def run_until(self, predicate: Callable[[], bool], timeout: float = DEFAULT_TIMEOUT) -> None:
        """Raises TimeoutError if ``predicate`` still fails ``timeout``
        seconds of clock time from now."""
        deadline = self.clock.now() + timeout
        while True:
            self.pump()
            if predicate():
                return
            upcoming = self.clock.next_event_time()
            if upcoming is None or upcoming > deadline:
                raise TimeoutError(f"condition not reached within {timeout}s of clock time")
            self.clock.step()

    def idle(self) -> bool:
        return self.chain.is_quiescent() and not any(oracle.pending() for oracle in self.oracles)

    def settle(self, timeout: float = DEFAULT_TIMEOUT) -> None:
        """Run until no transaction is pending, every event is delivered and
        every oracle inbox is empty."""
        self.run_until(self.idle, timeout)

    def wait_receipt(self, tx_hash: str, timeout: float = DEFAULT_TIMEOUT) -> TransactionReceipt:
        self.run_until(lambda: self.chain.get_receipt(tx_hash) is not None, timeout)
        return self.chain.get_receipt(tx_hash)

    def close(self) -> None:
        for server in self._servers:
            server.stop()
        self._servers.clear()

    def __enter__(self) -> World:
        return self

    def __exit__(self, *exc) -> None:
        self.close()
