import pytest

from oracleforge.chain import ChainConfig, SimulatedChain
from oracleforge.clock import VirtualClock
from oracleforge.config import RunConfig, with_overrides
from oracleforge.usecases import World


@pytest.fixture
def clock():
    return VirtualClock()


@pytest.fixture
def chain(clock):
    return SimulatedChain(ChainConfig(seed=11), clock)


@pytest.fixture
def manual_chain(clock):
    return SimulatedChain(ChainConfig(seed=11), clock, auto_mine=False)


def inprocess_config(**sections) -> RunConfig:
    sections.setdefault("offchain", {})
    sections["offchain"] = {"transport": "inprocess", **sections["offchain"]}
    return with_overrides(RunConfig(), **sections)


@pytest.fixture
def world():
    with World(inprocess_config()) as w:
        yield w


@pytest.fixture
def http_world():
    with World(with_overrides(RunConfig(), offchain={"transport": "http"})) as w:
        yield w
