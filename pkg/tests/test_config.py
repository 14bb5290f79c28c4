import json

import pytest

from oracleforge.config import CONFIG_ENV, ConfigError, RunConfig, config_from_dict, load_config, with_overrides


def test_defaults():
    config = load_config(None)
    assert config == RunConfig()
    assert config.chain.mean_interblock == 13.0
    assert config.cost.eur_per_eth == 144.86
    assert config.oracles.retry_backoff == (0.5, 1.0, 2.0)
    assert config.offchain.transport == "http"


def test_full_example_loads(tmp_path):
    data = {
        "chain": {"seed": 7, "mean_interblock": 13},
        "cost": {"eur_per_eth": 144.86},
        "offchain": {"transport": "inprocess", "outage_start": 0.0, "outage_duration": 60.0},
        "oracles": {"location": "Linz", "retry_backoff": [0.5, 1.0, 2.0],
                    "push_outbound_filter": {"event": "GoodsRegistered(uint40)"}},
        "benchmark": {"pattern": "push-inbound", "n": 500},
        "output": {"csv": "push-inbound.csv"},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data))
    config = load_config(path)
    assert config.chain.seed == 7 and isinstance(config.chain.mean_interblock, float)
    assert config.oracles.push_outbound_filter.event == "GoodsRegistered(uint40)"
    assert config.benchmark.n == 500 and config.output.csv == "push-inbound.csv"


@pytest.mark.parametrize("data, message", [
    ({"chian": {}}, "unknown keys chian"),
    ({"chain": {"sed": 1}}, r"config\.chain: unknown keys sed"),
    ({"oracles": {"pull_inbound_filter": {"adress": "x"}}}, "unknown keys adress"),
    ({"chain": {"seed": "7"}}, "expected an integer"),
    ({"chain": {"seed": True}}, "expected an integer"),
    ({"chain": {"seed": -1}}, "seed"),
    ({"benchmark": {"pipeline": 1}}, "expected true/false"),
    ({"benchmark": {"pattern": "sideways"}}, "sideways"),
    ({"benchmark": {"n": 0}}, "at least 1"),
    ({"offchain": {"transport": "carrier-pigeon"}}, "transport"),
    ({"oracles": {"retry_backoff": 0.5}}, "expected a list"),
    ({"cost": {"eur_per_eth": 0}}, "positive"),
    ({"chain": []}, "expected an object"),
])
def test_invalid_configs(data, message):
    with pytest.raises(ConfigError, match=message):
        config_from_dict(data)


def test_env_var_fallback(tmp_path, monkeypatch):
    path = tmp_path / "env.json"
    path.write_text(json.dumps({"chain": {"seed": 99}}))
    monkeypatch.setenv(CONFIG_ENV, str(path))
    assert load_config().chain.seed == 99
    explicit = tmp_path / "explicit.json"
    explicit.write_text("{}")
    assert load_config(explicit).chain.seed == RunConfig().chain.seed


def test_unreadable_and_invalid_json(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)


def test_overrides_skip_none_and_validate():
    config = with_overrides(RunConfig(), chain={"seed": 5, "clock_mode": None}, offchain={"transport": None})
    assert config.chain.seed == 5 and config.offchain == RunConfig().offchain
    with pytest.raises(ConfigError):
        with_overrides(RunConfig(), chain={"mean_interblock": -1.0})
    with pytest.raises(ConfigError):
        with_overrides(RunConfig(), chain={"nope": 1})
