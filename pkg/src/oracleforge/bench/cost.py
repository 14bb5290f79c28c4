from __future__ import annotations

from dataclasses import dataclass

WEI_PER_ETHER = 10**18
WEI_PER_GWEI = 10**9


@dataclass(frozen=True)
class CostModel:
    """Exchange rate and gas prices used to price transactions in euro.

    ``observed_mean_gas_price`` is in Ether per gas (the volatile testnet
    market average); ``reference_gas_price_gwei`` is the mainnet median.
    """

    eur_per_eth: float = 144.86
    reference_gas_price_gwei: float = 8.5
    observed_mean_gas_price: float = 7.45e-10

    def __post_init__(self):
        for name in ("eur_per_eth", "reference_gas_price_gwei", "observed_mean_gas_price"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
                raise ValueError(f"{name} must be positive, got {value!r}")

    @property
    def reference_gas_price_wei(self) -> int:
        return round(self.reference_gas_price_gwei * WEI_PER_GWEI)


def to_eur(gas: int, gas_price: int | float, model: CostModel) -> float:
    """Euro cost of ``gas`` units at ``gas_price`` wei per gas."""
    if gas < 0 or gas_price < 0:
        raise ValueError("gas and gas_price must be non-negative")
    return gas * gas_price / WEI_PER_ETHER * model.eur_per_eth


def to_eur_reference(gas: int, model: CostModel) -> float:
    return to_eur(gas, model.reference_gas_price_gwei * WEI_PER_GWEI, model)


def to_eur_observed(gas: int, model: CostModel) -> float:
    return to_eur(gas, model.observed_mean_gas_price * WEI_PER_ETHER, model)
