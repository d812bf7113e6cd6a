"""Bargaining-model laboratory: sourcing and integration choice, IO
upstreamness, tariff aggregation, and count-data estimation."""

from vilab._core import (
    ConfigError,
    DataError,
    NumericalError,
    buyer_expected_profit,
    classify_deal,
    direct_requirements,
    estimate,
    hypothesis_sweep,
    integrated_expected_profit,
    seller_expected_profit,
    solve,
    surplus_gap_responses,
    synth_panel,
    upstream_quartiles,
    upstream_tariff,
    upstreamness,
    __version__,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "buyer_expected_profit",
    "classify_deal",
    "direct_requirements",
    "estimate",
    "hypothesis_sweep",
    "integrated_expected_profit",
    "seller_expected_profit",
    "solve",
    "surplus_gap_responses",
    "synth_panel",
    "upstream_quartiles",
    "upstream_tariff",
    "upstreamness",
    "__version__",
]
