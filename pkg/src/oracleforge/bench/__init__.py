"""Measurement harness, statistics and cost accounting."""

from .cost import CostModel, to_eur, to_eur_observed, to_eur_reference
from .stats import BoxPlotData, SummaryStats, boxplot, format_table, summarize

__all__ = ["BoxPlotData", "CostModel", "SummaryStats", "boxplot", "format_table", "summarize", "to_eur",
           "to_eur_observed", "to_eur_reference"]
