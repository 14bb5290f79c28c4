"""Blockchain oracle patterns (pull/push x inbound/outbound) on a simulated chain."""

__version__ = "0.1.0"
