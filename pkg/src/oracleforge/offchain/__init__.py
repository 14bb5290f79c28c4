"""Mock off-chain world: credit API, QR scan feed, ERP sink."""

from .credit import CreditProfile, CreditService, NotFound, ServiceUnavailable, load_fixtures
from .erp import ErpMessage, ErpSink, parse_delivery
from .http import CreditClient, ErpClient, LocalCreditClient, LocalErpClient, ServiceServer
from .scans import ITEM_CATALOG, ScanRecord, emit_scans

__all__ = [
    "CreditClient", "CreditProfile", "CreditService", "ErpClient", "ErpMessage", "ErpSink", "ITEM_CATALOG",
    "LocalCreditClient", "LocalErpClient", "NotFound", "ScanRecord", "ServiceServer", "ServiceUnavailable",
    "emit_scans", "load_fixtures", "parse_delivery",
]
