"""Supply-chain use cases wired onto the four oracle patterns."""

from .controllers import CreditCheckController, ErpForwardController, ScanController, TraceController
from .scenarios import CREDIT_STEPS, QR_STEPS, ScenarioResult, run_credit_check, run_qr_trace
from .world import World

__all__ = [
    "CREDIT_STEPS", "QR_STEPS", "CreditCheckController", "ErpForwardController", "ScanController",
    "ScenarioResult", "TraceController", "World", "run_credit_check", "run_qr_trace",
]
