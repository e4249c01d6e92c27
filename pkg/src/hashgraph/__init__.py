"""Batch-mode hashgraph consensus with a deterministic gossip simulator."""

__version__ = "0.1.0"

from .events import Event, coin, supermajor, superminor  # noqa: E402
from .kernel import BACKEND  # noqa: E402
from .world import ProtocolParams, World  # noqa: E402

__all__ = ["Event", "World", "ProtocolParams", "coin", "supermajor", "superminor", "BACKEND"]
