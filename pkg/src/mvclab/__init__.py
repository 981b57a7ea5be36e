"""Multi-version coding lab."""

from .gf import BACKEND
from .model import SystemParams

__all__ = ["BACKEND", "SystemParams"]
__version__ = "0.1.0"
