"""Trans-series coefficients of Painleve I and their large-order checks."""

from __future__ import annotations

__version__ = "0.1.0"
