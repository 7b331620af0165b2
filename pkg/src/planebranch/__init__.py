"""Invariants and analytic normal forms of plane branches."""
from __future__ import annotations

__version__ = "0.1.0"
