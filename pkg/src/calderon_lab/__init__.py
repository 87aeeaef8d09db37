"""Calderon projectors, boundary conditions and model problems for elliptic boundary value problems."""
from __future__ import annotations

__version__ = "0.1.0"

CONVENTION_FLAGS = {
    "trace_convention": "Dt",
    "normal": "inward unit normal, product measure on the collar",
    "mode0_cut": 0.5,
    "exterior_complement": "decaying exterior solutions",
}
