"""Collective spin-1/2 metrology engine.

Simulates Lindblad dynamics of N two-level systems under local and
collective noise, computes quantum Fisher information (scalar and matrix),
Cramer-Rao bounds, twisting-based probe preparation and phase-space
diagnostics, and drives the scenario CLI that exports deterministic CSV
tables.
"""

__version__ = "0.1.0"

from .liouville import HamiltonianSpec, NoiseChannel, RepresentationError
from .metrology import QfiCurve, ScanResult, WeightedBound
from .spin_core import SymmetricState, coherent_amplitudes, ghz_axis, multi_ghz

__all__ = [
    "HamiltonianSpec",
    "NoiseChannel",
    "QfiCurve",
    "RepresentationError",
    "ScanResult",
    "SymmetricState",
    "WeightedBound",
    "coherent_amplitudes",
    "ghz_axis",
    "multi_ghz",
    "__version__",
]
