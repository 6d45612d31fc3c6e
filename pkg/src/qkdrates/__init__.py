"""Secret key rates of practical QKD platforms: BB84 (single photons, weak
coherent pulses with and without decoys, entangled pairs), Gaussian CV-QKD,
COW/DPS, qubit security bounds, repeaters, and a Monte Carlo BB84 simulator.
"""

from .result import RateResult

__all__ = ["RateResult"]
__version__ = "0.1.0"
