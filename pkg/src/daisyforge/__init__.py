"""Daisy-free set families over finite fields and hypercube hitting sets."""

__version__ = "0.1.0"

from .daisy import DaisyPattern, daisy_free, find_consecutive_q6
from .families import LayeredFamily, SetFamily, density, density_sum
from .gf import FiniteField, field_make
from .hitting import HittingFamily, verify_hitting

__all__ = [
    "DaisyPattern", "FiniteField", "HittingFamily", "LayeredFamily", "SetFamily",
    "daisy_free", "density", "density_sum", "field_make", "find_consecutive_q6", "verify_hitting",
]
