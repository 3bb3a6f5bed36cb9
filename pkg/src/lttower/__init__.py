"""Exact, finite-precision computations for towers of p-adic fields.

p-adic integers and truncated power series, formal group laws and their
heights, the cyclotomic tower and its field of norms, matrix models of
the Galois groups, finite group cohomology, and (phi, Gamma) on O_E.
"""
from .padic import BudgetExceeded, NonUnitError, PadicContext, PadicInt, PrecisionError

__version__ = "0.1.0"

__all__ = ["BudgetExceeded", "NonUnitError", "PadicContext", "PadicInt", "PrecisionError"]
