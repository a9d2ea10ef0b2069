"""Distillation of Hadamard-eigenstate magic states with the four-qubit code.

The package reconstructs the 10-to-2 routine from first principles: exact
Pauli/Clifford algebra, a dense state-vector oracle, the routine's circuits,
an exhaustive error enumeration yielding exact acceptance and error
polynomials, models of the 10-to-2 and 15-to-1 routines, a multi-round
sequence planner, and a seeded Monte Carlo layer for the blocked pipeline.
"""

__version__ = "0.1.0"
