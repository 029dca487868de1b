"""Complex-superpotential SUSY quantum mechanics toolkit.

Build partner potentials from ``W = f + i g``, diagonalize non-hermitean
Hamiltonians, check the intertwining identities and scan reflection and
transmission on the line.
"""
from .numerics import (
    Domain,
    EigensolverError,
    GridSpec,
    OperatorMatrix,
    SampledFunction,
    ScatteringCoefficients,
    build_hamiltonian,
    eigensolve,
    transmission_reflection,
)
from .superpotential import (
    PotentialPair,
    Superpotential,
    ZeroMode,
    apply_q_minus,
    apply_q_plus,
    make_partners,
    zero_mode,
)

__version__ = "0.1.0"

__all__ = [
    "Domain",
    "EigensolverError",
    "GridSpec",
    "OperatorMatrix",
    "PotentialPair",
    "SampledFunction",
    "ScatteringCoefficients",
    "Superpotential",
    "ZeroMode",
    "apply_q_minus",
    "apply_q_plus",
    "build_hamiltonian",
    "eigensolve",
    "make_partners",
    "transmission_reflection",
    "zero_mode",
]
