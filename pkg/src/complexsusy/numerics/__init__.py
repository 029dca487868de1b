"""Grids, finite differences, tridiagonal eigensolver and 1D scattering."""
from .eigen import EigensolverError, eigensolve, tridiagonal_eigenvalues
from .fd import (
    cumulative_integral_array,
    derivative_array,
    differentiate,
    fornberg_weights,
    integrate,
    l2_norm,
    second_derivative,
    second_derivative_array,
    trapezoid_array,
)
from .grid import Domain, GridSpec, SampledFunction, check_same_grid
from .hamiltonian import (
    OperatorMatrix,
    apply_hamiltonian,
    build_hamiltonian,
    tridiagonal_hamiltonian,
)
from .transfer import ScatteringCoefficients, transmission_reflection
