"""Tridiagonal finite-difference Hamiltonians ``H = -d^2/dx^2 + V``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, SampledFunction


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Complex tridiagonal matrix stored as three bands.

    ``sub[i]`` is entry ``(i+1, i)`` and ``sup[i]`` is entry ``(i, i+1)``.
    """

    diag: np.ndarray = field(repr=False)
    sub: np.ndarray = field(repr=False)
    sup: np.ndarray = field(repr=False)
    grid: GridSpec | None = None

    def __post_init__(self):
        d = np.array(self.diag, dtype=complex)
        lo = np.array(self.sub, dtype=complex)
        up = np.array(self.sup, dtype=complex)
        n = d.shape[0]
        if n < 1 or lo.shape != (n - 1,) or up.shape != (n - 1,):
            raise ValueError("band lengths must be N, N-1, N-1")
        if self.grid is not None and self.grid.points != n:
            raise ValueError("matrix dimension does not match the grid")
        for a in (d, lo, up):
            a.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "sub", lo)
        object.__setattr__(self, "sup", up)

    @property
    def dimension(self) -> int:
        return self.diag.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.sub, self.sup))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        out = self.diag * v
        out[:-1] += self.sup * v[1:]
        out[1:] += self.sub * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sup, 1) + np.diag(self.sub, -1)

    def shifted(self, c: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.diag + c, self.sub, self.sup, self.grid)

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.sup)
        row[1:] += np.abs(self.sub)
        return float(row.max())


def tridiagonal_hamiltonian(potential: np.ndarray, spacing: float) -> OperatorMatrix:
    """3-point discretisation with Dirichlet values just beyond both ends."""
    v = np.asarray(potential, dtype=complex)
    off = np.full(v.shape[0] - 1, -1.0 / spacing**2, dtype=complex)
    return OperatorMatrix(2.0 / spacing**2 + v, off, off)


def build_hamiltonian(V: SampledFunction, grid: GridSpec | None = None) -> OperatorMatrix:
    if grid is not None and grid != V.grid:
        raise ValueError(f"potential sampled on {V.grid}, not on {grid}")
    grid = V.grid
    m = tridiagonal_hamiltonian(V.values, grid.spacing)
    return OperatorMatrix(m.diag, m.sub, m.sup, grid)


def apply_hamiltonian(V: SampledFunction, psi: SampledFunction, order: int = 2) -> np.ndarray:
    """``-psi'' + V psi`` with a finite-difference second derivative of the given order.

    Unlike :func:`build_hamiltonian` no boundary condition is imposed; the end
    nodes use one-sided stencils.
    """
    from .fd import second_derivative_array

    if V.grid != psi.grid:
        raise ValueError("potential and wavefunction live on different grids")
    return -second_derivative_array(psi.values, psi.grid.spacing, order) + V.values * psi.values
