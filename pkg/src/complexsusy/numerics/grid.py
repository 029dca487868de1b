"""Uniform grids on the line and the half-line, and functions sampled on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable

import numpy as np

MIN_POINTS = 16


class Domain(str, Enum):
    LINE = "line"
    HALF_LINE = "half_line"


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid.

    On the line the nodes are ``linspace(-L, L, N)``; on the half-line they are
    ``r_i = i*h`` for ``i = 1..N`` with ``h = L/N`` so that the singular origin is
    never a node.
    """

    domain: Domain
    extent: float
    points: int

    def __post_init__(self):
        object.__setattr__(self, "domain", Domain(self.domain))
        if not np.isfinite(self.extent) or self.extent <= 0:
            raise ValueError(f"grid extent must be positive, got {self.extent!r}")
        if int(self.points) != self.points or self.points < MIN_POINTS:
            raise ValueError(f"grid needs an integer N >= {MIN_POINTS}, got {self.points!r}")
        object.__setattr__(self, "points", int(self.points))
        object.__setattr__(self, "extent", float(self.extent))

    @classmethod
    def line(cls, extent: float, points: int) -> "GridSpec":
        return cls(Domain.LINE, extent, points)

    @classmethod
    def half_line(cls, extent: float, points: int) -> "GridSpec":
        return cls(Domain.HALF_LINE, extent, points)

    @property
    def is_line(self) -> bool:
        return self.domain is Domain.LINE

    @property
    def spacing(self) -> float:
        if self.is_line:
            return 2.0 * self.extent / (self.points - 1)
        return self.extent / self.points

    @cached_property
    def nodes(self) -> np.ndarray:
        if self.is_line:
            # half-integer offsets keep the nodes exactly antisymmetric about 0
            x = self.spacing * (np.arange(self.points) - 0.5 * (self.points - 1))
        else:
            x = self.spacing * np.arange(1, self.points + 1)
        x.setflags(write=False)
        return x

    def edge_count(self, fraction: float = 0.05) -> int:
        """Number of nodes making up the outer ``fraction`` at one end (at least 2)."""
        return max(2, int(round(fraction * self.points)))

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "SampledFunction":
        return SampledFunction(self, fn(self.nodes))

    def to_dict(self) -> dict:
        return {"domain": self.domain.value, "L": self.extent, "N": self.points}

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        return cls(Domain(data["domain"]), float(data["L"]), int(data["N"]))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples of a function, one per grid node."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 1 or v.shape[0] != self.grid.points:
            raise ValueError(
                f"expected {self.grid.points} samples for this grid, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag

    def __len__(self) -> int:
        return self.values.shape[0]

    def _other(self, other) -> np.ndarray | complex:
        if isinstance(other, SampledFunction):
            if other.grid != self.grid:
                raise ValueError("sampled functions live on different grids")
            return other.values
        return other

    def __add__(self, other) -> "SampledFunction":
        return SampledFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other) -> "SampledFunction":
        return SampledFunction(self.grid, self.values - self._other(other))

    def __mul__(self, other) -> "SampledFunction":
        return SampledFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self) -> "SampledFunction":
        return SampledFunction(self.grid, -self.values)

    def conj(self) -> "SampledFunction":
        return SampledFunction(self.grid, self.values.conj())


def check_same_grid(*funcs: SampledFunction) -> GridSpec:
    grid = funcs[0].grid
    for u in funcs[1:]:
        if u.grid != grid:
            raise ValueError(f"grid mismatch: {u.grid} vs {grid}")
    return grid
