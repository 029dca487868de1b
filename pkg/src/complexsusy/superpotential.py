"""Complex superpotentials ``W = f + i g``, partner potentials and supercharges.

Conventions: ``q+ = -d/dx + W`` and ``q- = d/dx + W``, so that

    H0 = q+ q- + eps,   H1 = q- q+ + eps,   eps = epsR + i epsI,
    V0 = W^2 - W' + eps, V1 = W^2 + W' + eps,

and ``H0 q+ = q+ H1``, ``q- H0 = H1 q-``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .numerics.fd import cumulative_integral_array, derivative_array, l2_norm
from .numerics.grid import GridSpec, SampledFunction, check_same_grid
from .numerics.hamiltonian import apply_hamiltonian

# derivative order used inside the supercharges and the identity checks
SUPERCHARGE_ORDER = 6
# nodes dropped at each end when forming residual norms
TRIM = 2
LOG_CLAMP = 700.0


def _real_array(a, n: int, name: str) -> np.ndarray:
    arr = np.asarray(a)
    if np.iscomplexobj(arr):
        if np.any(arr.imag != 0):
            raise ValueError(f"{name} must be real-valued")
        arr = arr.real
    arr = np.array(arr, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name} needs {n} samples, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite samples")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Superpotential:
    """Sampled ``f = Re W`` and ``g = Im W`` with factorization energy ``epsR + i epsI``.

    ``f_prime``/``g_prime`` hold analytic derivatives when a closed form is
    known; otherwise derivatives are taken numerically.
    """

    grid: GridSpec
    f: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    epsR: float = 0.0
    epsI: float = 0.0
    f_prime: np.ndarray | None = field(default=None, repr=False)
    g_prime: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self):
        n = self.grid.points
        for name in ("f", "g"):
            object.__setattr__(self, name, _real_array(getattr(self, name), n, name))
        for name in ("f_prime", "g_prime"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, _real_array(val, n, name))
        object.__setattr__(self, "epsR", float(self.epsR))
        object.__setattr__(self, "epsI", float(self.epsI))

    @classmethod
    def from_functions(cls, grid, f, g, fp=None, gp=None, epsR=0.0, epsI=0.0, label=""):
        x = grid.nodes
        ev = lambda fn: None if fn is None else np.broadcast_to(fn(x), x.shape)
        return cls(grid, ev(f), ev(g), epsR, epsI, ev(fp), ev(gp), label)

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def W(self) -> np.ndarray:
        return self.f + 1j * self.g

    @property
    def eps(self) -> complex:
        return complex(self.epsR, self.epsI)

    @property
    def has_analytic_derivatives(self) -> bool:
        return self.f_prime is not None and self.g_prime is not None

    def derivatives(self, order: int = SUPERCHARGE_ORDER) -> tuple[np.ndarray, np.ndarray]:
        h = self.grid.spacing
        fp = self.f_prime if self.f_prime is not None else derivative_array(self.f, h, order)
        gp = self.g_prime if self.g_prime is not None else derivative_array(self.g, h, order)
        return fp, gp

    def W_prime(self, order: int = SUPERCHARGE_ORDER) -> np.ndarray:
        fp, gp = self.derivatives(order)
        return fp + 1j * gp

    def to_dict(self) -> dict:
        d = {
            "grid": self.grid.to_dict(),
            "f": self.f.tolist(),
            "g": self.g.tolist(),
            "epsR": self.epsR,
            "epsI": self.epsI,
            "label": self.label,
        }
        if self.f_prime is not None:
            d["f_prime"] = self.f_prime.tolist()
        if self.g_prime is not None:
            d["g_prime"] = self.g_prime.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Superpotential":
        return cls(
            GridSpec.from_dict(d["grid"]),
            d["f"],
            d["g"],
            d["epsR"],
            d["epsI"],
            d.get("f_prime"),
            d.get("g_prime"),
            d.get("label", ""),
        )


@dataclass(frozen=True, eq=False)
class PotentialPair:
    V0: SampledFunction
    V1: SampledFunction
    source: Superpotential | None = None

    def __post_init__(self):
        check_same_grid(self.V0, self.V1)
        if self.source is not None and self.source.grid != self.V0.grid:
            raise ValueError("superpotential and potentials live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.V0.grid

    U0_R = property(lambda self: self.V0.real)
    U0_I = property(lambda self: self.V0.imag)
    U1_R = property(lambda self: self.V1.real)
    U1_I = property(lambda self: self.V1.imag)

    def to_dict(self) -> dict:
        d = {"grid": self.grid.to_dict()}
        if self.source is not None:
            d.update(self.source.to_dict())
        d.update(
            V0_re=self.U0_R.tolist(),
            V0_im=self.U0_I.tolist(),
            V1_re=self.U1_R.tolist(),
            V1_im=self.U1_I.tolist(),
        )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialPair":
        grid = GridSpec.from_dict(d["grid"])
        src = Superpotential.from_dict(d) if "f" in d else None
        V0 = SampledFunction(grid, np.asarray(d["V0_re"]) + 1j * np.asarray(d["V0_im"]))
        V1 = SampledFunction(grid, np.asarray(d["V1_re"]) + 1j * np.asarray(d["V1_im"]))
        return cls(V0, V1, src)


def make_partners(W: Superpotential, order: int = SUPERCHARGE_ORDER) -> PotentialPair:
    f, g = W.f, W.g
    fp, gp = W.derivatives(order)
    base_R = f * f - g * g + W.epsR
    base_I = 2 * f * g + W.epsI
    V0 = (-fp + base_R) + 1j * (-gp + base_I)
    V1 = (fp + base_R) + 1j * (gp + base_I)
    return PotentialPair(SampledFunction(W.grid, V0), SampledFunction(W.grid, V1), W)


def _check(W: Superpotential, psi: SampledFunction) -> None:
    if psi.grid != W.grid:
        raise ValueError("wavefunction and superpotential live on different grids")


def apply_q_plus(W: Superpotential, psi: SampledFunction, order: int = SUPERCHARGE_ORDER) -> SampledFunction:
    """``-psi' + W psi``: maps H1 solutions to H0 solutions at the same energy."""
    _check(W, psi)
    dpsi = derivative_array(psi.values, W.grid.spacing, order)
    return SampledFunction(W.grid, -dpsi + W.W * psi.values)


def apply_q_minus(W: Superpotential, psi: SampledFunction, order: int = SUPERCHARGE_ORDER) -> SampledFunction:
    """``psi' + W psi``: maps H0 solutions to H1 solutions at the same energy."""
    _check(W, psi)
    dpsi = derivative_array(psi.values, W.grid.spacing, order)
    return SampledFunction(W.grid, dpsi + W.W * psi.values)


@dataclass(frozen=True, eq=False)
class ZeroMode:
    which: str
    mode: SampledFunction
    log_values: np.ndarray = field(repr=False)
    normalizable: bool
    overflow: bool

    @property
    def energy_partner(self) -> str:
        """Hamiltonian the zero mode is an eigenfunction of (at ``E = eps``)."""
        return "H1" if self.which == "q_plus" else "H0"


def _end_normalizable(logre: np.ndarray, slope: np.ndarray, idx: slice, peak: float, edge_ratio: float) -> bool:
    # decayed below edge_ratio of the peak, or a tail |psi| ~ |x|^s with s < -1/2
    return bool(logre[idx].max() - peak < np.log(edge_ratio) or slope[idx].max() < -0.5)


def zero_mode(
    W: Superpotential, which: Literal["q_plus", "q_minus"], *, edge_ratio: float = 1e-4
) -> ZeroMode:
    """Kernel of ``q+`` (``exp(+int W)``) or ``q-`` (``exp(-int W)``).

    Scaled to 1 at the leftmost node. ``normalizable`` is judged from the
    logarithm, so it is reliable even when the values had to be clamped
    (``overflow``). Each infinite end must show either decay below
    ``edge_ratio`` of the peak over its outer 5% of nodes, or an algebraic
    tail ``|psi| ~ |x|^s`` with ``s = x Re(+-W) < -1/2`` there (square
    integrable). On the half-line the mode must also be square integrable at
    the origin, ``r Re(+-W) > -1/2`` at the first node.
    """
    if which not in ("q_plus", "q_minus"):
        raise ValueError(f"which must be 'q_plus' or 'q_minus', got {which!r}")
    sign = 1.0 if which == "q_plus" else -1.0
    logv = sign * cumulative_integral_array(W.W, W.grid.spacing, W.W_prime())
    re = logv.real
    x = W.grid.nodes
    slope = x * sign * W.f
    peak = re.max()
    m = W.grid.edge_count()
    n = W.grid.points
    right = _end_normalizable(re, slope, slice(n - m, n), peak, edge_ratio)
    if W.grid.is_line:
        normalizable = right and _end_normalizable(re, slope, slice(0, m), peak, edge_ratio)
    else:
        normalizable = right and bool(slope[0] > -0.5)
    overflow = bool(peak > LOG_CLAMP)
    vals = np.exp(np.minimum(re, LOG_CLAMP) + 1j * logv.imag)
    return ZeroMode(which, SampledFunction(W.grid, vals), logv, normalizable, overflow)


def _interior(values: np.ndarray, trim: int = TRIM) -> np.ndarray:
    return values[trim:-trim] if trim else values


def interior_norm(values: np.ndarray, h: float, trim: int = TRIM) -> float:
    return l2_norm(_interior(values, trim), h)


def potential_scale(pair: PotentialPair, trim: int = TRIM) -> float:
    """``max |V|`` over interior nodes of both partners."""
    return float(max(np.abs(_interior(pair.V0.values, trim)).max(), np.abs(_interior(pair.V1.values, trim)).max()))


def identity_tolerance(pair: PotentialPair, psi: SampledFunction, rtol: float = 1e-6) -> float:
    return rtol * interior_norm(psi.values, psi.grid.spacing) * (1.0 + potential_scale(pair))


def factorization_residuals(pair: PotentialPair, psi: SampledFunction, order: int = SUPERCHARGE_ORDER) -> dict:
    """Interior norms of ``(H0 - q+q- - eps) psi`` and ``(H1 - q-q+ - eps) psi``."""
    W = pair.source
    if W is None:
        raise ValueError("factorization check needs the superpotential")
    h = psi.grid.spacing
    qpm = apply_q_plus(W, apply_q_minus(W, psi, order), order).values
    qmp = apply_q_minus(W, apply_q_plus(W, psi, order), order).values
    r0 = apply_hamiltonian(pair.V0, psi, order) - qpm - W.eps * psi.values
    r1 = apply_hamiltonian(pair.V1, psi, order) - qmp - W.eps * psi.values
    return {"H0": interior_norm(r0, h), "H1": interior_norm(r1, h)}


def intertwining_residuals(pair: PotentialPair, psi: SampledFunction, order: int = SUPERCHARGE_ORDER) -> dict:
    """Interior norms of ``(H0 q+ - q+ H1) psi`` and ``(q- H0 - H1 q-) psi``."""
    W = pair.source
    if W is None:
        raise ValueError("intertwining check needs the superpotential")
    h = psi.grid.spacing
    H = lambda V, u: SampledFunction(u.grid, apply_hamiltonian(V, u, order))
    plus = H(pair.V0, apply_q_plus(W, psi, order)) - apply_q_plus(W, H(pair.V1, psi), order)
    minus = apply_q_minus(W, H(pair.V0, psi), order) - H(pair.V1, apply_q_minus(W, psi, order))
    return {"q_plus": interior_norm(plus.values, h), "q_minus": interior_norm(minus.values, h)}


def commutator_residual(pair: PotentialPair, order: int = SUPERCHARGE_ORDER) -> float:
    """``max |(V1 - V0) - 2 W'|`` over interior nodes."""
    W = pair.source
    if W is None:
        raise ValueError("commutator check needs the superpotential")
    diff = pair.V1.values - pair.V0.values - 2 * W.W_prime(order)
    return float(np.abs(_interior(diff)).max())


def random_smooth_function(grid: GridSpec, rng: np.random.Generator, terms: int = 4) -> SampledFunction:
    """Sum of modulated Gaussians with random complex amplitudes."""
    x = grid.nodes
    lo, hi = (x[0], x[-1])
    span = hi - lo
    out = np.zeros_like(x, dtype=complex)
    for _ in range(terms):
        c = lo + span * rng.uniform(0.25, 0.75)
        w = rng.uniform(0.05, 0.15) * span
        kk = rng.uniform(-2.0, 2.0)
        amp = rng.normal() + 1j * rng.normal()
        out += amp * np.exp(-0.5 * ((x - c) / w) ** 2 + 1j * kk * x)
    return SampledFunction(grid, out)
