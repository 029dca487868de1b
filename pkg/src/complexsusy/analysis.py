"""Spectral checks on partner potentials."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .numerics.eigen import eigensolve
from .numerics.fd import derivative_array, trapezoid_array
from .numerics.grid import Domain, GridSpec, SampledFunction
from .numerics.hamiltonian import apply_hamiltonian, build_hamiltonian
from .superpotential import (
    SUPERCHARGE_ORDER,
    PotentialPair,
    Superpotential,
    apply_q_minus,
    apply_q_plus,
    interior_norm,
    zero_mode,
)

EDGE_RATIO = 1e-4
DEFAULT_TOLE = 1e-3
DISSIPATIVE_SLACK = 1e-12
ZERO_MODE_TOL = 1e-2


class BoundaryTermWarning(UserWarning):
    """The wavefunction has not decayed at the grid ends."""


def _edge_slices(grid: GridSpec) -> list[slice]:
    m = grid.edge_count()
    if grid.domain is Domain.LINE:
        return [slice(0, m), slice(grid.points - m, grid.points)]
    return [slice(grid.points - m, grid.points)]


def continuum_threshold(V: SampledFunction) -> float:
    """Smallest mean of Re V over the outer 5% of nodes at each decaying end."""
    return float(min(V.real[s].mean() for s in _edge_slices(V.grid)))


def edge_amplitude(psi: SampledFunction) -> float:
    """Largest ``|psi|`` over the outer 5% at the decaying ends, relative to its peak."""
    a = np.abs(psi.values)
    peak = a.max()
    if peak == 0:
        return 0.0
    return float(max(a[s].max() for s in _edge_slices(psi.grid)) / peak)


@dataclass(frozen=True, eq=False)
class SpectrumEntry:
    E: complex
    psi: SampledFunction = field(repr=False)
    bound: bool


@dataclass(frozen=True, eq=False)
class Spectrum:
    entries: list[SpectrumEntry]
    continuum_threshold: float

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i) -> SpectrumEntry:
        return self.entries[i]

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.E for e in self.entries], dtype=complex)

    @property
    def bound(self) -> list[SpectrumEntry]:
        return [e for e in self.entries if e.bound]

    @property
    def bound_energies(self) -> np.ndarray:
        return np.array([e.E for e in self.bound], dtype=complex)

    def to_dict(self, include_psi: bool = False) -> dict:
        out = []
        for e in self.entries:
            d = {"E": {"re": e.E.real, "im": e.E.imag}, "bound": e.bound}
            if include_psi:
                d["psi_re"] = e.psi.real.tolist()
                d["psi_im"] = e.psi.imag.tolist()
            out.append(d)
        return {"continuum_threshold": self.continuum_threshold, "entries": out}


def spectrum(V: SampledFunction, grid: GridSpec | None = None, count: int = 8) -> Spectrum:
    """Lowest ``count`` levels of ``-d^2 + V`` (Dirichlet ends) with bound flags.

    A level is bound when ``Re E`` lies below :func:`continuum_threshold` and
    its eigenfunction has fallen below ``1e-4`` of its peak over the outer 5%
    of nodes at every decaying end (only the far end on the half-line).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if grid is not None and grid != V.grid:
        raise ValueError("potential is not sampled on the given grid")
    thr = continuum_threshold(V)
    pairs = eigensolve(build_hamiltonian(V), min(count, V.grid.points))
    entries = [SpectrumEntry(complex(E), psi, bool(E.real < thr and edge_amplitude(psi) < EDGE_RATIO)) for E, psi in pairs]
    return Spectrum(entries, thr)


def no_bound_state_check(V: SampledFunction, grid: GridSpec | None = None, count: int = 8) -> bool:
    """True iff none of the lowest ``count`` levels is bound (a windowed statement)."""
    return not spectrum(V, grid, count).bound


# ---------------------------------------------------------------- isospectrality

@dataclass(frozen=True)
class MatchedLevel:
    i0: int
    i1: int
    E0: complex
    E1: complex

    @property
    def dE(self) -> float:
        return abs(self.E0 - self.E1)


@dataclass(frozen=True)
class Level:
    side: int  # 0 for the first spectrum, 1 for the second
    index: int
    E: complex


@dataclass(frozen=True)
class ZeroModeException:
    side: int
    index: int
    E: complex
    which: str  # supercharge whose kernel the level is


@dataclass(frozen=True, eq=False)
class IsospectralReport:
    matched: list[MatchedLevel]
    unmatched: list[Level]
    zero_mode_exceptions: list[ZeroModeException]
    beyond_window: list[Level]
    ambiguous: list[Level]
    zero_mode_normalizable: dict[str, bool] | None
    tolE: float

    @property
    def max_dE(self) -> float:
        return max((m.dE for m in self.matched), default=0.0)

    @property
    def isospectral(self) -> bool:
        """No bound level left without a partner or a zero-mode explanation."""
        return not self.unmatched

    def to_dict(self) -> dict:
        c = lambda z: {"re": z.real, "im": z.imag}
        lv = lambda L: {"side": L.side, "index": L.index, "E": c(L.E)}
        return {
            "tolE": self.tolE,
            "matched": [{"i0": m.i0, "i1": m.i1, "E0": c(m.E0), "E1": c(m.E1), "dE": m.dE} for m in self.matched],
            "unmatched": [lv(L) for L in self.unmatched],
            "zero_mode_exceptions": [lv(z) | {"which": z.which} for z in self.zero_mode_exceptions],
            "beyond_window": [lv(L) for L in self.beyond_window],
            "ambiguous": [lv(L) for L in self.ambiguous],
            "zero_mode_normalizable": self.zero_mode_normalizable,
            "max_dE": self.max_dE,
        }


def compare_spectra(S0: Spectrum, S1: Spectrum, tolE: float = DEFAULT_TOLE, W: Superpotential | None = None) -> IsospectralReport:
    """Greedy nearest matching of bound levels of two partner spectra.

    Bound levels may pair with any computed level of the other spectrum, so a
    partner that narrowly misses the bound criterion still counts. A bound
    level above the highest computed level of the other side is reported as
    beyond the window. With ``W`` given, an unmatched level at ``E = eps``
    becomes a zero-mode exception when the corresponding kernel (``q-`` for
    the first spectrum, ``q+`` for the second) is normalizable; both flags are
    reported either way.
    """
    E = (S0.energies, S1.energies)
    b = ([e.bound for e in S0], [e.bound for e in S1])
    cand = []
    for i, e0 in enumerate(E[0]):
        for j, e1 in enumerate(E[1]):
            d = abs(e0 - e1)
            if d <= tolE and (b[0][i] or b[1][j]):
                cand.append((d, i, j))
    cand.sort()
    used = (set(), set())
    matched = []
    for d, i, j in cand:
        if i in used[0] or j in used[1]:
            continue
        used[0].add(i)
        used[1].add(j)
        matched.append(MatchedLevel(i, j, complex(E[0][i]), complex(E[1][j])))
    matched.sort(key=lambda m: m.i0)

    ambiguous = []
    for side in (0, 1):
        other = E[1 - side]
        for i, e in enumerate(E[side]):
            if b[side][i] and np.count_nonzero(np.abs(other - e) <= tolE) > 1:
                ambiguous.append(Level(side, i, complex(e)))

    flags = None
    kernel = {0: "q_minus", 1: "q_plus"}
    if W is not None:
        flags = {w: zero_mode(W, w).normalizable for w in ("q_plus", "q_minus")}
    unmatched, zeros, beyond = [], [], []
    for side in (0, 1):
        top = E[1 - side].real.max() if len(E[1 - side]) else -np.inf
        for i, e in enumerate(E[side]):
            if not b[side][i] or i in used[side]:
                continue
            lvl = Level(side, i, complex(e))
            if W is not None and flags[kernel[side]] and abs(e - W.eps) <= tolE:
                zeros.append(ZeroModeException(side, i, complex(e), kernel[side]))
            elif e.real > top:
                beyond.append(lvl)
            else:
                unmatched.append(lvl)
    return IsospectralReport(matched, unmatched, zeros, beyond, ambiguous, flags, tolE)


def mapping_residual(
    pair: PotentialPair, E: complex, psi: SampledFunction, direction: str = "q_plus", zero_tol: float = ZERO_MODE_TOL
) -> float:
    """Relative eigen-residual of a level carried to the partner.

    ``q_plus`` maps an H1 eigenfunction into H0, ``q_minus`` maps H0 into H1.
    Returns ``||(H - E) phi|| / ||phi||`` on interior nodes, or ``inf`` when
    ``||phi|| <= zero_tol ||psi||`` (a zero mode: ``||q psi||^2`` is about
    ``|E - eps| ||psi||^2``, so the default catches ``|E - eps| < 1e-4``).
    """
    W = pair.source
    if W is None:
        raise ValueError("mapping needs the superpotential")
    if direction == "q_plus":
        phi, V = apply_q_plus(W, psi), pair.V0
    elif direction == "q_minus":
        phi, V = apply_q_minus(W, psi), pair.V1
    else:
        raise ValueError(f"direction must be 'q_plus' or 'q_minus', got {direction!r}")
    h = psi.grid.spacing
    nphi = interior_norm(phi.values, h)
    if nphi <= zero_tol * interior_norm(psi.values, h):
        return float("inf")
    r = apply_hamiltonian(V, phi, SUPERCHARGE_ORDER) - E * phi.values
    return interior_norm(r, h) / nphi


# ---------------------------------------------------------------- imaginary part of E

def im_energy_functional(g: SampledFunction, psi: SampledFunction, g_prime=None, end_tol: float = EDGE_RATIO) -> float:
    """``int 2 g' |psi|^2 / int |psi|^2``.

    Equals ``Im E`` for eigenstates of a partner whose imaginary part is
    ``2 g'``, provided the boundary terms vanish; a :class:`BoundaryTermWarning`
    is issued when ``|psi|`` at an open grid end exceeds ``end_tol`` (relative
    to its peak).
    """
    if g.grid != psi.grid:
        raise ValueError("g and psi live on different grids")
    h = psi.grid.spacing
    gp = derivative_array(g.real, h, SUPERCHARGE_ORDER) if g_prime is None else np.asarray(g_prime, dtype=float)
    a = np.abs(psi.values)
    # the origin of the half-line is a Dirichlet wall, so only the far end counts there
    ends = a[-1] if psi.grid.domain is Domain.HALF_LINE else max(a[0], a[-1])
    if a.max() > 0 and ends > end_tol * a.max():
        warnings.warn("wavefunction has not decayed at the grid ends; boundary terms are not negligible",
                      BoundaryTermWarning, stacklevel=2)
    rho = a * a
    return float(trapezoid_array(2 * gp * rho, h).real / trapezoid_array(rho, h).real)


# ---------------------------------------------------------------- symmetry and sign checks

def pt_symmetry_check(V: SampledFunction, center: float = 0.0) -> float:
    """``max |conj(V(2 center - x)) - V(x)|`` over nodes whose mirror lies on the grid.

    Uses the samples directly when the mirror points coincide with nodes and a
    cubic spline otherwise.
    """
    x = V.x
    h = V.grid.spacing
    xm = 2 * center - x
    j = (xm - x[0]) / h
    ji = np.rint(j)
    inside = (ji >= 0) & (ji <= len(x) - 1)
    if np.all(np.abs(j - ji) < 1e-6):
        idx = ji[inside].astype(int)
        mirrored = V.values[idx]
        own = V.values[inside]
    else:
        inside = (xm >= x[0]) & (xm <= x[-1])
        re = CubicSpline(x, V.real)(xm[inside])
        im = CubicSpline(x, V.imag)(xm[inside])
        mirrored = re + 1j * im
        own = V.values[inside]
    if not np.any(inside):
        raise ValueError("no node has its mirror image on the grid")
    return float(np.abs(np.conj(mirrored) - own).max())


@dataclass(frozen=True)
class DissipativityResult:
    dissipative: bool
    margin: float  # max over nodes of Im V


def dissipativity_check(pair: PotentialPair | SampledFunction, which: str = "V1") -> DissipativityResult:
    """``Im V <= 0`` everywhere (up to ``1e-12``) for the chosen partner."""
    if isinstance(pair, SampledFunction):
        UI = pair.imag
    elif which in ("V0", "0", 0):
        UI = pair.U0_I
    elif which in ("V1", "1", 1):
        UI = pair.U1_I
    else:
        raise ValueError(f"which must be 'V0' or 'V1', got {which!r}")
    margin = float(UI.max())
    return DissipativityResult(margin <= DISSIPATIVE_SLACK, margin)


# ---------------------------------------------------------------- centrifugal barrier

@dataclass(frozen=True)
class CentrifugalFit:
    c: float
    c0: float
    l_est: float
    residual: float
    reliable: bool


def centrifugal_index(V: SampledFunction, window: tuple[int, int] = (1, 10), max_residual: float = 0.1) -> CentrifugalFit:
    """Fit ``Re V ~ c/r^2 + c0`` over ``r`` in ``[window[0] h, window[1] h]``.

    ``l_est`` is the larger root of ``l (l + 1) = c``. The fit is flagged
    unreliable when its relative residual exceeds ``max_residual`` or when
    ``c < -1/4`` (no real root).
    """
    if V.grid.domain is not Domain.HALF_LINE:
        raise ValueError("centrifugal_index needs a half-line grid")
    lo, hi = window
    sel = slice(lo - 1, hi)
    r = V.x[sel]
    y = V.real[sel]
    A = np.column_stack([1 / r**2, np.ones_like(r)])
    (c, c0), *_ = np.linalg.lstsq(A, y, rcond=None)
    ny = np.linalg.norm(y)
    res = float(np.linalg.norm(A @ np.array([c, c0]) - y) / ny) if ny > 0 else 0.0
    disc = 1 + 4 * c
    l_est = (-1 + np.sqrt(disc)) / 2 if disc >= 0 else -0.5
    return CentrifugalFit(float(c), float(c0), float(l_est), res, bool(res <= max_residual and disc >= 0))
