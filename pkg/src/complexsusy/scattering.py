"""Reflection and transmission scans on the line."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .numerics.grid import SampledFunction
from .numerics.transfer import DEFAULT_DECAY_TOL, ScatteringCoefficients, transmission_reflection

DEFAULT_KMIN = 0.3
DEFAULT_KMAX = 3.0
DEFAULT_NK = 12
DEFAULT_THRESHOLD = 1e-3
DEFAULT_GRID = {"L": 30.0, "N": 4000}


def scatter(V: SampledFunction, k: float, *, decay_tol: float = DEFAULT_DECAY_TOL) -> ScatteringCoefficients:
    """``R(k)`` and ``T(k)`` for a wave incident from the left; ``psi -> T e^{ikx}`` on the right."""
    return transmission_reflection(V, k, decay_tol=decay_tol)


@dataclass(frozen=True, eq=False)
class TransparencyReport:
    k: np.ndarray
    R: np.ndarray = field(repr=False)
    T: np.ndarray = field(repr=False)
    threshold: float

    @property
    def abs_R(self) -> np.ndarray:
        return np.abs(self.R)

    @property
    def abs_T(self) -> np.ndarray:
        return np.abs(self.T)

    @property
    def T_deviation(self) -> np.ndarray:
        return np.abs(self.abs_T - 1)

    @property
    def max_R(self) -> float:
        return float(self.abs_R.max())

    @property
    def max_T_deviation(self) -> float:
        return float(self.T_deviation.max())

    @property
    def passed(self) -> bool:
        return self.max_R < self.threshold and self.max_T_deviation < self.threshold

    def rows(self):
        for k, R, T in zip(self.k, self.R, self.T):
            yield float(k), abs(R), abs(T), float(np.angle(T))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "abs_R", "abs_T", "arg_T"])
        for row in self.rows():
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "passed": self.passed,
            "max_abs_R": self.max_R,
            "max_abs_T_minus_1": self.max_T_deviation,
            "k": self.k.tolist(),
            "R": [{"re": z.real, "im": z.imag} for z in self.R],
            "T": [{"re": z.real, "im": z.imag} for z in self.T],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def transparency_scan(
    V: SampledFunction,
    kmin: float = DEFAULT_KMIN,
    kmax: float = DEFAULT_KMAX,
    nk: int = DEFAULT_NK,
    threshold: float = DEFAULT_THRESHOLD,
    *,
    decay_tol: float = DEFAULT_DECAY_TOL,
    jobs: int = 1,
) -> TransparencyReport:
    """``R``, ``T`` at ``nk`` log-spaced wavenumbers in ``[kmin, kmax]``."""
    if not 0 < kmin < kmax:
        raise ValueError("need 0 < kmin < kmax")
    if nk < 1:
        raise ValueError("nk must be >= 1")
    ks = np.geomspace(kmin, kmax, nk) if nk > 1 else np.array([kmin])
    run = lambda k: scatter(V, k, decay_tol=decay_tol)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            res = list(ex.map(run, ks))
    else:
        res = [run(k) for k in ks]
    return TransparencyReport(ks, np.array([r.R for r in res]), np.array([r.T for r in res]), threshold)


def decay_window(V: SampledFunction, flat: float = 0.5, end: float = 0.95) -> SampledFunction:
    """Taper a non-decaying potential smoothly to zero near the grid ends.

    ``V`` is kept for ``|x| < flat L`` and multiplied by a tanh step that has
    fallen to about ``1e-7`` at ``|x| = end L``. The switch-on is slow compared
    with the local wavelength, so it adds almost no reflection of its own.
    """
    x = V.x
    L = max(abs(x[0]), abs(x[-1]))
    x0 = flat * L
    s = (end * L - x0) / 8
    w = 0.5 * (1 - np.tanh((np.abs(x) - x0) / s))
    return SampledFunction(V.grid, V.values * w)


def square_well_amplitudes(depth: float, width: float, k: float) -> tuple[complex, complex]:
    """``(R, T)`` of ``V = depth`` on ``|x| < width/2`` in the convention of :func:`scatter`.

    Textbook matching for a well centred at the origin, with the incident
    wave ``e^{ikx}`` normalized at the origin.
    """
    a = width / 2
    q = np.sqrt(complex(k * k - depth))
    den = 2 * k * q * np.cos(2 * q * a) - 1j * (k * k + q * q) * np.sin(2 * q * a)
    T = 2 * k * q * np.exp(-2j * k * a) / den
    R = 1j * (q * q - k * k) * np.sin(2 * q * a) * np.exp(-2j * k * a) / den
    return complex(R), complex(T)
