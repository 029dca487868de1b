"""Closed-form superpotential families.

Every constructor samples ``f``, ``g`` and their analytic derivatives, builds
the pair through :func:`make_partners`, and where an independent closed form
for the potentials exists it is cross-checked against that pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .numerics.grid import Domain, GridSpec, SampledFunction
from .superpotential import PotentialPair, Superpotential, make_partners

CROSS_CHECK_RTOL = 1e-8
RHO_SINGULAR_TOL = 1e-6


class FamilyError(ValueError):
    """Invalid family parameters (names the offending parameter)."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _require_line(grid: GridSpec, name: str) -> None:
    if grid.domain is not Domain.LINE:
        raise FamilyError("domain", f"{name} lives on the line")


def _cross_check(pair: PotentialPair, V0, V1, name: str) -> None:
    for got, want, tag in ((pair.V0.values, V0, "V0"), (pair.V1.values, V1, "V1")):
        want = np.broadcast_to(want, got.shape)
        err = np.abs(got - want) / (1.0 + np.abs(want))
        if err.max() > CROSS_CHECK_RTOL:
            i = int(err.argmax())
            raise RuntimeError(f"{name}: {tag} closed form disagrees at node {i} (rel {err[i]:.2e})")


def _ipow(x, p: int):
    """``x**p`` for integer ``p`` with exact parity under ``x -> -x``."""
    x = np.asarray(x, dtype=float)
    out = np.abs(x) ** p
    return np.where(x < 0, -out, out) if p % 2 else out


# overflow-safe hyperbolic helpers for complex arguments
def _sech(z):
    z = np.asarray(z, dtype=complex)
    s = np.where(z.real >= 0, 1.0, -1.0)
    e = np.exp(-2 * s * z)
    return 2 * np.exp(-s * z) / (1 + e)


def _tanh(z):
    z = np.asarray(z, dtype=complex)
    s = np.where(z.real >= 0, 1.0, -1.0)
    e = np.exp(-2 * s * z)
    return s * (1 - e) / (1 + e)


# ---------------------------------------------------------------- transparent

def zero_energy_profile(x, a: float, b: float = 0.0):
    """``g = a / (1 + a^2 (x + b)^2)``, the zero-energy transparent profile."""
    y = np.asarray(x, dtype=float) + b
    return a / (1 + (a * y) ** 2)


def negative_energy_profile(x, epsR: float, a: float, b: float = 0.0, sign: int = 1):
    """``g = +-2 epsR / (a - sqrt(a^2 - 4 epsR) cosh(2 kappa (x + b)))`` for ``epsR < 0``.

    Written with ``1/cosh`` so it stays finite far from ``x = -b``.
    """
    if epsR >= 0:
        raise FamilyError("epsR", "must be negative")
    kappa = math.sqrt(-epsR)
    r = math.sqrt(a * a - 4 * epsR)
    u = 2 * kappa * (np.asarray(x, dtype=float) + b)
    c = 1 / np.cosh(np.minimum(np.abs(u), 700.0))
    return sign * 2 * epsR * c / (a * c - r)


def rho_from_a(epsR: float, a: float, sign: int = 1) -> float:
    """Complex shift ``rho`` of the tanh form equivalent to parameter ``a``."""
    kappa = math.sqrt(-epsR)
    return sign * 0.5 * math.atan2(-2 * kappa, -a)


def _check_rho(rho: float) -> None:
    d = (rho - math.pi / 2) % math.pi
    if min(d, math.pi - d) < RHO_SINGULAR_TOL:
        raise FamilyError("rho", "odd multiples of pi/2 give a singular potential")


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise FamilyError("sign", "must be +1 or -1")
    return int(sign)


def transparent_zero_energy(a: float, b: float, grid: GridSpec):
    """``W = -1/(x + b + i/a)``: ``V0 = 0`` and ``V1 = 2/(x + b + i/a)^2``."""
    _require_line(grid, "transparent_zero_energy")
    if a == 0:
        raise FamilyError("a", "must be nonzero")
    y = grid.nodes + b
    d = 1 + (a * y) ** 2
    g = a / d
    f = -(a * a) * y / d
    gp = -2 * a**3 * y / d**2
    fp = -(a * a) * (1 - (a * y) ** 2) / d**2
    W = Superpotential(grid, f, g, 0.0, 0.0, fp, gp, label=f"transparent_zero_energy(a={a}, b={b})")
    pair = make_partners(W)
    _cross_check(pair, 0.0, 2 / (y + 1j / a) ** 2, "transparent_zero_energy")
    return W, pair


def zero_energy_bound_state(a: float, b: float, grid: GridSpec):
    """Normalized ``1/(x + b + i/a)``, the ``E = 0`` bound state of ``V1``."""
    psi = 1 / (grid.nodes + b + 1j / a)
    return 0j, _normalized(grid, psi)


def transparent_negative_energy(
    epsR: float, grid: GridSpec, *, rho: float | None = None, a: float | None = None, b: float = 0.0, sign: int = 1
):
    """``W = -kappa tanh(kappa (x + b) + i rho)`` with ``kappa = sqrt(-epsR)``.

    Give either ``rho`` directly or the profile constant ``a`` with a branch
    ``sign``; the latter is converted with :func:`rho_from_a`.
    """
    _require_line(grid, "transparent_negative_energy")
    if not epsR < 0:
        raise FamilyError("epsR", "must be negative")
    if (rho is None) == (a is None):
        raise FamilyError("rho", "give exactly one of rho or a")
    if a is not None:
        if a == 0:
            raise FamilyError("a", "must be nonzero")
        rho = rho_from_a(epsR, a, _check_sign(sign))
    _check_rho(rho)
    kappa = math.sqrt(-epsR)
    z = kappa * (grid.nodes + b) + 1j * rho
    th = _tanh(z)
    s2 = _sech(z) ** 2
    Wv = -kappa * th
    Wp = -(kappa**2) * s2
    W = Superpotential(
        grid, Wv.real, Wv.imag, epsR, 0.0, Wp.real, Wp.imag,
        label=f"transparent_negative_energy(epsR={epsR}, rho={rho}, b={b})",
    )
    pair = make_partners(W)
    _cross_check(pair, 0.0, 2 * epsR * s2, "transparent_negative_energy")
    return W, pair


def negative_energy_bound_state(epsR: float, rho: float, b: float, grid: GridSpec):
    """Normalized ``1/cosh(kappa (x + b) + i rho)`` at ``E = epsR``."""
    kappa = math.sqrt(-epsR)
    psi = _sech(kappa * (grid.nodes + b) + 1j * rho)
    return complex(epsR), _normalized(grid, psi)


def transparent_positive_energy(epsR: float, a: float, b: float, grid: GridSpec):
    """Oscillatory variant: ``g = 2 epsR / (a - sqrt(a^2 - 4 epsR) cos(2 sqrt(epsR) (x + b)))``.

    ``V0 = 0`` and ``V1 = 2 W'`` is periodic, so it does not decay.
    """
    _require_line(grid, "transparent_positive_energy")
    if not epsR > 0:
        raise FamilyError("epsR", "must be positive")
    if a == 0:
        raise FamilyError("a", "must be nonzero")
    rad = a * a - 4 * epsR
    if rad < 0:
        raise FamilyError("a", f"a^2 - 4 epsR = {rad:.3g} < 0 gives a complex profile")
    r = math.sqrt(rad)
    w = 2 * math.sqrt(epsR)
    t = w * (grid.nodes + b)
    D = a - r * np.cos(t)
    bad = np.flatnonzero(np.abs(D) < 1e-12 * (abs(a) + r))
    if bad.size:
        raise FamilyError("a", f"profile denominator vanishes at node {bad[0]}")
    Dp = r * w * np.sin(t)
    Dpp = r * w * w * np.cos(t)
    g = 2 * epsR / D
    gp = -2 * epsR * Dp / D**2
    f = -Dp / (2 * D)
    fp = -(Dpp * D - Dp**2) / (2 * D**2)
    W = Superpotential(grid, f, g, epsR, 0.0, fp, gp, label=f"transparent_positive_energy(epsR={epsR}, a={a}, b={b})")
    pair = make_partners(W)
    _cross_check(pair, 0.0, 2 * (fp + 1j * gp), "transparent_positive_energy")
    return W, pair


# ---------------------------------------------------------------- radial

class RadialBranch(str, Enum):
    PHYSICAL = "physical"  # f ~ -(l0+1)/r
    UNPHYSICAL = "unphysical"  # f ~ l0/r


class Envelope(str, Enum):
    RATIONAL = "rational"  # 1 / (r^{2m} + 1)
    EXPONENTIAL = "exponential"  # exp(-alpha r)


@dataclass(frozen=True)
class RadialQuasiComplexParams:
    l0: int = 0
    epsI: float = 3.0
    epsR: float = 0.0
    branch: RadialBranch = RadialBranch.PHYSICAL
    envelope: Envelope = Envelope.RATIONAL
    m: int = 1
    alpha: float = 1.0
    mu: float | None = None  # amplitude of the epsI = 0 branch, g = mu r^{2 l0} phi

    def __post_init__(self):
        object.__setattr__(self, "branch", RadialBranch(self.branch))
        object.__setattr__(self, "envelope", Envelope(self.envelope))
        if int(self.l0) != self.l0 or self.l0 < 0:
            raise FamilyError("l0", "must be a nonnegative integer")
        object.__setattr__(self, "l0", int(self.l0))
        if self.envelope is Envelope.RATIONAL and (int(self.m) != self.m or self.m < 1):
            raise FamilyError("m", "must be an integer >= 1")
        if self.envelope is Envelope.EXPONENTIAL and not self.alpha > 0:
            raise FamilyError("alpha", "must be positive")
        if self.epsI == 0:
            if self.mu is None or self.mu == 0:
                raise FamilyError("mu", "epsI = 0 needs a nonzero amplitude mu")
        elif self.branch is RadialBranch.UNPHYSICAL and self.l0 == 0:
            raise FamilyError("l0", "unphysical branch needs l0 >= 1 when epsI != 0")

    @property
    def a(self) -> float:
        if self.epsI == 0:
            return 0.0
        if self.branch is RadialBranch.PHYSICAL:
            return self.epsI / (2 * self.l0 + 3)
        return -self.epsI / (2 * self.l0 - 1)


def _envelope(p: RadialQuasiComplexParams, r):
    if p.envelope is Envelope.RATIONAL:
        m = p.m
        phi = 1 / (r ** (2 * m) + 1)
        d1 = -2 * m * r ** (2 * m - 1) * phi**2
        d2 = -2 * m * (2 * m - 1) * r ** (2 * m - 2) * phi**2 + 8 * m * m * r ** (4 * m - 2) * phi**3
        return phi, d1, d2
    phi = np.exp(-p.alpha * r)
    return phi, -p.alpha * phi, p.alpha**2 * phi


def quasi_complex_radial(p: RadialQuasiComplexParams, grid: GridSpec):
    """Half-line family with real ``V0``: ``f = (g' - epsI) / (2 g)``.

    ``g = a r phi(r)`` on the linear branches, ``g = mu r^{2 l0} phi(r)`` when
    ``epsI = 0``; ``phi`` is the chosen envelope.
    """
    if grid.domain is not Domain.HALF_LINE:
        raise FamilyError("domain", "quasi_complex_radial lives on the half-line")
    r = grid.nodes
    if p.epsI == 0:
        c, pw = p.mu, 2 * p.l0
    else:
        c, pw = p.a, 1
    phi, d1, d2 = _envelope(p, r)
    rp = r**pw
    rp1 = pw * r ** (pw - 1) if pw else 0.0
    rp2 = pw * (pw - 1) * r ** (pw - 2) if pw > 1 else 0.0
    g = c * rp * phi
    gp = c * (rp1 * phi + rp * d1)
    gpp = c * (rp2 * phi + 2 * rp1 * d1 + rp * d2)
    bad = np.flatnonzero(~(np.abs(g) > 0))
    if bad.size:
        raise FamilyError("grid", f"g vanishes at node {bad[0]} (r = {r[bad[0]]:.6g})")
    with np.errstate(over="ignore", invalid="ignore"):
        f = (gp - p.epsI) / (2 * g)
        fp = gpp / (2 * g) - (gp - p.epsI) * gp / (2 * g * g)
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(fp)) and np.all(np.isfinite(f * f))):
        i = int(np.flatnonzero(~np.isfinite(fp * f * f))[0])
        raise FamilyError("grid", f"f overflows at node {i}; shorten the grid")
    W = Superpotential(grid, f, g, p.epsR, p.epsI, fp, gp, label=f"quasi_complex_radial({p})")
    return W, make_partners(W)


# ---------------------------------------------------------------- tanh / gaussian

@dataclass(frozen=True)
class TanhModelParams:
    alpha: float = 2.0
    beta: float = 1.0
    epsR: float = 0.0

    def __post_init__(self):
        if self.alpha == 0:
            raise FamilyError("alpha", "must be nonzero")
        if self.beta == 0:
            raise FamilyError("beta", "must be nonzero")

    @property
    def epsI(self) -> float:
        return self.alpha * self.beta

    @property
    def dissipative(self) -> bool:
        return self.alpha * self.beta < 0


def tanh_closed_form(p: TanhModelParams, x):
    """``(V0, V1)`` of the tanh model in closed form."""
    al, be = p.alpha, p.beta
    s2 = 1 / np.cosh(np.minimum(np.abs(al * np.asarray(x, dtype=float)), 700.0)) ** 2
    base = p.epsR + al * al / 4 - be * be
    V0 = base + (al * al / 4 + be * be) * s2 + 0j
    V1 = base + (be * be - 0.75 * al * al) * s2 + 2j * al * be * s2
    return V0, V1


def tanh_model(p: TanhModelParams, grid: GridSpec):
    """``g = beta tanh(alpha x)``, ``f = -(alpha/2) tanh(alpha x)``, ``epsI = alpha beta``."""
    _require_line(grid, "tanh_model")
    x = grid.nodes
    th = np.tanh(p.alpha * x)
    s2 = 1 / np.cosh(np.minimum(np.abs(p.alpha * x), 700.0)) ** 2
    W = Superpotential(
        grid, -0.5 * p.alpha * th, p.beta * th, p.epsR, p.epsI,
        -0.5 * p.alpha**2 * s2, p.alpha * p.beta * s2,
        label=f"tanh_model(alpha={p.alpha}, beta={p.beta}, epsR={p.epsR})",
    )
    pair = make_partners(W)
    _cross_check(pair, *tanh_closed_form(p, x), "tanh_model")
    return W, pair


@dataclass(frozen=True)
class GaussianModelParams:
    alpha: float = 1.0
    gamma: float = 1.0
    n: int = 1
    epsR: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise FamilyError("alpha", "must be positive")
        if not self.gamma > 0:
            raise FamilyError("gamma", "must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise FamilyError("n", "must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))

    epsI = 0.0


def gaussian_closed_form(p: GaussianModelParams, x):
    al, ga, n = p.alpha, p.gamma, p.n
    x = np.asarray(x, dtype=float)
    e = np.exp(-al * _ipow(x, 2 * n))
    lead = al * al * n * n * _ipow(x, 4 * n - 2) - ga * ga * e * e + p.epsR
    mid = al * n * (2 * n - 1) * _ipow(x, 2 * n - 2)
    V0 = lead + mid + 0j
    V1 = lead - mid - 4j * al * ga * n * _ipow(x, 2 * n - 1) * e
    return V0, V1


def gaussian_model(p: GaussianModelParams, grid: GridSpec):
    """``g = gamma exp(-alpha x^{2n})``, ``f = -alpha n x^{2n-1}``, ``epsI = 0``."""
    _require_line(grid, "gaussian_model")
    x = grid.nodes
    n, al = p.n, p.alpha
    odd = _ipow(x, 2 * n - 1)
    g = p.gamma * np.exp(-al * _ipow(x, 2 * n))
    f = -al * n * odd
    W = Superpotential(
        grid, f, g, p.epsR, 0.0,
        -al * n * (2 * n - 1) * _ipow(x, 2 * n - 2), g * (-2 * al * n * odd),
        label=f"gaussian_model(alpha={al}, gamma={p.gamma}, n={n}, epsR={p.epsR})",
    )
    pair = make_partners(W)
    _cross_check(pair, *gaussian_closed_form(p, x), "gaussian_model")
    return W, pair


# ---------------------------------------------------------------- constant parts

def _sample_pair(grid, fn, dfn, name):
    x = grid.nodes
    if callable(fn):
        if dfn is None:
            raise FamilyError(name, "an analytic derivative must accompany the function")
        return np.broadcast_to(fn(x), x.shape).astype(float), np.broadcast_to(dfn(x), x.shape).astype(float)
    v = np.broadcast_to(np.asarray(fn, dtype=float), x.shape)
    dv = np.zeros_like(v) if np.ndim(fn) == 0 else np.broadcast_to(np.asarray(dfn, dtype=float), x.shape)
    return v, dv


def constant_g(kappa: float, f: Callable | float, fp: Callable | None, epsR: float, epsI: float, grid: GridSpec):
    """``g = kappa``: shared ``U_I = 2 kappa f + epsI``, ``U_R = -+f' + f^2 + epsR - kappa^2``."""
    _require_line(grid, "constant_g")
    fv, fpv = _sample_pair(grid, f, fp, "f")
    W = Superpotential(grid, fv, np.full_like(fv, kappa), epsR, epsI, fpv, np.zeros_like(fv), label=f"constant_g(kappa={kappa})")
    pair = make_partners(W)
    UR = fv * fv + epsR - kappa**2
    UI = 2 * kappa * fv + epsI
    _cross_check(pair, UR - fpv + 1j * UI, UR + fpv + 1j * UI, "constant_g")
    return pair


def _sech_preset(x):
    s = 1 / np.cosh(x)
    return s, -s * np.tanh(x)


def _cosh_sech_preset(x):
    s2 = 1 / np.cosh(2 * x)
    return 2 * np.cosh(x) * s2 - 1, 2 * s2 * (np.sinh(x) - 2 * np.cosh(x) * np.tanh(2 * x))


def _exp_sech_preset(x):
    g = np.exp(-x) / np.cosh(2 * x)
    return g, -g * (1 + 2 * np.tanh(2 * x))


G_PRESETS = {"sech": _sech_preset, "cosh_sech": _cosh_sech_preset, "exp_sech": _exp_sech_preset}


def constant_f(lam: float, g, epsR: float, epsI: float, grid: GridSpec, gp: Callable | None = None):
    """``f = lam``: shared ``U_R = lam^2 - g^2 + epsR``, ``U_I = -+g' + 2 lam g + epsI``.

    ``g`` is a callable (with ``gp``), a constant, or a preset name from
    :data:`G_PRESETS`.
    """
    _require_line(grid, "constant_f")
    if isinstance(g, str):
        if g not in G_PRESETS:
            raise FamilyError("g", f"unknown preset {g!r}; choose from {sorted(G_PRESETS)}")
        gv, gpv = G_PRESETS[g](grid.nodes)
    else:
        gv, gpv = _sample_pair(grid, g, gp, "g")
    W = Superpotential(grid, np.full_like(gv, lam), gv, epsR, epsI, np.zeros_like(gv), gpv, label=f"constant_f(lambda={lam})")
    pair = make_partners(W)
    UR = lam**2 - gv * gv + epsR
    UI = 2 * lam * gv + epsI
    _cross_check(pair, UR + 1j * (UI - gpv), UR + 1j * (UI + gpv), "constant_f")
    return pair


# ---------------------------------------------------------------- direct potentials

def pt_polynomial(A: float, B: float, m: int, n: int, grid: GridSpec) -> SampledFunction:
    """``V = A x^{2m} + i B x^{2n+1}``."""
    _require_line(grid, "pt_polynomial")
    if not A > 0:
        raise FamilyError("A", "must be positive")
    if int(m) != m or m < 1:
        raise FamilyError("m", "must be an integer >= 1")
    if int(n) != n or n < 0:
        raise FamilyError("n", "must be a nonnegative integer")
    x = grid.nodes
    return SampledFunction(grid, A * _ipow(x, 2 * int(m)) + 1j * B * _ipow(x, 2 * int(n) + 1))


def harmonic(grid: GridSpec, omega: float = 1.0):
    """``W = omega x``: ``V0 = omega^2 x^2 - omega``, ``V1 = omega^2 x^2 + omega``."""
    _require_line(grid, "harmonic")
    if not omega > 0:
        raise FamilyError("omega", "must be positive")
    x = grid.nodes
    W = Superpotential(grid, omega * x, np.zeros_like(x), 0.0, 0.0, np.full_like(x, omega), np.zeros_like(x),
                       label=f"harmonic(omega={omega})")
    pair = make_partners(W)
    _cross_check(pair, omega**2 * x * x - omega, omega**2 * x * x + omega, "harmonic")
    return W, pair


def square_well(depth: float, width: float, grid: GridSpec, center: float = 0.0) -> SampledFunction:
    """``V = depth`` for ``|x - center| < width/2``, else 0."""
    if not width > 0:
        raise FamilyError("width", "must be positive")
    x = grid.nodes
    return SampledFunction(grid, np.where(np.abs(x - center) < width / 2, float(depth), 0.0) + 0j)


def sech_squared(strength: float, grid: GridSpec, scale: float = 1.0) -> SampledFunction:
    """``V = strength * sech^2(scale * x)``."""
    x = grid.nodes
    return SampledFunction(grid, strength / np.cosh(np.minimum(np.abs(scale * x), 700.0)) ** 2 + 0j)


def constant_potential(value: complex, grid: GridSpec) -> SampledFunction:
    return SampledFunction(grid, np.full(grid.points, complex(value)))


def _normalized(grid: GridSpec, psi) -> SampledFunction:
    from .numerics.fd import l2_norm

    psi = np.asarray(psi, dtype=complex)
    return SampledFunction(grid, psi / l2_norm(psi, grid.spacing))
