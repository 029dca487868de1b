import json

import numpy as np
import pytest

from complexsusy import families as fam
from complexsusy.numerics import GridSpec, SampledFunction
from complexsusy.scattering import (
    DEFAULT_KMAX,
    DEFAULT_KMIN,
    DEFAULT_NK,
    decay_window,
    scatter,
    square_well_amplitudes,
    transparency_scan,
)


def test_free_scan_is_transparent(scatter_grid):
    rep = transparency_scan(fam.constant_potential(0.0, scatter_grid))
    assert rep.passed and rep.max_R < 1e-12 and rep.max_T_deviation < 1e-12
    assert len(rep.k) == DEFAULT_NK
    assert rep.k[0] == pytest.approx(DEFAULT_KMIN) and rep.k[-1] == pytest.approx(DEFAULT_KMAX)
    assert np.all(np.diff(np.log(rep.k)) == pytest.approx(np.log(rep.k[1] / rep.k[0])))


def test_zero_energy_partner_is_transparent(scatter_grid):
    _, pair = fam.transparent_zero_energy(1.0, 0.0, scatter_grid)
    rep = transparency_scan(pair.V1)
    assert rep.passed, (rep.max_R, rep.max_T_deviation)


def test_negative_energy_partner_is_transparent(scatter_grid):
    _, pair = fam.transparent_negative_energy(-1.0, scatter_grid, rho=0.3)
    rep = transparency_scan(pair.V1)
    assert rep.passed, (rep.max_R, rep.max_T_deviation)


def test_ordinary_well_is_not_transparent(scatter_grid):
    rep = transparency_scan(fam.square_well(-1.0, 2.0, scatter_grid))
    assert not rep.passed and rep.max_R > 1e-2


def test_positive_energy_partner_needs_window():
    g = GridSpec.line(60.0, 8000)
    _, pair = fam.transparent_positive_energy(0.25, 2.0, 0.0, g)
    with pytest.raises(ValueError, match="decayed"):
        transparency_scan(pair.V1)
    rep = transparency_scan(decay_window(pair.V1))
    assert rep.max_R < 1e-2 and rep.max_T_deviation < 2e-2


def test_positive_energy_window_converges_with_length():
    g = GridSpec.line(120.0, 16000)
    _, pair = fam.transparent_positive_energy(0.25, 2.0, 0.0, g)
    rep = transparency_scan(decay_window(pair.V1))
    assert rep.passed and rep.max_R < 1e-4


def test_decay_window_profile(line2000):
    V = decay_window(fam.constant_potential(1.0, line2000))
    x = line2000.nodes
    assert np.allclose(V.values[np.abs(x) < 2.0], 1.0, atol=1e-4)
    assert np.all(np.diff(V.real[x >= 0]) <= 0)
    assert np.abs(V.values[np.abs(x) >= 9.5]).max() < 1e-6


def test_reflectionless_sech_well():
    g = GridSpec.line(20.0, 16001)
    V = fam.sech_squared(-2.0, g)
    for k in (0.5, 1.0, 2.0):
        c = scatter(V, k)
        assert abs(c.R) < 1e-6
        assert abs(abs(c.T) - 1) < 1e-6
        assert abs(c.T - (1j * k - 1) / (1j * k + 1)) < 1e-4


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_square_well_reference(k):
    g = GridSpec.line(10.005, 2002)
    c = scatter(fam.square_well(-2.0, 3.0, g), k)
    R, T = square_well_amplitudes(-2.0, 3.0, k)
    assert abs(c.R - R) < 1e-6 and abs(c.T - T) < 1e-6


def test_real_potentials_conserve_flux(scatter_grid):
    rep = transparency_scan(fam.sech_squared(1.5, scatter_grid, 0.7))
    assert np.allclose(rep.abs_R**2 + rep.abs_T**2, 1, atol=1e-10)


def test_dissipative_potential_absorbs(scatter_grid):
    x = scatter_grid.nodes
    V = SampledFunction(scatter_grid, -0.5j * np.exp(-x * x) + 0.3 / np.cosh(x) ** 2)
    rep = transparency_scan(V)
    flux = rep.abs_R**2 + rep.abs_T**2
    assert np.all(flux <= 1 + 1e-6) and flux.min() < 0.99


def test_translation_changes_only_phases(scatter_grid):
    _, p0 = fam.transparent_negative_energy(-1.0, scatter_grid, rho=0.3)
    _, p1 = fam.transparent_negative_energy(-1.0, scatter_grid, rho=0.3, b=1.5)
    r0, r1 = transparency_scan(p0.V1), transparency_scan(p1.V1)
    assert np.allclose(np.abs(r0.T), np.abs(r1.T), atol=1e-8)
    assert np.allclose(r0.T, r1.T, atol=1e-6)  # T is translation invariant, R picks up a phase


@pytest.mark.parametrize("d", [1.5, 0.123])
def test_translation_invariance_of_moduli(scatter_grid, d):
    x = scatter_grid.nodes
    V = lambda s: SampledFunction(scatter_grid, 0.8 * np.exp(-(x - s) ** 2) - 0.3j * np.exp(-(x - s) ** 2 / 2))
    a, b = transparency_scan(V(0.0)), transparency_scan(V(d))
    assert np.abs(a.abs_R - b.abs_R).max() < 1e-8 and np.abs(a.abs_T - b.abs_T).max() < 1e-8


def test_report_serialization(scatter_grid):
    rep = transparency_scan(fam.sech_squared(-2.0, scatter_grid), 0.5, 2.0, 4)
    d = json.loads(rep.to_json())
    assert d["passed"] == rep.passed and len(d["R"]) == 4
    lines = rep.to_csv().splitlines()
    assert lines[0] == "k,abs_R,abs_T,arg_T" and len(lines) == 5
    k, aR, aT, ph = map(float, lines[2].split(","))
    assert k == rep.k[1] and aT == rep.abs_T[1] and ph == np.angle(rep.T[1])


def test_scan_parallel_matches_serial(scatter_grid):
    V = fam.sech_squared(-1.0, scatter_grid)
    a, b = transparency_scan(V, nk=6), transparency_scan(V, nk=6, jobs=3)
    assert np.array_equal(a.R, b.R) and np.array_equal(a.T, b.T)


@pytest.mark.parametrize("kmin,kmax,nk", [(0.0, 1.0, 3), (2.0, 1.0, 3), (0.5, 1.0, 0)])
def test_scan_rejects_bad_ranges(scatter_grid, kmin, kmax, nk):
    with pytest.raises(ValueError):
        transparency_scan(fam.constant_potential(0.0, scatter_grid), kmin, kmax, nk)


def test_single_wavenumber_scan(scatter_grid):
    rep = transparency_scan(fam.constant_potential(0.0, scatter_grid), 0.7, 1.0, 1)
    assert rep.k.tolist() == [0.7]
