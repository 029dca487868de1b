import json
import warnings

import numpy as np
import pytest

from complexsusy import families as fam
from complexsusy.analysis import (
    BoundaryTermWarning,
    Spectrum,
    SpectrumEntry,
    centrifugal_index,
    compare_spectra,
    continuum_threshold,
    dissipativity_check,
    im_energy_functional,
    mapping_residual,
    no_bound_state_check,
    pt_symmetry_check,
    spectrum,
)
from complexsusy.numerics import GridSpec, SampledFunction


@pytest.fixture(scope="module")
def harmonic_case():
    g = GridSpec.line(10.0, 2000)
    W, pair = fam.harmonic(g)
    return W, pair, spectrum(pair.V0, count=6), spectrum(pair.V1, count=6)


@pytest.fixture(scope="module")
def gaussian_case():
    g = GridSpec.line(10.0, 4000)
    W, pair = fam.gaussian_model(fam.GaussianModelParams(1.0, 1.0, 1, 0.0), g)
    return W, pair, spectrum(pair.V0, count=7), spectrum(pair.V1, count=7)


def _sf(grid, v):
    return SampledFunction(grid, np.asarray(v, dtype=complex))


# ---------------------------------------------------------------- spectrum

def test_shifted_oscillator_levels(harmonic_case):
    _, _, S0, _ = harmonic_case
    assert np.abs(S0.energies[:3] - [0, 2, 4]).max() < 1e-4
    assert all(e.bound for e in S0)


def test_spectrum_sorted_and_normalized(harmonic_case):
    _, _, S0, _ = harmonic_case
    E = S0.energies
    assert np.all(np.diff(E.real) > 0)
    h = S0[0].psi.grid.spacing
    for e in S0:
        assert np.trapezoid(np.abs(e.psi.values) ** 2, dx=h) == pytest.approx(1.0, abs=1e-8)


def test_single_bound_level_of_shifted_well(scatter_grid):
    _, pair = fam.transparent_negative_energy(-1.0, scatter_grid, rho=0.3)
    S = spectrum(pair.V1, count=4)
    assert len(S.bound) == 1 and abs(S.bound[0].E + 1) < 1e-4


def test_free_particle_has_no_bound_levels(line2000):
    S = spectrum(line2000.sample(lambda x: 0 * x), count=5)
    assert S.continuum_threshold == 0.0
    assert S.bound == []


def test_spectrum_rejects(line2000):
    V = line2000.sample(lambda x: 0 * x)
    with pytest.raises(ValueError):
        spectrum(V, count=0)
    with pytest.raises(ValueError):
        spectrum(V, GridSpec.line(3.0, 100), 2)


def test_threshold_uses_far_end_on_half_line():
    h = GridSpec.half_line(10.0, 1000)
    V = h.sample(lambda r: 2 / r**2 + 0.5)
    assert continuum_threshold(V) == pytest.approx(0.5 + 2 / 9.75**2, rel=1e-2)


def test_spectrum_json(harmonic_case):
    _, _, S0, _ = harmonic_case
    d = json.loads(json.dumps(S0.to_dict()))
    assert d["entries"][1]["E"]["re"] == pytest.approx(2.0, abs=1e-4)
    assert "psi_re" not in d["entries"][0]
    d = S0.to_dict(include_psi=True)
    assert len(d["entries"][0]["psi_re"]) == 2000


# ---------------------------------------------------------------- isospectrality

def test_harmonic_pair_report(harmonic_case):
    W, _, S0, S1 = harmonic_case
    rep = compare_spectra(S0, S1, W=W)
    assert rep.unmatched == []
    assert len(rep.zero_mode_exceptions) == 1
    z = rep.zero_mode_exceptions[0]
    assert z.side == 0 and z.which == "q_minus" and abs(z.E) < 1e-4
    assert rep.zero_mode_normalizable == {"q_plus": False, "q_minus": True}
    # every bound level of V1 inside the window is matched; the top one may sit beyond
    matched1 = {m.i1 for m in rep.matched}
    beyond1 = {L.index for L in rep.beyond_window if L.side == 1}
    assert matched1 | beyond1 == set(range(len(S1)))
    assert all(abs(m.E0 - m.E1) < 3e-4 for m in rep.matched)


def test_every_bound_level_accounted_once(harmonic_case, gaussian_case):
    for W, _, S0, S1 in (harmonic_case, gaussian_case):
        rep = compare_spectra(S0, S1, W=W)
        for side, S in ((0, S0), (1, S1)):
            seen = [m.i0 if side == 0 else m.i1 for m in rep.matched]
            seen += [L.index for L in rep.unmatched + rep.beyond_window if L.side == side]
            seen += [z.index for z in rep.zero_mode_exceptions if z.side == side]
            bound = [i for i, e in enumerate(S) if e.bound]
            assert sorted(i for i in seen if i in bound) == bound
            assert len(seen) == len(set(seen))


def test_gaussian_strict_isospectrality(gaussian_case):
    W, _, S0, S1 = gaussian_case
    rep = compare_spectra(S0, S1, 1e-3, W)
    assert rep.unmatched == []
    assert rep.max_dE < 1e-4
    # the extra level is the normalizable q+ kernel of H1 at E = 0
    assert [(z.side, z.which) for z in rep.zero_mode_exceptions] == [(1, "q_plus")]


def test_identical_spectra(harmonic_case):
    _, _, S0, _ = harmonic_case
    rep = compare_spectra(S0, S0)
    assert len(rep.matched) == len(S0) and rep.max_dE == 0.0
    assert rep.isospectral


def test_ambiguous_matches_reported(line2000):
    psi = line2000.sample(lambda x: np.exp(-x * x))
    mk = lambda Es: Spectrum([SpectrumEntry(E, psi, True) for E in Es], 10.0)
    rep = compare_spectra(mk([1.0, 1.0004]), mk([1.0002, 5.0]), tolE=1e-3)
    assert len(rep.matched) == 1
    assert {(L.side, L.index) for L in rep.ambiguous} == {(1, 0)}
    assert [(L.side, L.index) for L in rep.unmatched] == [(0, 1)]
    assert not rep.isospectral


def test_report_json(gaussian_case):
    W, _, S0, S1 = gaussian_case
    d = json.loads(json.dumps(compare_spectra(S0, S1, W=W).to_dict()))
    assert d["zero_mode_exceptions"][0]["which"] == "q_plus"
    assert set(d) >= {"matched", "unmatched", "zero_mode_exceptions", "beyond_window", "ambiguous"}


def test_mapping_consistency(harmonic_case, gaussian_case):
    for W, pair, S0, S1 in (harmonic_case, gaussian_case):
        rep = compare_spectra(S0, S1, W=W)
        for m in rep.matched:
            e1 = S1[m.i1]
            assert mapping_residual(pair, e1.E, e1.psi, "q_plus") <= 1e-3
            e0 = S0[m.i0]
            assert mapping_residual(pair, e0.E, e0.psi, "q_minus") <= 1e-3


def test_mapping_of_zero_mode_is_empty(harmonic_case):
    _, pair, S0, _ = harmonic_case
    assert mapping_residual(pair, S0[0].E, S0[0].psi, "q_minus") == float("inf")


def test_mapping_rejects_bad_direction(harmonic_case):
    _, pair, S0, _ = harmonic_case
    with pytest.raises(ValueError):
        mapping_residual(pair, S0[0].E, S0[0].psi, "sideways")


# ---------------------------------------------------------------- Im E functional

def test_functional_of_constant_g(line2000):
    psi = line2000.sample(lambda x: np.exp(-x * x) + 0j)
    assert im_energy_functional(line2000.sample(lambda x: 0 * x + 2.0), psi) == pytest.approx(0.0, abs=1e-12)


def test_functional_parity(line2000):
    # g = x^2 e^{-x^2} has odd g', the density is even
    g = line2000.sample(lambda x: x * x * np.exp(-x * x))
    psi = line2000.sample(lambda x: np.exp(-x * x / 2) * (1 + x * x) + 0j)
    assert abs(im_energy_functional(g, psi)) < 1e-10


def test_functional_matches_gaussian_levels(gaussian_case):
    W, _, _, S1 = gaussian_case
    g = _sf(W.grid, W.g)
    for e in S1[:6]:
        val = im_energy_functional(g, e.psi, W.g_prime)
        assert abs(val - e.E.imag) < max(1e-4, 1e-3 * abs(e.E))


def test_functional_matches_dissipative_levels():
    g = GridSpec.line(30.0, 4000)
    W, pair = fam.tanh_model(fam.TanhModelParams(-2.0, 0.5, 0.0), g)
    S = spectrum(pair.V1, count=5)
    gs = _sf(g, W.g)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryTermWarning)
        for e in S:
            assert abs(im_energy_functional(gs, e.psi, W.g_prime) - e.E.imag) < max(1e-4, 1e-3 * abs(e.E))


def test_functional_warns_on_undecayed_state(line2000):
    g = line2000.sample(np.tanh)
    psi = line2000.sample(lambda x: np.cos(x) + 0j)
    with pytest.warns(BoundaryTermWarning):
        im_energy_functional(g, psi)


def test_radial_partner_has_real_spectrum(half2000):
    W, pair = fam.quasi_complex_radial(fam.RadialQuasiComplexParams(l0=0, epsI=3.0), half2000)
    S0, S1 = spectrum(pair.V0, count=5), spectrum(pair.V1, count=5)
    rep = compare_spectra(S0, S1, W=W)
    assert rep.unmatched == [] and len(rep.matched) == 5 and rep.max_dE < 1e-4
    g = _sf(half2000, W.g)
    for e in S1:
        assert abs(e.E.imag) < 1e-5
        assert abs(im_energy_functional(g, e.psi, W.g_prime) - e.E.imag) < 1e-8


# ---------------------------------------------------------------- PT symmetry

def test_pt_about_shifted_center():
    g = GridSpec.line(10.0, 2001)
    _, pair = fam.transparent_zero_energy(1.0, 0.5, g)
    assert pt_symmetry_check(pair.V1, center=-0.5) < 1e-10
    assert pt_symmetry_check(pair.V1, center=0.0) > 1e-2


def test_pt_off_grid_center_uses_interpolation(line2000):
    c = 0.123
    V = line2000.sample(lambda x: np.exp(-((x - c) ** 2)) + 1j * (x - c) * np.exp(-((x - c) ** 2)))
    assert pt_symmetry_check(V, center=c) < 1e-6


def test_pt_examples(line2000):
    x = line2000.nodes
    assert pt_symmetry_check(line2000.sample(lambda x: x * x + 1j * x)) < 1e-12
    assert pt_symmetry_check(line2000.sample(lambda x: x * x + 1j * x * x)) == pytest.approx(2 * (x * x).max())


# ---------------------------------------------------------------- dissipativity

def test_dissipativity_tanh(line2000):
    _, pair = fam.tanh_model(fam.TanhModelParams(-1.0, 1.0), line2000)
    d = dissipativity_check(pair, "V1")
    assert d.dissipative and d.margin <= 0
    _, pair = fam.tanh_model(fam.TanhModelParams(1.0, 1.0), line2000)
    d = dissipativity_check(pair, "V1")
    assert not d.dissipative and d.margin == pytest.approx(2.0, rel=1e-3)


def test_dissipativity_constant_g(line2000):
    x = line2000.nodes
    for kappa in (0.5, -0.5):
        pair = fam.constant_g(kappa, np.tanh, lambda x: 1 / np.cosh(x) ** 2, 0.0, 0.1, line2000)
        assert np.allclose(pair.U1_I - 0.1, 2 * kappa * np.tanh(x))
        assert dissipativity_check(pair, "V1").margin == pytest.approx((2 * kappa * np.tanh(x) + 0.1).max())
    pair = fam.constant_g(0.5, lambda x: -1 - 0 * x, lambda x: 0 * x, 0.0, 0.0, line2000)
    assert dissipativity_check(pair, "V0").dissipative


def test_dissipativity_rejects_bad_selector(line2000):
    _, pair = fam.tanh_model(fam.TanhModelParams(), line2000)
    with pytest.raises(ValueError):
        dissipativity_check(pair, "V2")


def test_dissipative_bound_levels_decay():
    g = GridSpec.line(30.0, 4000)
    for al, be in ((-2.0, 0.5), (1.0, -0.3)):
        W, pair = fam.tanh_model(fam.TanhModelParams(al, be), g)
        assert dissipativity_check(pair).dissipative
        S = spectrum(pair.V1, count=4)
        assert len(S.bound) == 1  # the normalizable q+ kernel at E = i alpha beta
        assert abs(S.bound[0].E - 1j * al * be) < 1e-4
        assert all(e.E.imag <= 1e-5 for e in S)


# ---------------------------------------------------------------- centrifugal barrier

def test_centrifugal_pure_barrier(half2000):
    fit = centrifugal_index(half2000.sample(lambda r: 2 / r**2))
    assert fit.l_est == pytest.approx(1.0, abs=1e-9) and fit.reliable


def test_centrifugal_radial_family(half2000):
    _, pair = fam.quasi_complex_radial(fam.RadialQuasiComplexParams(l0=0, epsI=3.0), half2000)
    assert abs(centrifugal_index(pair.V0).l_est - 0) < 0.05
    assert abs(centrifugal_index(pair.V1).l_est - 1) < 0.05


def test_centrifugal_zero_potential(half2000):
    fit = centrifugal_index(half2000.sample(lambda r: 0 * r))
    assert abs(fit.c) < 1e-12 and abs(fit.l_est) < 1e-12


def test_centrifugal_unreliable_fit(half2000):
    assert not centrifugal_index(half2000.sample(lambda r: 1 / r)).reliable
    assert not centrifugal_index(half2000.sample(lambda r: -1 / r**2)).reliable  # below -1/4


def test_centrifugal_needs_half_line(line2000):
    with pytest.raises(ValueError):
        centrifugal_index(line2000.sample(lambda x: x))


# ---------------------------------------------------------------- bound-state absence

def test_no_bound_states_in_repulsive_tanh_partner(line2000):
    _, pair = fam.tanh_model(fam.TanhModelParams(2.0, 1.0), line2000)
    assert no_bound_state_check(_sf(line2000, pair.U0_R))


def test_sech_well_has_a_bound_state(scatter_grid):
    # the e^{-|x|} tail is only resolved to the edge criterion on a longer line
    assert not no_bound_state_check(fam.sech_squared(-2.0, scatter_grid))


def test_positive_constant_has_no_bound_state(line2000):
    assert no_bound_state_check(fam.constant_potential(1.0, line2000))


def test_pure_cubic_pt_oscillator_reference():
    # p^2 + i x^3: published real levels 1.156267, 4.109229, 7.562274, 11.314422
    g = GridSpec.line(12.0, 4000)
    E = spectrum(g.sample(lambda x: 1j * x**3), count=4).energies
    ref = np.array([1.156267, 4.109229, 7.562274, 11.314422])
    assert np.abs(E / ref - 1).max() < 3e-5  # second-order error grows like h^2 E^2
