import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexsusy.numerics import (
    Domain,
    GridSpec,
    SampledFunction,
    check_same_grid,
    cumulative_integral_array,
    derivative_array,
    differentiate,
    fornberg_weights,
    integrate,
    second_derivative,
)


def test_line_spacing_and_nodes():
    g = GridSpec.line(2.0, 21)
    assert g.spacing == pytest.approx(0.2)
    assert g.nodes[0] == -2.0 and g.nodes[-1] == 2.0


def test_half_line_excludes_origin():
    g = GridSpec.half_line(1.0, 100)
    assert g.spacing == pytest.approx(0.01)
    assert g.nodes[0] == pytest.approx(0.01)
    assert g.nodes[-1] == pytest.approx(1.0)
    assert np.all(g.nodes > 0)


@pytest.mark.parametrize("N", [0, 15, 16.5])
def test_too_few_points_rejected(N):
    with pytest.raises(ValueError):
        GridSpec.line(1.0, N)


@pytest.mark.parametrize("L", [0.0, -1.0, np.inf])
def test_bad_extent_rejected(L):
    with pytest.raises(ValueError):
        GridSpec.half_line(L, 32)


def test_nodes_read_only():
    g = GridSpec.line(1.0, 32)
    with pytest.raises(ValueError):
        g.nodes[0] = 3.0


def test_grid_dict_round_trip():
    g = GridSpec(Domain.HALF_LINE, 7.5, 300)
    assert GridSpec.from_dict(g.to_dict()) == g
    assert g.to_dict() == {"domain": "half_line", "L": 7.5, "N": 300}


def test_sampled_function_validation():
    g = GridSpec.line(1.0, 32)
    with pytest.raises(ValueError):
        SampledFunction(g, np.zeros(31))
    bad = np.zeros(32)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        SampledFunction(g, bad)


def test_sampled_function_arithmetic_and_mismatch():
    g = GridSpec.line(1.0, 32)
    u = g.sample(lambda x: x)
    v = 2 * u + 1 - u * u
    assert np.allclose(v.values, 2 * g.nodes + 1 - g.nodes**2)
    other = GridSpec.line(2.0, 32).sample(lambda x: x)
    with pytest.raises(ValueError):
        u + other
    with pytest.raises(ValueError):
        check_same_grid(u, other)


def test_derivative_of_constant_vanishes():
    g = GridSpec.line(3.0, 64)
    assert np.abs(differentiate(g.sample(lambda x: 0 * x + 4.2)).values).max() < 1e-12


def test_derivative_of_linear_is_one():
    g = GridSpec.line(3.0, 64)
    d = differentiate(g.sample(lambda x: x)).values
    assert np.abs(d[1:-1] - 1).max() < 1e-10
    assert np.abs(d - 1).max() < 1e-10  # one-sided ends are exact for lines too


def test_derivative_of_sine_second_order():
    g = GridSpec.line(np.pi, 4001)
    d = differentiate(g.sample(np.sin)).values
    assert np.abs(d[1:-1] - np.cos(g.nodes[1:-1])).max() < 1e-6


@pytest.mark.parametrize("order", [2, 4, 6])
def test_derivative_convergence_order(order):
    errs = []
    for N in (81, 161):
        g = GridSpec.line(2.0, N)
        d = derivative_array(np.sin(g.nodes), g.spacing, order)
        errs.append(np.abs(d - np.cos(g.nodes)).max())
    assert np.log2(errs[0] / errs[1]) > order - 0.5


def test_second_derivative_high_order():
    g = GridSpec.line(2.0, 161)
    d2 = second_derivative(g.sample(np.exp), order=6).values
    assert np.abs(d2 - np.exp(g.nodes)).max() < 1e-8


def test_fornberg_weights_central():
    assert np.allclose(fornberg_weights((-1, 0, 1), 1), [-0.5, 0, 0.5])
    assert np.allclose(fornberg_weights((-1, 0, 1), 2), [1, -2, 1])


def test_integrate_examples():
    assert integrate(GridSpec.line(1.0, 101).sample(lambda x: 1 + 0 * x)) == pytest.approx(2.0, abs=1e-13)
    assert abs(integrate(GridSpec.line(3.0, 101).sample(lambda x: -x))) < 1e-12
    g = GridSpec.line(10.0, 2001)
    assert abs(integrate(g.sample(lambda x: np.exp(-x * x))) - np.sqrt(np.pi)) < 1e-6


def test_integrate_exact_for_linear():
    g = GridSpec.half_line(2.0, 50)
    # trapezoid over the nodes h..L
    assert integrate(g.sample(lambda x: 3 * x + 1)).real == pytest.approx(1.5 * (4 - g.spacing**2) + 2 - g.spacing, rel=1e-13)


def test_cumulative_integral_with_end_correction():
    g = GridSpec.line(3.0, 301)
    x, h = g.nodes, g.spacing
    plain = cumulative_integral_array(np.cos(x), h)
    corrected = cumulative_integral_array(np.cos(x), h, -np.sin(x))
    exact = np.sin(x) - np.sin(x[0])
    assert np.abs(plain - exact).max() < 1e-3
    assert np.abs(corrected - exact).max() < 1e-8


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=4, max_size=4),
    st.floats(-2.0, 2.0),
    st.floats(0.3, 3.0),
)
def test_integral_of_derivative_matches_endpoints(coef, center, freq):
    # affine part plus a modulated bump that is flat at the ends
    g = GridSpec.line(8.0, 1601)
    x = g.nodes
    bump = np.exp(-((x - center) ** 2))
    u = coef[0] + coef[1] * x + bump * (coef[2] * np.sin(freq * x) + coef[3])
    total = integrate(differentiate(SampledFunction(g, u)))
    assert abs(total - (u[-1] - u[0])) < 1e-8
