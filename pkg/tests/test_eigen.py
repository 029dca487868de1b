import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexsusy.numerics import (
    EigensolverError,
    GridSpec,
    OperatorMatrix,
    SampledFunction,
    build_hamiltonian,
    eigensolve,
    integrate,
    tridiagonal_eigenvalues,
    tridiagonal_hamiltonian,
)


def test_three_point_free_matrix():
    M = tridiagonal_hamiltonian(np.zeros(3), 1.0)
    assert np.array_equal(M.diag, [2, 2, 2])
    assert np.array_equal(M.sub, [-1, -1]) and np.array_equal(M.sup, [-1, -1])
    assert np.allclose(M.to_dense(), [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])


def test_build_hamiltonian_bands(line2000):
    V = line2000.sample(lambda x: x * x)
    M = build_hamiltonian(V)
    h = line2000.spacing
    assert np.allclose(M.diag, 2 / h**2 + line2000.nodes**2)
    assert np.allclose(M.sub, -1 / h**2) and M.is_symmetric


def test_build_hamiltonian_grid_mismatch(line2000):
    V = line2000.sample(lambda x: x)
    with pytest.raises(ValueError):
        build_hamiltonian(V, GridSpec.line(5.0, 2000))


def test_harmonic_lowest_levels(line2000):
    pairs = eigensolve(build_hamiltonian(line2000.sample(lambda x: x * x)), 3)
    E = np.array([p[0] for p in pairs])
    assert np.abs(E - [1, 3, 5]).max() < 1e-4


def test_constant_shift(line2000):
    c = 0.7 - 1.3j
    base = eigensolve(build_hamiltonian(line2000.sample(lambda x: 0 * x)), 4)
    shifted = eigensolve(build_hamiltonian(line2000.sample(lambda x: 0 * x + c)), 4)
    for (E0, _), (E1, _) in zip(base, shifted):
        assert abs(E1 - (E0 + c)) < 1e-10


def test_zero_matrix():
    n = 32
    M = OperatorMatrix(np.zeros(n, complex), np.zeros(n - 1, complex), np.zeros(n - 1, complex))
    assert np.all(tridiagonal_eigenvalues(M) == 0)
    assert all(E == 0 for E, _ in eigensolve(M, 5))


def test_particle_in_box(line2000):
    g = line2000
    pairs = eigensolve(build_hamiltonian(g.sample(lambda x: 0 * x)), 5)
    n = np.arange(1, 6)
    # Dirichlet walls sit one spacing beyond the end nodes
    discrete = 4 / g.spacing**2 * np.sin(n * np.pi / (2 * (g.points + 1))) ** 2
    E = np.array([p[0] for p in pairs])
    assert np.abs(E - discrete).max() < 1e-10
    assert np.abs(E.imag).max() < 5e-9
    assert np.allclose(E.real, (n * np.pi / (2 * g.extent)) ** 2, rtol=5e-3)


def test_sech_squared_single_bound_state(line2000):
    V = line2000.sample(lambda x: -2 / np.cosh(x) ** 2)
    E0 = eigensolve(build_hamiltonian(V), 2)[0][0]
    assert abs(E0 + 1) < 1e-4


def test_eigenpairs_normalized_with_small_residual(line2000):
    V = line2000.sample(lambda x: x * x + 1j * x**3 / 10)
    M = build_hamiltonian(V)
    pairs = eigensolve(M, 4)
    Es = [p[0] for p in pairs]
    assert all(Es[i].real <= Es[i + 1].real for i in range(3))
    for E, psi in pairs:
        assert integrate(SampledFunction(psi.grid, np.abs(psi.values) ** 2)).real == pytest.approx(1, abs=1e-8)
        Mv = M.matvec(psi.values)
        assert np.linalg.norm(Mv - E * psi.values) <= 1e-8 * np.linalg.norm(Mv)


def test_agrees_with_dense_solver():
    g = GridSpec.line(6.0, 200)
    V = g.sample(lambda x: x * x + 1j * x)
    M = build_hamiltonian(V)
    dense = np.linalg.eigvals(M.to_dense())
    dense = dense[np.argsort(dense.real)][:6]
    ours = np.array([E for E, _ in eigensolve(M, 6)])
    assert np.abs(ours - dense).max() < 1e-8 * np.abs(dense).max()


def test_non_symmetric_bands():
    rng = np.random.default_rng(3)
    n = 60
    d = rng.normal(size=n) + 1j * rng.normal(size=n)
    sub = 1 + rng.uniform(0, 1, n - 1)
    sup = 1 + rng.uniform(0, 1, n - 1)
    M = OperatorMatrix(d, sub + 0j, sup + 0j)
    dense = np.sort_complex(np.linalg.eigvals(M.to_dense()))
    ours = np.sort_complex(tridiagonal_eigenvalues(M))
    assert np.abs(ours - dense).max() < 1e-10


def test_count_bounds(line2000):
    M = build_hamiltonian(line2000.sample(lambda x: 0 * x))
    assert eigensolve(M, 0) == []
    with pytest.raises(ValueError):
        eigensolve(M, -1)
    with pytest.raises(ValueError):
        eigensolve(M, line2000.points + 1)


def test_iteration_budget_exhausted_raises(line2000):
    M = build_hamiltonian(line2000.sample(lambda x: x * x))
    with pytest.raises(EigensolverError):
        eigensolve(M, 2, max_iter=1)


@settings(max_examples=10, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_real_potentials_have_real_eigenvalues(a, b):
    g = GridSpec.line(5.0, 400)
    V = g.sample(lambda x: a * np.exp(-x * x) + b * np.tanh(x))
    for E, _ in eigensolve(build_hamiltonian(V), 4):
        assert abs(E.imag) < 5e-9
