"""Eigenpairs of complex tridiagonal matrices.

Eigenvalues come from an implicit QL sweep with Wilkinson-type shifts run in
complex arithmetic on the complex-symmetric form of the matrix (complex
orthogonal rotations keep the tridiagonal symmetric structure, so a sweep
costs O(N)). The wanted eigenvalues are then polished and their vectors
obtained by inverse iteration on the original bands.
"""
from __future__ import annotations

import cmath

import numba
import numpy as np
from scipy.linalg import solve_banded

from .fd import trapezoid_array
from .grid import SampledFunction
from .hamiltonian import OperatorMatrix

EPS = np.finfo(float).eps


class EigensolverError(RuntimeError):
    """Raised when the QL iteration or the eigenvector refinement fails."""


@numba.njit(cache=True, nogil=True)
def _ql_eigenvalues(diag, off, max_iter):
    # returns (eigenvalues, status); status < 0 flags failure at index -status-1
    n = diag.shape[0]
    d = diag.copy()
    e = np.zeros(n, dtype=np.complex128)
    e[: n - 1] = off
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                return d, -(l + 1)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = cmath.sqrt(g * g + 1.0)
            if abs(g + r) >= abs(g - r):
                g = d[m] - d[l] + e[l] / (g + r)
            else:
                g = d[m] - d[l] + e[l] / (g - r)
            s = 1.0 + 0.0j
            c = 1.0 + 0.0j
            p = 0.0j
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = cmath.sqrt(f * f + g * g)
                e[i + 1] = r
                if r == 0.0:
                    if f != 0.0 or g != 0.0:
                        # isotropic rotation vector: complex orthogonal QL breaks down
                        return d, -(l + 1)
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, 0


def _symmetric_offdiagonal(M: OperatorMatrix) -> np.ndarray:
    if M.is_symmetric:
        return np.array(M.sub)
    # diagonal similarity: eigenvalues depend only on the products sub*sup
    return np.sqrt(M.sub * M.sup)


def tridiagonal_eigenvalues(M: OperatorMatrix, max_iter: int = 60) -> np.ndarray:
    """All eigenvalues, unsorted."""
    if M.dimension == 1:
        return np.array(M.diag)
    vals, status = _ql_eigenvalues(
        np.ascontiguousarray(M.diag), np.ascontiguousarray(_symmetric_offdiagonal(M)), max_iter
    )
    if status < 0:
        raise EigensolverError(
            f"QL iteration did not converge for eigenvalue {-status - 1} "
            f"within {max_iter} sweeps"
        )
    return vals


def _banded(M: OperatorMatrix, shift: complex) -> np.ndarray:
    n = M.dimension
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = M.sup
    ab[1] = M.diag - shift
    ab[2, :-1] = M.sub
    return ab


def _start_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _inverse_iteration(M, lam, previous, scale, steps):
    n = M.dimension
    # keep the shift off the exact eigenvalue so the LU stays finite
    shift = lam + 4 * EPS * scale * (1 + 1j)
    ab = _banded(M, shift)
    v = _start_vector(n, seed=len(previous))
    v /= np.linalg.norm(v)
    for _ in range(steps):
        for u in previous:
            v = v - np.vdot(u, v) * u
        with np.errstate(all="ignore"):
            w = solve_banded((1, 1), ab, v, check_finite=False)
        nrm = np.linalg.norm(w)
        if not np.isfinite(nrm) or nrm == 0:
            raise EigensolverError(f"inverse iteration broke down near {lam}")
        v = w / nrm
    return v


def _rayleigh(M: OperatorMatrix, v: np.ndarray) -> complex:
    Mv = M.matvec(v)
    if M.is_symmetric:
        # bilinear quotient is stationary for complex-symmetric matrices
        den = v @ v
        if abs(den) > 1e-6:
            return complex((v @ Mv) / den)
    return complex(np.vdot(v, Mv) / np.vdot(v, v))


def eigensolve(
    M: OperatorMatrix,
    count: int,
    *,
    rtol: float = 1e-8,
    max_iter: int = 60,
) -> list[tuple[complex, SampledFunction | np.ndarray]]:
    """Lowest ``count`` eigenpairs ordered by ascending real part.

    Eigenvectors are normalised so that the trapezoid integral of ``|psi|^2``
    is one (unit spacing if the matrix carries no grid) and phased so that
    the largest component is real and positive. Every returned pair satisfies
    ``||M psi - E psi|| <= rtol * ||M psi||`` up to a floor of
    ``100 eps ||M||_inf ||psi||`` for eigenvalues at or near zero; otherwise
    :class:`EigensolverError` is raised.
    """
    n = M.dimension
    if count < 0 or count > n:
        raise ValueError(f"count must lie in [0, {n}], got {count}")
    if count == 0:
        return []
    vals = tridiagonal_eigenvalues(M, max_iter)
    vals = vals[np.argsort(vals.real, kind="stable")][:count]
    scale = max(M.norm_inf(), 1.0)
    h = M.grid.spacing if M.grid is not None else 1.0

    pairs = []
    done: list[tuple[complex, np.ndarray]] = []
    for lam in vals:
        # (near-)degenerate levels: orthogonalise against vectors already found
        cluster = [u for mu, u in done if abs(mu - lam) <= 1e3 * EPS * scale]
        v = _inverse_iteration(M, lam, cluster, scale, steps=3)
        lam_ref = _rayleigh(M, v) if not cluster else complex(lam)
        Mv = M.matvec(v)
        res = np.linalg.norm(Mv - lam_ref * v)
        bound = max(rtol * np.linalg.norm(Mv), 100 * EPS * scale)
        if not np.isfinite(res) or res > bound:
            raise EigensolverError(
                f"eigenpair near {complex(lam):.6g} has residual {res:.3e} > {bound:.3e}"
            )
        done.append((lam, v))
        psi = v / np.sqrt(trapezoid_array(np.abs(v) ** 2, h).real)
        k = int(np.argmax(np.abs(psi)))
        psi = psi * (abs(psi[k]) / psi[k])
        pairs.append((lam_ref, SampledFunction(M.grid, psi) if M.grid is not None else psi))
    return pairs
