"""Dense complex linear algebra kernels.

Everything here works on small (desk-scale) complex matrices held as numpy
arrays.  Factorization and triangular solves go through LAPACK; the
principal eigenpair is computed with a plain power iteration, which is all
the relay problems need because the matrices involved are low rank.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPositiveDefinite

__all__ = [
    "HermitianCheckReport",
    "as_vector",
    "as_matrix",
    "check_hermitian",
    "ensure_hermitian",
    "cholesky",
    "solve_hermitian",
    "principal_eigenpair",
    "principal_generalized_eigenpair",
    "canonical_phase",
    "hadamard",
]

HERMITIAN_TOL = 1e-9


@dataclass(frozen=True)
class HermitianCheckReport:
    is_hermitian: bool
    max_asymmetry: float
    is_positive_definite: bool


def as_vector(x, name="vector"):
    v = np.asarray(x, dtype=complex)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    return v


def as_matrix(x, name="matrix"):
    m = np.asarray(x, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.size < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    return m


def _require_square(m, name):
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")


def check_hermitian(M, tol=HERMITIAN_TOL):
    """Report how far ``M`` is from Hermitian and whether it is PD.

    ``tol`` is relative to the Frobenius norm of ``M``.
    """
    m = as_matrix(M)
    _require_square(m, "M")
    asym = float(np.max(np.abs(m - m.conj().T)))
    scale = float(np.linalg.norm(m))
    is_herm = asym <= tol * scale
    is_pd = False
    if is_herm:
        try:
            np.linalg.cholesky(0.5 * (m + m.conj().T))
            is_pd = True
        except np.linalg.LinAlgError:
            pass
    return HermitianCheckReport(is_herm, asym, is_pd)


def ensure_hermitian(M, tol=HERMITIAN_TOL):
    """Return ``(M + M^H)/2``, or raise if ``M`` is visibly non-Hermitian."""
    m = as_matrix(M)
    _require_square(m, "M")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > tol * np.linalg.norm(m):
        raise NotHermitian(f"matrix asymmetry {asym:.3e} exceeds tolerance")
    return 0.5 * (m + m.conj().T)


def cholesky(M):
    """Lower-triangular ``L`` with ``L @ L^H == M``."""
    m = ensure_hermitian(M)
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def solve_hermitian(M, b, assume_hermitian=False):
    """Solve ``M x = b`` for Hermitian positive definite ``M``.

    ``assume_hermitian`` skips the symmetry check for matrices that are
    Hermitian by construction (only the lower triangle is read then).
    """
    m = as_matrix(M)
    rhs = np.asarray(b, dtype=complex)
    if rhs.shape[0] != m.shape[0]:
        raise DimensionMismatch(f"rhs has {rhs.shape[0]} rows, matrix is {m.shape}")
    if assume_hermitian:
        try:
            L = np.linalg.cholesky(m)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(str(exc)) from None
    else:
        L = cholesky(m)
    return scipy.linalg.cho_solve((L, True), rhs, check_finite=False)


def canonical_phase(v):
    """Rotate ``v`` so its largest-modulus entry is real and nonnegative.

    Ties go to the first such entry.  A zero vector is returned unchanged.
    """
    v = np.asarray(v, dtype=complex)
    k = int(np.argmax(np.abs(v)))
    a = abs(v[k])
    if a == 0:
        return v.copy()
    return v * (np.conj(v[k]) / a)


def principal_eigenpair(M, tol=1e-12, max_iter=10_000):
    """Largest eigenvalue and unit eigenvector of a Hermitian PSD matrix.

    Power iteration, stopped once the eigen-residual
    ``||M v - rho v||`` falls below ``tol * rho`` where ``rho`` is the
    current Rayleigh quotient.  The returned vector is in canonical phase.
    """
    m = ensure_hermitian(M)
    n = m.shape[0]
    col_norms = np.linalg.norm(m, axis=0)
    k = int(np.argmax(col_norms))
    if col_norms[k] == 0:
        e = np.zeros(n, dtype=complex)
        e[0] = 1.0
        return 0.0, e
    # any column lies in the range of a PSD matrix, so the start is never
    # orthogonal to the whole dominant eigenspace by accident
    v = m[:, k] / col_norms[k]
    for _ in range(max_iter):
        w = m @ v
        rho = float(np.real(np.vdot(v, w)))
        if np.linalg.norm(w - rho * v) <= tol * abs(rho):
            return rho, canonical_phase(v)
        nw = np.linalg.norm(w)
        if nw == 0:
            break
        v = w / nw
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")


def principal_generalized_eigenpair(A, B, **kwargs):
    """Maximize the generalized Rayleigh quotient ``x^H B x / x^H A x``.

    ``A`` must be Hermitian PD and ``B`` Hermitian PSD.  Returns
    ``(lambda_max, x)`` where ``x`` is a principal eigenvector of
    ``A^{-1} B``, computed via power iteration on ``L^{-1} B L^{-H}``.
    """
    L = cholesky(A)
    b = as_matrix(B)
    if b.shape != L.shape:
        raise DimensionMismatch(f"A is {L.shape} but B is {b.shape}")
    X = scipy.linalg.solve_triangular(L, b, lower=True)
    C = scipy.linalg.solve_triangular(L, X.conj().T, lower=True)
    lam, w = principal_eigenpair(0.5 * (C + C.conj().T), **kwargs)
    x = scipy.linalg.solve_triangular(L.conj().T, w, lower=False)
    return lam, x


def hadamard(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return a * b
