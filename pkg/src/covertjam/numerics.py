"""Small dense complex linear algebra used by the beamforming strategies.

All routines operate on plain numpy arrays (complex128) and are pure
functions: no global state, safe to call from concurrent workers.
"""

import numpy as np

HERMITIAN_TOL = 1e-9
NULLSPACE_TOL = 1e-10
PSD_CLAMP = 1e-12


class DegenerateInputError(ValueError):
    """Raised when an input is singular or orthogonal beyond recovery."""


def _as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def quadform(h, a) -> float:
    """Evaluate the Hermitian quadratic form h^H A h as a real scalar.

    A must be Hermitian PSD (asymmetry beyond 1e-9 raises). Values in
    [-1e-12, 0) from rounding are clamped to 0; anything more negative
    means A was not PSD and raises.
    """
    h = _as_vector(h)
    a = _as_matrix(a)
    if a.shape != (h.size, h.size):
        raise ValueError(f"dimension mismatch: h has {h.size}, A is {a.shape}")
    asym = np.max(np.abs(a - a.conj().T))
    if asym > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    val = float(np.real(h.conj() @ a @ h))
    if val < 0.0:
        if val < -PSD_CLAMP:
            raise ValueError(f"quadratic form is negative ({val:.3e}); A not PSD")
        val = 0.0
    return val


def normalize_phase(v) -> np.ndarray:
    """Return v scaled to unit norm with a deterministic global phase.

    The first entry of modulus > 1e-12 is made real and positive, so any
    e^{i theta} multiple of v maps to the same representative.
    """
    v = _as_vector(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise DegenerateInputError("cannot phase-normalize the zero vector")
    v = v / nrm
    idx = np.flatnonzero(np.abs(v) > 1e-12)
    if idx.size == 0:
        raise DegenerateInputError("vector is numerically zero")
    pivot = v[idx[0]]
    v = v * (pivot.conjugate() / abs(pivot))
    # force exact realness of the pivot so the output is idempotent
    v[idx[0]] = abs(v[idx[0]])
    return v


def rank1_shift_solve(h, sigma: float, w) -> np.ndarray:
    """Solve (h h^H + sigma I) x = w by the Sherman-Morrison identity.

    Cheaper than a dense solve and exact for this structure; sigma > 0.
    """
    h = _as_vector(h)
    w = _as_vector(w)
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return (w - h * (h.conj() @ w) / (sigma + np.real(h.conj() @ h))) / sigma


def top_gen_eig_rank1(w, b) -> np.ndarray:
    """Maximizer of the generalized Rayleigh quotient (v^H w w^H v)/(v^H B v).

    W = w w^H has rank one, so the dominant eigenvector of B^{-1} W is
    B^{-1} w itself; a linear solve replaces the eigensolver. B must be
    Hermitian positive definite. Returns a phase-normalized unit vector.
    """
    w = _as_vector(w)
    b = _as_matrix(b)
    if b.shape != (w.size, w.size):
        raise ValueError(f"dimension mismatch: w has {w.size}, B is {b.shape}")
    asym = np.max(np.abs(b - b.conj().T))
    if asym > HERMITIAN_TOL:
        raise ValueError(f"B is not Hermitian (asymmetry {asym:.3e})")
    eigs = np.linalg.eigvalsh(b)
    if eigs[0] < 1e-12 * eigs[-1]:
        raise DegenerateInputError(
            f"B is singular (eig range [{eigs[0]:.3e}, {eigs[-1]:.3e}])"
        )
    q = np.linalg.solve(b, w)
    return normalize_phase(q)


def nullspace_basis(a) -> np.ndarray:
    """Orthonormal basis of {x : A x = 0}, as columns of an n x k array.

    Raises DegenerateInputError when A has full column rank (empty basis).
    """
    a = _as_matrix(a)
    _, s, vh = np.linalg.svd(a)
    tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    if rank >= a.shape[1]:
        raise DegenerateInputError("matrix has full column rank; null space is empty")
    basis = vh[rank:].conj().T
    residual = np.max(np.abs(a @ basis)) if basis.size else 0.0
    if residual > NULLSPACE_TOL:
        raise ValueError(f"null-space residual {residual:.3e} above tolerance")
    return basis


def project_unit(x, q) -> np.ndarray:
    """Unit-norm projection of x onto span(Q): the y in span(Q) closest to x.

    Maximizes |y^H x| over unit vectors y in the subspace. Q must hold
    orthonormal columns; x orthogonal to span(Q) within 1e-12 raises.
    """
    x = _as_vector(x)
    q = _as_matrix(q)
    if q.shape[1] == 0:
        raise DegenerateInputError("empty subspace basis")
    if q.shape[0] != x.size:
        raise ValueError(f"dimension mismatch: x has {x.size}, Q is {q.shape}")
    y = q @ (q.conj().T @ x)
    if np.linalg.norm(y) <= 1e-12 * max(1.0, np.linalg.norm(x)):
        raise DegenerateInputError("x is orthogonal to span(Q)")
    return normalize_phase(y)
