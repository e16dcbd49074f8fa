"""Dense linear algebra primitives shared by the rest of the package.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. The helpers
:func:`as_matrix` and :func:`as_frame` validate and copy inputs; returned
arrays are marked read-only so they can be shared freely.

Random frames come from NumPy's PCG64 bit generator (64-bit state, 128-bit
internal), seeded explicitly by every caller.
"""

import numpy as np

from .errors import NearSingular, NotOrthonormal, NotSymmetric, RankDeficient, ShapeError

__all__ = [
    "STIEFEL_TOL",
    "as_matrix",
    "as_frame",
    "frozen",
    "is_stiefel",
    "make_rng",
    "qr_thin",
    "reorthonormalize",
    "sym_eig",
    "inv_sqrt_spd",
    "spectral_norm",
    "orthonormal_complement",
    "random_stiefel",
]

STIEFEL_TOL = 1e-10
INV_SQRT_FLOOR = 1e-12


def frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_matrix(M, name="matrix"):
    """Validate ``M`` as a finite real 2-D array and return a read-only copy.

    1-D input is treated as a column vector.
    """
    a = np.array(M, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def is_stiefel(U, tol=STIEFEL_TOL):
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] < U.shape[1]:
        return False
    return np.linalg.norm(U.T @ U - np.eye(U.shape[1])) <= tol


def as_frame(U, tol=STIEFEL_TOL, name="frame"):
    """Validate ``U`` as an element of the Stiefel manifold St(r, n).

    Raises
    ------
    NotOrthonormal
        If ``||U^T U - I||_F > tol``.
    """
    U = as_matrix(U, name)
    if U.shape[0] < U.shape[1]:
        raise ShapeError(f"{name} must be tall (n >= r), got shape {U.shape}")
    err = np.linalg.norm(U.T @ U - np.eye(U.shape[1]))
    if err > tol:
        raise NotOrthonormal(f"{name} departs from orthonormality by {err:.3e}")
    return U


def make_rng(seed):
    """PCG64-backed generator for an explicit integer seed."""
    return np.random.Generator(np.random.PCG64(seed))


def qr_thin(M):
    """Thin QR factorization with a non-negative diagonal in ``R``.

    Parameters
    ----------
    M : array_like, shape (n, r)
        Full column rank, ``n >= r``.

    Returns
    -------
    Q : ndarray, shape (n, r)
        Orthonormal columns.
    R : ndarray, shape (r, r)
        Upper triangular with ``R[i, i] >= 0``.

    Raises
    ------
    RankDeficient
        If a diagonal entry of ``R`` is negligible relative to ``||M||``.
    """
    M = as_matrix(M)
    n, r = M.shape
    if n < r:
        raise ShapeError(f"qr_thin needs n >= r, got {M.shape}")
    Q, R = np.linalg.qr(M, mode="reduced")
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    Q = Q * signs
    R = signs[:, None] * R
    scale = np.linalg.norm(M, 2)
    if scale == 0 or np.min(np.diag(R)) <= 1e-12 * scale:
        raise RankDeficient(f"matrix of shape {M.shape} is numerically rank deficient")
    return frozen(Q), frozen(R)


def reorthonormalize(U):
    """Return the Q factor of ``U``; cleans up drift accumulated by iterations."""
    return qr_thin(U)[0]


def sym_eig(S):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    Returns ``(values, vectors)`` with ``S = vectors @ diag(values) @ vectors.T``.

    Raises
    ------
    NotSymmetric
        If ``||S - S^T||_F > 1e-10 ||S||_F``.
    """
    S = as_matrix(S)
    if S.shape[0] != S.shape[1]:
        raise ShapeError(f"sym_eig needs a square matrix, got {S.shape}")
    if np.linalg.norm(S - S.T) > 1e-10 * np.linalg.norm(S):
        raise NotSymmetric("sym_eig received a non-symmetric matrix")
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    return frozen(w[::-1]), frozen(V[:, ::-1])


def inv_sqrt_spd(S, floor=INV_SQRT_FLOOR):
    """Inverse of the positive definite square root of ``S``.

    Parameters
    ----------
    S : array_like, shape (r, r)
        Symmetric positive definite.
    floor : float
        Relative threshold: every eigenvalue must exceed ``floor * max eigenvalue``.

    Raises
    ------
    NearSingular
        If the smallest eigenvalue is at or below the floor.
    """
    w, V = sym_eig(S)
    if w[0] <= 0 or w[-1] <= floor * w[0]:
        raise NearSingular(
            f"eigenvalue {w[-1]:.3e} at or below floor {floor:.1e} x {max(w[0], 0.0):.3e}"
        )
    R = (V / np.sqrt(w)) @ V.T
    return frozen(0.5 * (R + R.T))


def spectral_norm(M):
    """Largest singular value, from the symmetric eigenproblem of the smaller Gram matrix."""
    M = as_matrix(M)
    G = M.T @ M if M.shape[1] <= M.shape[0] else M @ M.T
    w, _ = sym_eig(G)
    return float(np.sqrt(max(w[0], 0.0)))


def orthonormal_complement(U):
    """Orthonormal basis ``U_perp`` of the orthogonal complement of ``span(U)``.

    ``[U, U_perp]`` is orthogonal and ``U_perp U_perp^T = I - U U^T``.
    """
    U = as_frame(U)
    n, r = U.shape
    if r >= n:
        raise ShapeError(f"no complement for a square frame of shape {U.shape}")
    Q, _ = np.linalg.qr(U, mode="complete")
    return frozen(Q[:, r:])


def random_stiefel(n, r, seed):
    """Orthonormalized standard-Gaussian ``n x r`` frame, deterministic per seed."""
    if not n >= r >= 1:
        raise ShapeError(f"random_stiefel needs n >= r >= 1, got n={n}, r={r}")
    G = make_rng(seed).standard_normal((n, r))
    return qr_thin(G)[0]
