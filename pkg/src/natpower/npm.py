"""Natural power method iterations and the subspace diagnostics built on them.

One step of the plain iteration maps a frame ``U`` (n x r, orthonormal
columns) to

    A U (U^T A^T A U)^{-1/2}

which is again orthonormal and spans ``A span(U)``. Repeating it drives
``span(U)`` towards the invariant subspace of the ``r`` eigenvalues with the
largest moduli, at the geometric rate ``|lambda_{r+1}| / |lambda_r|``. The
frame itself may keep rotating inside that subspace; the stationary variant
multiplies by an extra orthogonal factor so that exact invariant frames become
fixed points.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NearSingular, ShapeError
from .linalg import (
    INV_SQRT_FLOOR,
    as_frame,
    as_matrix,
    frozen,
    inv_sqrt_spd,
    spectral_norm,
)
from .oracle import general_eig

__all__ = [
    "NpmConfig",
    "NpmRunReport",
    "SubspaceProjector",
    "npm_step",
    "npm_stationary_step",
    "npm_run",
    "reduced_npm_run",
    "subspace_distance",
    "partial_overlap_distance",
    "projected_matrix",
    "oja_residual",
    "domain_rank_check",
    "fit_rate",
]


@dataclass(frozen=True)
class NpmConfig:
    """Stopping rule and guards for :func:`npm_run`.

    The run stops once ``||U[k+1]U[k+1]^T - U[k]U[k]^T||_F <= projector_tol``
    or after ``max_iter`` steps.
    """

    max_iter: int = 10000
    projector_tol: float = 1e-12
    z_floor: float = INV_SQRT_FLOOR

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.projector_tol > 0:
            raise ValueError("projector_tol must be positive")
        if not self.z_floor > 0:
            raise ValueError("z_floor must be positive")


@dataclass(frozen=True)
class SubspaceProjector:
    """Orthogonal projector onto an ``rank``-dimensional subspace of R^n."""

    matrix: np.ndarray
    rank: int

    def __post_init__(self):
        P = as_matrix(self.matrix, "projector")
        n = P.shape[0]
        if P.shape != (n, n):
            raise ShapeError(f"projector must be square, got {P.shape}")
        if np.linalg.norm(P - P.T) > 1e-10:
            raise ValueError("projector is not symmetric")
        if np.linalg.norm(P @ P - P) > 1e-9:
            raise ValueError("projector is not idempotent")
        if abs(np.trace(P) - self.rank) > 1e-8:
            raise ValueError(f"projector trace {np.trace(P):.6g} != rank {self.rank}")
        object.__setattr__(self, "matrix", P)

    @classmethod
    def from_basis(cls, X):
        """Projector onto ``span(X)`` for any full-column-rank ``X``."""
        X = as_matrix(X, "basis")
        Q, _ = np.linalg.qr(X)
        P = Q @ Q.T
        return cls(0.5 * (P + P.T), X.shape[1])

    @classmethod
    def from_frame(cls, U):
        U = as_frame(U)
        P = U @ U.T
        return cls(0.5 * (P + P.T), U.shape[1])


@dataclass(frozen=True)
class NpmRunReport:
    """Outcome of :func:`npm_run`.

    ``projector_deltas[k]`` and ``distances[k]`` describe the frame after step
    ``k + 1``; both have length ``iterations``. ``frames`` is only filled when
    the run was asked to keep them and then holds ``U[0], ..., U[iterations]``.
    """

    final_frame: np.ndarray
    iterations: int
    converged: bool
    projector_deltas: np.ndarray
    distances: Optional[np.ndarray] = None
    frames: tuple = field(default=(), repr=False)


def _conform(A, U):
    A = as_matrix(A, "A")
    U = as_frame(U, name="U")
    n = A.shape[0]
    if A.shape != (n, n) or U.shape[0] != n:
        raise ShapeError(f"A {A.shape} and U {U.shape} do not conform")
    return A, U


def npm_step(A, U, z_floor=INV_SQRT_FLOOR):
    """One natural power step ``A U (U^T A^T A U)^{-1/2}``.

    Raises
    ------
    NearSingular
        If ``U^T A^T A U`` has an eigenvalue at or below ``z_floor`` times its largest.
    """
    A, U = _conform(A, U)
    AU = A @ U
    return frozen(AU @ inv_sqrt_spd(AU.T @ AU, z_floor))


def npm_stationary_step(A, U, z_floor=INV_SQRT_FLOOR):
    """Natural power step followed by the orthogonal correction ``W``.

    With ``X = U^T A U`` the correction is ``W = (X^T X)^{-1/2} X^T``, so the
    output spans the same subspace as :func:`npm_step` and an exact invariant
    frame (``A U = U X``) is mapped to itself.

    Raises
    ------
    NearSingular
        If ``U^T A^T A U`` or ``X^T X`` fails the ``z_floor`` test.
    """
    A, U = _conform(A, U)
    AU = A @ U
    X = U.T @ AU
    # W = (X^T X)^{-1/2} X^T equals R P^T for X = P diag(s) R^T; the SVD route
    # keeps W orthogonal even when X is badly conditioned
    P, s, Rt = np.linalg.svd(X)
    if s[0] == 0 or s[-1] ** 2 <= z_floor * s[0] ** 2:
        raise NearSingular(f"U^T A U is numerically singular (sigma_min = {s[-1]:.3e})")
    W = Rt.T @ P.T
    return frozen(AU @ inv_sqrt_spd(AU.T @ AU, z_floor) @ W)


_STEPS = {"plain": npm_step, "stationary": npm_stationary_step}


def npm_run(A, U0, cfg=None, variant="plain", reference=None, keep_frames=False):
    """Iterate a natural power step until the projector stagnates.

    Parameters
    ----------
    A : array_like, shape (n, n)
    U0 : array_like, shape (n, r)
        Orthonormal starting frame.
    cfg : NpmConfig, optional
    variant : {"plain", "stationary"}
    reference : SubspaceProjector, optional
        When given, the spectral-norm distance of every iterate to it is recorded.
    keep_frames : bool
        Store every iterate in the report.

    Returns
    -------
    NpmRunReport

    Raises
    ------
    NearSingular
        With ``iteration`` set to the failing step (1-based).
    """
    cfg = cfg or NpmConfig()
    step = _STEPS[variant]
    A, U = _conform(A, U0)
    P = U @ U.T
    deltas, dists, frames = [], [], [U] if keep_frames else None
    converged = False
    k = 0
    while k < cfg.max_iter:
        try:
            U = step(A, U, cfg.z_floor)
        except NearSingular as exc:
            raise NearSingular(f"step {k + 1}: {exc}", iteration=k + 1) from exc
        k += 1
        P_next = U @ U.T
        deltas.append(np.linalg.norm(P_next - P))
        P = P_next
        if reference is not None:
            dists.append(subspace_distance(U, reference))
        if keep_frames:
            frames.append(U)
        if deltas[-1] <= cfg.projector_tol:
            converged = True
            break
    return NpmRunReport(
        final_frame=U,
        iterations=k,
        converged=converged,
        projector_deltas=frozen(deltas),
        distances=frozen(dists) if reference is not None else None,
        frames=tuple(frames) if keep_frames else (),
    )


def reduced_npm_run(A_proj, u0, cfg=None, variant="plain", reference=None, keep_frames=False):
    """Natural power method on an already-compressed ``r x r`` matrix.

    ``A_proj`` is typically ``U_r^T A U_r`` for a converged ``r``-frame; the
    run extracts an ``m``-dominant subspace (``m < r``) without touching the
    original ``n x n`` matrix. Lift the result with ``U_r @ report.final_frame``.
    """
    A_proj = as_matrix(A_proj, "A_proj")
    u0 = as_frame(u0, name="u0")
    if u0.shape[1] >= A_proj.shape[0]:
        raise ShapeError(f"reduced run needs m < r, got u0 {u0.shape}")
    return npm_run(A_proj, u0, cfg, variant, reference, keep_frames)


def subspace_distance(U, P_ref):
    """``||U U^T - P_ref||_2``; for equal ranks this is the sine of the largest principal angle."""
    U = as_frame(U)
    P = P_ref.matrix if isinstance(P_ref, SubspaceProjector) else as_matrix(P_ref)
    if P.shape != (U.shape[0], U.shape[0]):
        raise ShapeError(f"frame {U.shape} and projector {P.shape} do not conform")
    return spectral_norm(U @ U.T - P)


def partial_overlap_distance(U, P_ref):
    """``||U U^T - P U U^T P||_2``, zero exactly when ``span(U)`` lies inside ``range(P)``."""
    U = as_frame(U)
    P = P_ref.matrix if isinstance(P_ref, SubspaceProjector) else as_matrix(P_ref)
    if P.shape != (U.shape[0], U.shape[0]):
        raise ShapeError(f"frame {U.shape} and projector {P.shape} do not conform")
    UU = U @ U.T
    return spectral_norm(UU - P @ UU @ P)


def projected_matrix(A, U):
    """Compression ``U^T A U``."""
    A, U = _conform(A, U)
    return frozen(U.T @ A @ U)


def oja_residual(A, U):
    """``||(I - U U^T) A U||_2``; vanishes exactly when ``span(U)`` is ``A``-invariant."""
    A, U = _conform(A, U)
    AU = A @ U
    return spectral_norm(AU - U @ (U.T @ AU))


def domain_rank_check(A, U, m, tol=1e-10):
    """Check that ``U`` lies in the domain of attraction of the ``m``-dominant subspace.

    Writes ``U = Psi K`` in the eigenvector basis of ``A`` and tests whether the
    leading ``m x r`` block of ``K`` has full column rank.

    Returns
    -------
    ok : bool
    sigma_min : float
        Smallest singular value of the leading block.
    """
    A, U = _conform(A, U)
    r = U.shape[1]
    if not r <= m <= A.shape[0]:
        raise ShapeError(f"need r <= m <= n, got r={r}, m={m}, n={A.shape[0]}")
    spec = general_eig(A)
    K = np.linalg.solve(spec.vectors, U.astype(complex))
    sigma = np.linalg.svd(K[:m], compute_uv=False)
    smin = float(sigma[r - 1]) if len(sigma) >= r else 0.0
    return smin > tol, smin


def fit_rate(distances, lo=1e-10, hi=1e-2):
    """Geometric decay ratio fitted to the part of ``distances`` inside ``[lo, hi]``.

    Least squares on ``log(distance)`` against the step index; returns
    ``exp(slope)``. Needs at least three points in the window.
    """
    d = np.asarray(distances, dtype=float)
    k = np.flatnonzero((d >= lo) & (d <= hi))
    if k.size < 3:
        raise ValueError(f"only {k.size} points inside [{lo:g}, {hi:g}]")
    slope = np.polyfit(k.astype(float), np.log(d[k]), 1)[0]
    return float(np.exp(slope))
