"""Model order reduction of discrete-time LTI systems from dominant subspaces.

For ``x[k+1] = A x[k] + B u[k], y[k] = C x[k]`` the natural power method
applied to ``A`` gives a right dominant frame ``Ur`` and applied to ``A^T`` a
left dominant frame ``Vr``. Both are invariant (``A Ur = Ur A_U`` and
``Vr^T A = A_V Vr^T``), which makes the compressions below exact in the sense
that finite-horizon Gramians and the transfer function restricted to the
dominant modes are reproduced.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CrossGramSingular, NearSingular, ResolventSingular, ShapeError
from .linalg import as_frame, as_matrix, frozen, orthonormal_complement, random_stiefel, spectral_norm
from .npm import NpmConfig, SubspaceProjector, npm_run, subspace_distance

__all__ = [
    "LtiSystem",
    "ReducedRealization",
    "DualSubspaces",
    "CROSS_GRAM_TOL",
    "similarity_block_form",
    "dual_subspaces",
    "minor_left_subspace_check",
    "reachability_gramian",
    "observability_gramian",
    "gramian_projection_residual",
    "reduced_models",
    "transfer_function_eval",
    "staircase_rank",
    "observability_rank",
    "unit_circle_points",
]

CROSS_GRAM_TOL = 1e-10


@dataclass(frozen=True)
class LtiSystem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise ShapeError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise ShapeError(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise ShapeError(f"C has {C.shape[1]} columns, expected {n}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def n(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class ReducedRealization:
    """Reduced triple; ``basis`` is ``"U"`` or ``"V"`` for the side whose compression gives ``Ar``."""

    Ar: np.ndarray
    Br: np.ndarray
    Cr: np.ndarray
    basis: str

    def transfer(self, z):
        return transfer_function_eval(self.Ar, self.Br, self.Cr, z)


@dataclass(frozen=True)
class DualSubspaces:
    """Right (``Ur``, from ``A``) and left (``Vr``, from ``A^T``) dominant frames."""

    Ur: np.ndarray
    Vr: np.ndarray
    cross_gram: np.ndarray
    cross_gram_sigma_min: float
    right_report: object = None
    left_report: object = None


def similarity_block_form(A, Ur):
    """Blocks of ``Q^T A Q`` for ``Q = [Ur, Ur_perp]``.

    Returns
    -------
    A_U : (r, r) ndarray
    coupling : (r, n - r) ndarray
        ``Ur^T A Ur_perp``.
    A_perp : (n - r, n - r) ndarray
    lower_residual : float
        ``||Ur_perp^T A Ur||_2``; zero when ``span(Ur)`` is invariant.
    """
    A = as_matrix(A, "A")
    Ur = as_frame(Ur, name="Ur")
    Up = orthonormal_complement(Ur)
    Q = np.hstack([Ur, Up])
    T = Q.T @ A @ Q
    r = Ur.shape[1]
    return frozen(T[:r, :r]), frozen(T[:r, r:]), frozen(T[r:, r:]), spectral_norm(T[r:, :r])


def dual_subspaces(A, r, cfg=None, seed=0):
    """Run the natural power method on ``A`` and ``A^T`` from independent random frames.

    The two starting frames come from child seeds of ``seed``, so the result
    does not depend on the order the runs are executed in.

    Raises
    ------
    CrossGramSingular
        If the smallest singular value of ``Vr^T Ur`` is at most ``CROSS_GRAM_TOL``.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    cfg = cfg or NpmConfig()
    s_right, s_left = np.random.SeedSequence(seed).spawn(2)
    U0 = random_stiefel(n, r, s_right)
    V0 = random_stiefel(n, r, s_left)
    right = npm_run(A, U0, cfg)
    left = npm_run(A.T, V0, cfg)
    Ur, Vr = right.final_frame, left.final_frame
    G = Vr.T @ Ur
    smin = float(np.linalg.svd(G, compute_uv=False)[-1])
    if smin <= CROSS_GRAM_TOL:
        raise CrossGramSingular(
            f"V^T U has smallest singular value {smin:.3e}"
            f" (converged: right={right.converged}, left={left.converged})"
        )
    return DualSubspaces(Ur, Vr, frozen(G), smin, right, left)


def minor_left_subspace_check(A, Uperp, cfg=None, seed=0):
    """Distance between ``span(Uperp)`` and the dominant subspace of ``A^{-T}``.

    ``Uperp`` should be the orthogonal complement of a converged right
    dominant frame; a value near zero confirms it spans the minor left
    eigenspace of ``A``.

    Raises
    ------
    NearSingular
        If ``A`` is numerically singular.
    """
    A = as_matrix(A, "A")
    Uperp = as_frame(Uperp, name="Uperp")
    n = A.shape[0]
    smin = np.linalg.svd(A, compute_uv=False)[-1]
    if smin <= 1e-12 * max(np.linalg.norm(A, 2), np.finfo(float).tiny):
        raise NearSingular(f"A is numerically singular (sigma_min = {smin:.3e})")
    Ainv_T = np.linalg.solve(A, np.eye(n)).T
    W0 = random_stiefel(n, Uperp.shape[1], seed)
    rep = npm_run(Ainv_T, W0, cfg or NpmConfig())
    return subspace_distance(rep.final_frame, SubspaceProjector.from_frame(Uperp))


def reachability_gramian(A, B, N=None):
    """Finite sum ``sum_{i=0}^{N-1} A^i B B^T (A^T)^i`` (``N`` defaults to ``n``)."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    N = A.shape[0] if N is None else N
    if N < 1:
        raise ValueError("horizon must be >= 1")
    W = np.zeros((A.shape[0], A.shape[0]))
    X = B
    for _ in range(N):
        W += X @ X.T
        X = A @ X
    return frozen(0.5 * (W + W.T))


def observability_gramian(A, C, N=None):
    """Finite sum ``sum_{i=0}^{N-1} (A^T)^i C^T C A^i`` (``N`` defaults to ``n``)."""
    return reachability_gramian(as_matrix(A).T, as_matrix(C).T, N)


def gramian_projection_residual(sys, Ur, Vr):
    """Residuals of the Gramian compression identities at frames ``Ur``, ``Vr``.

    Both full and reduced sums run over ``i = 0 .. n-1`` with ``n`` the full order.

    Returns
    -------
    obs_residual : float
        ``||Ur^T Wo(A, C) Ur - Wo(A_U, C Ur)||_2``
    reach_residual : float
        ``||Vr^T Wr(A, B) Vr - Wr(A_V, Vr^T B)||_2``
    """
    Ur = as_frame(Ur, name="Ur")
    Vr = as_frame(Vr, name="Vr")
    A, B, C, n = sys.A, sys.B, sys.C, sys.n
    A_U = Ur.T @ A @ Ur
    A_V = Vr.T @ A @ Vr
    obs = Ur.T @ observability_gramian(A, C, n) @ Ur - observability_gramian(A_U, C @ Ur, n)
    reach = Vr.T @ reachability_gramian(A, B, n) @ Vr - reachability_gramian(A_V, Vr.T @ B, n)
    return spectral_norm(obs), spectral_norm(reach)


def reduced_models(sys, duals):
    """The two oblique reduced realizations built from a pair of dual frames.

    With ``M = Vr^T Ur``:

    * U-side: ``(Ur^T A Ur, M^{-1} Vr^T B, C Ur)``
    * V-side: ``(Vr^T A Vr, Vr^T B, C Ur M^{-1})``

    The two are similar through ``M`` and share one transfer function.
    """
    Ur, Vr = duals.Ur, duals.Vr
    M = Vr.T @ Ur
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if smin <= CROSS_GRAM_TOL:
        raise CrossGramSingular(f"V^T U has smallest singular value {smin:.3e}")
    VtB = Vr.T @ sys.B
    CU = sys.C @ Ur
    u_side = ReducedRealization(
        frozen(Ur.T @ sys.A @ Ur), frozen(np.linalg.solve(M, VtB)), frozen(CU), "U"
    )
    v_side = ReducedRealization(
        frozen(Vr.T @ sys.A @ Vr), frozen(VtB), frozen(np.linalg.solve(M.T, CU.T).T), "V"
    )
    return u_side, v_side


def transfer_function_eval(Ar, Br, Cr, z, tol=1e-12):
    """``Cr (z I - Ar)^{-1} Br`` at a complex point ``z``.

    Raises
    ------
    ResolventSingular
        If ``z I - Ar`` has a smallest singular value below ``tol`` relative to its norm.
    """
    Ar = as_matrix(Ar, "Ar")
    Br = as_matrix(Br, "Br")
    Cr = as_matrix(Cr, "Cr")
    R = z * np.eye(Ar.shape[0]) - Ar
    s = np.linalg.svd(R, compute_uv=False)
    if s[-1] <= tol * max(s[0], 1.0):
        raise ResolventSingular(f"zI - A is singular at z = {z}")
    return Cr @ np.linalg.solve(R, Br.astype(complex))


def staircase_rank(A, B, tol=1e-10):
    """Dimension of the Krylov span ``[B, AB, ..., A^{n-1} B]``.

    Built one block at a time; each new block is orthogonalized against the
    basis found so far and only directions with norm above ``tol`` (relative to
    the largest Krylov block norm seen) are kept.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    n = A.shape[0]
    basis = np.zeros((n, 0))
    X = B
    scale = max(np.linalg.norm(B, 2), np.finfo(float).tiny)
    for _ in range(n):
        scale = max(scale, np.linalg.norm(X, 2))
        Y = X - basis @ (basis.T @ X)
        Y = Y - basis @ (basis.T @ Y)
        if Y.size:
            Qy, s, _ = np.linalg.svd(Y, full_matrices=False)
            keep = s > tol * scale
            if np.any(keep):
                basis = np.hstack([basis, Qy[:, keep]])
        if basis.shape[1] == n:
            break
        X = A @ X
    return int(basis.shape[1])


def observability_rank(A, C, tol=1e-10):
    return staircase_rank(as_matrix(A).T, as_matrix(C).T, tol)


def unit_circle_points(count=16, radius=2.0):
    """``count`` equispaced points on ``|z| = radius``."""
    theta = 2.0 * np.pi * np.arange(count) / count
    return radius * np.exp(1j * theta)
