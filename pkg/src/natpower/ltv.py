"""Low-rank observer-based regulation of a slowly rotating LTV plant.

The plant is ``x[k+1] = A[k] x[k] + B u[k]``, ``y[k] = C x[k]`` with
``A[k] = Q[k]^T A_alpha Q[k]`` and ``Q[k]`` a product of two slow Givens
rotations. At every sample the natural power method tracks a right frame
``U[k]`` (dominant subspace of ``A[k]``) and a left frame ``V[k]``
(dominant subspace of ``A[k]^T``); 2 x 2 gains are then placed on the
compressions and lifted back:

    xhat[k+1] = A[k] xhat + B u + U L (y - C xhat)
    u[k]      = -F V^T xhat

so that ``A_U - L C_U`` and ``A_V - B_V F`` carry the target poles.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import NearSingular, ShapeError, Uncontrollable, Unobservable
from .linalg import as_matrix, frozen, random_stiefel
from .npm import npm_step, subspace_distance
from .oracle import general_eig

__all__ = [
    "B_PLANT",
    "C_PLANT",
    "LtvScenario",
    "StepRecord",
    "TrajectoryLog",
    "TRAJECTORY_COLUMNS",
    "a_alpha",
    "rotation_Q",
    "plant_at",
    "place_poles_si",
    "place_observer_si",
    "ltv_simulate",
]

B_PLANT = frozen([[0.0], [0.0], [1.0]])
C_PLANT = frozen([[1.0, 0.0, 0.0]])
TRAJECTORY_COLUMNS = ("k", "norm_x", "norm_err", "u", "dist_U", "dist_V", "gain_flag")


def a_alpha(alpha):
    """Upper triangular test matrix with eigenvalues ``1, alpha, -1``."""
    return frozen([[1.0, 1.0, 2.0], [0.0, alpha, 1.0], [0.0, 0.0, -1.0]])


def rotation_Q(k, omega1, omega2):
    """``Q1[k] Q2[k]``: rotation by ``omega1 k`` in the (1, 2) plane, then ``omega2 k`` in (2, 3)."""
    c1, s1 = np.cos(omega1 * k), np.sin(omega1 * k)
    c2, s2 = np.cos(omega2 * k), np.sin(omega2 * k)
    Q1 = np.array([[c1, -s1, 0.0], [s1, c1, 0.0], [0.0, 0.0, 1.0]])
    Q2 = np.array([[1.0, 0.0, 0.0], [0.0, c2, -s2], [0.0, s2, c2]])
    return frozen(Q1 @ Q2)


@dataclass(frozen=True)
class LtvScenario:
    alpha: float
    omega1: float = 0.01
    omega2: float = 0.03
    horizon: int = 500
    pole_targets: tuple = (0.5, 0.7)
    x0: tuple = (1.0, 1.0, 1.0)
    xhat0: tuple = (0.0, 0.0, 0.0)
    seed: int = 0
    npm_warmup_iters: int = 200
    npm_iters_per_step: int = 1
    r: int = 2

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.npm_iters_per_step < 1:
            raise ValueError("npm_iters_per_step must be >= 1")
        if self.npm_warmup_iters < 0:
            raise ValueError("npm_warmup_iters must be >= 0")
        if len(self.pole_targets) != self.r or any(abs(p) >= 1 for p in self.pole_targets):
            raise ValueError("need r pole targets strictly inside the unit disk")


def plant_at(scenario, k):
    Q = rotation_Q(k, scenario.omega1, scenario.omega2)
    return frozen(Q.T @ a_alpha(scenario.alpha) @ Q)


def _ackermann(A, B, targets, exc):
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    n = A.shape[0]
    if B.shape != (n, 1) or len(targets) != n:
        raise ShapeError(f"single-input placement needs B of shape ({n}, 1) and {n} targets")
    K = np.hstack([np.linalg.matrix_power(A, i) @ B for i in range(n)])
    s = np.linalg.svd(K, compute_uv=False)
    if s[-1] <= 1e-10:
        raise exc(f"Krylov matrix is singular (sigma_min = {s[-1]:.3e})")
    coeffs = np.real(np.poly(targets))
    pA = sum(c * np.linalg.matrix_power(A, n - i) for i, c in enumerate(coeffs))
    last = np.zeros((1, n))
    last[0, -1] = 1.0
    return last @ np.linalg.solve(K, pA)


def place_poles_si(A, B, targets):
    """Ackermann gain ``F`` (1 x n) so that ``A - B F`` has the target characteristic polynomial.

    Raises
    ------
    Uncontrollable
        If ``[B, AB, ...]`` has a singular value at or below 1e-10.
    """
    return frozen(_ackermann(A, B, targets, Uncontrollable))


def place_observer_si(A, C, targets):
    """Observer gain ``L`` (n x 1) so that ``A - L C`` has the target characteristic polynomial."""
    A = as_matrix(A, "A")
    C = as_matrix(C, "C")
    return frozen(_ackermann(A.T, C.T, targets, Unobservable).T)


@dataclass(frozen=True)
class StepRecord:
    k: int
    norm_x: float
    norm_err: float
    u: float
    dist_U: float
    dist_V: float
    gain_flag: bool
    L: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    L_lift: np.ndarray = field(repr=False)
    F_lift: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False, default=None)
    V: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class TrajectoryLog:
    scenario: LtvScenario
    records: tuple

    def column(self, name):
        return np.array([getattr(rec, name) for rec in self.records], dtype=float)

    def rows(self):
        for rec in self.records:
            yield (
                rec.k,
                repr(float(rec.norm_x)),
                repr(float(rec.norm_err)),
                repr(float(rec.u)),
                repr(float(rec.dist_U)),
                repr(float(rec.dist_V)),
                int(rec.gain_flag),
            )

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJECTORY_COLUMNS)
            w.writerows(self.rows())


def ltv_simulate(scenario):
    """Closed-loop simulation of plant, observer and tracked frames.

    A failed gain placement does not stop the run: the previous lifted gains
    (``U L`` and ``F V^T``) are held and the step is flagged. Before the
    first sample both frames get ``npm_warmup_iters`` steps on ``A[0]``.

    Raises
    ------
    NearSingular
        From the frame updates, with ``iteration`` set to the sample index.
    """
    sc = scenario
    r = sc.r
    A0 = a_alpha(sc.alpha)
    s_u, s_v = np.random.SeedSequence(sc.seed).spawn(2)
    U = random_stiefel(3, r, s_u)
    V = random_stiefel(3, r, s_v)
    Ak = plant_at(sc, 0)
    for _ in range(sc.npm_warmup_iters):
        U = npm_step(Ak, U)
        V = npm_step(Ak.T, V)

    # oracle subspaces rotate with the plant
    P_right = general_eig(A0).dominant_projector(r)
    P_left = general_eig(A0.T).dominant_projector(r)

    x = np.array(sc.x0, dtype=float)
    xh = np.array(sc.xhat0, dtype=float)
    B, C = B_PLANT, C_PLANT
    L = np.zeros((r, 1))
    F = np.zeros((1, r))
    L_lift = np.zeros((3, 1))
    F_lift = np.zeros((1, 3))
    records = []
    for k in range(sc.horizon):
        Q = rotation_Q(k, sc.omega1, sc.omega2)
        Ak = Q.T @ A0 @ Q
        try:
            for _ in range(sc.npm_iters_per_step):
                U = npm_step(Ak, U)
                V = npm_step(Ak.T, V)
        except NearSingular as exc:
            raise NearSingular(f"sample {k}: {exc}", iteration=k) from exc

        flag = False
        try:
            L = place_observer_si(U.T @ Ak @ U, C @ U, sc.pole_targets)
            L_lift = U @ L
        except Unobservable:
            flag = True
        try:
            F = place_poles_si(V.T @ Ak @ V, V.T @ B, sc.pole_targets)
            F_lift = F @ V.T
        except Uncontrollable:
            flag = True

        u = -(F_lift @ xh)
        y = C @ x
        records.append(
            StepRecord(
                k=k,
                norm_x=float(np.linalg.norm(x)),
                norm_err=float(np.linalg.norm(x - xh)),
                u=float(u[0]),
                dist_U=subspace_distance(U, Q.T @ P_right @ Q),
                dist_V=subspace_distance(V, Q.T @ P_left @ Q),
                gain_flag=flag,
                L=frozen(L),
                F=frozen(F),
                L_lift=frozen(L_lift),
                F_lift=frozen(F_lift),
                U=U,
                V=V,
            )
        )
        x_next = Ak @ x + B @ u
        xh = Ak @ xh + B @ u + L_lift @ (y - C @ xh)
        x = x_next
    return TrajectoryLog(sc, tuple(records))
