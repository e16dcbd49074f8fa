"""Reproducible experiment runs on the 3 x 3 test matrix ``A_alpha``.

Every experiment writes a long-format CSV. Series experiments use the header
``experiment,alpha,k,value``; the check suites (``mor-check`` and
``lemma-checks``) use ``experiment,alpha,check,value,tolerance,status`` where
``status`` is ``pass``, ``fail`` or ``skip``.
"""

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NearSingular
from .linalg import inv_sqrt_spd, orthonormal_complement, qr_thin
from .ltv import B_PLANT, C_PLANT, LtvScenario, a_alpha, ltv_simulate
from .mor import (
    LtiSystem,
    dual_subspaces,
    gramian_projection_residual,
    minor_left_subspace_check,
    observability_rank,
    reduced_models,
    similarity_block_form,
    staircase_rank,
    unit_circle_points,
)
from .npm import (
    NpmConfig,
    SubspaceProjector,
    domain_rank_check,
    fit_rate,
    npm_run,
    npm_stationary_step,
    npm_step,
    oja_residual,
    partial_overlap_distance,
    projected_matrix,
    subspace_distance,
)
from .oracle import general_eig

__all__ = [
    "EXPERIMENTS",
    "SERIES_HEADER",
    "CHECK_HEADER",
    "ExperimentSpec",
    "psi_vectors",
    "initial_frame",
    "plane_projector",
    "multiset_distance",
    "series",
    "mor_check_rows",
    "lemma_check_rows",
    "run_experiment",
]

SERIES_HEADER = ("experiment", "alpha", "k", "value")
CHECK_HEADER = ("experiment", "alpha", "check", "value", "tolerance", "status")
DEFAULT_ALPHAS = (0.0, 0.2, 0.5, 0.9)
EXPERIMENTS = (
    "fig1", "fig2", "fig3", "fig3-modified", "fig4", "fig5", "mor-check", "lemma-checks",
)
_DEFAULT_HORIZON = {"fig4": 500, "fig5": 500}


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    alphas: tuple = DEFAULT_ALPHAS
    horizon: Optional[int] = None
    seed: int = 0
    out_path: Optional[str] = None

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.name!r}; choose from {', '.join(EXPERIMENTS)}")
        if not self.alphas:
            raise ValueError("alpha list is empty")
        for a in self.alphas:
            if not np.isfinite(a) or abs(a) >= 1:
                raise ValueError(f"alpha = {a} outside (-1, 1): the cut at r = 2 loses its gap")
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    @property
    def steps(self):
        return self.horizon or _DEFAULT_HORIZON.get(self.name, 100)


def psi_vectors(alpha):
    """Closed-form unit eigenvectors of ``A_alpha`` for eigenvalues ``1, -1, alpha``."""
    a = alpha
    psi1 = np.array([1.0, 0.0, 0.0])
    psi2 = np.array([1 + 2 * a, 2.0, -2 * (1 + a)]) / np.sqrt(8 * a * a + 12 * a + 9)
    psi3 = np.array([1.0, a - 1, 0.0]) / np.sqrt(2 - 2 * a + a * a)
    return psi1, psi2, psi3


def initial_frame(alpha, r=2, weight1=1.0):
    """Starting frame ``X (X^T X)^{-1/2}`` with ``X = [w psi1 + psi2 + psi3, psi2 + psi3]``.

    For ``r = 1`` only the first column of ``X`` is used, normalized.
    """
    p1, p2, p3 = psi_vectors(alpha)
    X = np.column_stack([weight1 * p1 + p2 + p3, p2 + p3])[:, :r]
    return X @ inv_sqrt_spd(X.T @ X)


def plane_projector(alpha):
    p1, p2, _ = psi_vectors(alpha)
    return SubspaceProjector.from_basis(np.column_stack([p1, p2]))


def multiset_distance(a, b):
    """Largest gap under the best one-to-one matching of two complex multisets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        return np.inf
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max())


def _frames(A, U0, steps):
    out = [U0]
    U = U0
    for _ in range(steps):
        U = npm_step(A, U)
        out.append(U)
    return out


def series(name, alpha, steps, seed=0):
    """Values ``(k, value)`` for one figure experiment at one ``alpha``."""
    A = a_alpha(alpha)
    if name == "fig1":
        P = plane_projector(alpha)
        return [(k, subspace_distance(U, P)) for k, U in enumerate(_frames(A, initial_frame(alpha), steps))]
    if name == "fig2":
        P = plane_projector(alpha)
        frames = _frames(A, initial_frame(alpha, r=1), steps)
        return [(k, partial_overlap_distance(U, P)) for k, U in enumerate(frames)]
    if name in ("fig3", "fig3-modified"):
        w = 0.1 if name == "fig3-modified" else 1.0
        frames = _frames(A, initial_frame(alpha, r=1, weight1=w), steps)
        return [(k, float(projected_matrix(A, U)[0, 0])) for k, U in enumerate(frames)]
    if name in ("fig4", "fig5"):
        log = ltv_simulate(LtvScenario(alpha=alpha, horizon=steps, seed=seed))
        col = "norm_x" if name == "fig4" else "norm_err"
        return list(enumerate(log.column(col).tolist()))
    raise ValueError(f"{name!r} is not a series experiment")


def _row(check, value, tol, ok):
    return check, value, tol, "pass" if ok else "fail"


def mor_check_rows(sys, r, seed=0, cfg=None):
    """Reduction identities for ``sys`` at order ``r``: ``(check, value, tolerance, status)`` rows."""
    cfg = cfg or NpmConfig()
    A, n = sys.A, sys.n
    rows = []
    duals = dual_subspaces(A, r, cfg, seed)
    Ur, Vr = duals.Ur, duals.Vr
    rows.append(_row("cross_gram_sigma_min", duals.cross_gram_sigma_min, 1e-10,
                     duals.cross_gram_sigma_min > 1e-10))

    spec = general_eig(A)
    A_U, _, A_perp, lower = similarity_block_form(A, Ur)
    rows.append(_row("block_lower_residual", lower, 1e-8, lower < 1e-8))
    split = multiset_distance(
        np.concatenate([general_eig(A_U).eigenvalues, general_eig(A_perp).eigenvalues]),
        spec.eigenvalues,
    )
    rows.append(_row("spectrum_split", split, 1e-6, split < 1e-6))
    keep = multiset_distance(general_eig(A_U).eigenvalues, spec.eigenvalues[:r])
    rows.append(_row("dominant_eigenvalues", keep, 1e-6, keep < 1e-6))

    obs, reach = gramian_projection_residual(sys, Ur, Vr)
    rows.append(_row("gramian_observability", obs, 1e-8, obs < 1e-8))
    rows.append(_row("gramian_reachability", reach, 1e-8, reach < 1e-8))

    u_side, v_side = reduced_models(sys, duals)
    tf_gap = max(
        float(np.abs(u_side.transfer(z) - v_side.transfer(z)).max()) for z in unit_circle_points()
    )
    rows.append(_row("transfer_agreement", tf_gap, 1e-8, tf_gap < 1e-8))

    full_ranks = (staircase_rank(A, sys.B), observability_rank(A, sys.C))
    if full_ranks == (n, n):
        for tag, red in (("U", u_side), ("V", v_side)):
            ranks = (staircase_rank(red.Ar, red.Br), observability_rank(red.Ar, red.Cr))
            rows.append(_row(f"reduced_ranks_{tag}", float(min(ranks)), float(r), ranks == (r, r)))
    else:
        rows.append(("reduced_ranks", float(min(full_ranks)), float(n), "skip"))

    Uperp = orthonormal_complement(Ur)
    try:
        d = minor_left_subspace_check(A, Uperp, cfg, seed)
        rows.append(_row("minor_left_subspace", d, 1e-6, d < 1e-6))
    except NearSingular:
        rows.append(("minor_left_subspace", float("nan"), 1e-6, "skip"))
    return rows


def lemma_check_rows(alpha):
    """Convergence-theory checks on ``A_alpha``: ``(check, value, tolerance, status)`` rows."""
    A = a_alpha(alpha)
    psis = psi_vectors(alpha)
    lams = (1.0, -1.0, alpha)
    rows = []

    res = max(float(np.linalg.norm(A @ p - lam * p)) for p, lam in zip(psis, lams))
    rows.append(_row("psi_formula_residual", res, 1e-12, res <= 1e-12))
    spec = general_eig(A)
    mis = max(
        float(np.linalg.norm(np.outer(p, p) - np.outer(v, v)))
        for p, v in zip(psis, spec.vectors.real.T)
    )
    rows.append(_row("psi_vs_oracle", mis, 1e-10, mis <= 1e-10))

    U0 = initial_frame(alpha)
    ok, smin = domain_rank_check(A, U0, 2)
    rows.append(_row("domain_membership_sigma_min", smin, 1e-10, ok))

    P = plane_projector(alpha)
    rep = npm_run(A, U0, NpmConfig(), reference=P, keep_frames=True)
    drift = max(float(np.linalg.norm(U.T @ U - np.eye(2))) for U in rep.frames)
    rows.append(_row("stiefel_preservation", drift, 1e-10, drift <= 1e-10))
    if alpha == 0.0:
        d1 = float(rep.distances[0])
        rows.append(_row("one_step_convergence", d1, 1e-10, d1 <= 1e-10))
    else:
        rate = fit_rate(rep.distances)
        rel = abs(rate - abs(alpha)) / abs(alpha)
        rows.append(_row("rate_relative_error", rel, 0.15, rel <= 0.15))
    Ubar = rep.final_frame
    kept = multiset_distance(np.linalg.eigvals(projected_matrix(A, Ubar)), [1.0, -1.0])
    rows.append(_row("eigenvalue_preservation", kept, 1e-6, kept <= 1e-6))
    oja = oja_residual(A, Ubar)
    rows.append(_row("oja_residual", oja, 1e-8, oja <= 1e-8))

    Ub, _ = qr_thin(np.column_stack(psis[:2]))
    fix = float(np.linalg.norm(npm_stationary_step(A, Ub) - Ub))
    rows.append(_row("stationary_fixed_point", fix, 1e-9, fix <= 1e-9))
    U1, U2 = npm_step(A, U0), npm_stationary_step(A, U0)
    agree = float(np.abs(U1 @ U1.T - U2 @ U2.T).max())
    rows.append(_row("variant_projector_agreement", agree, 1e-12, agree <= 1e-12))
    return rows


def _fmt(v):
    return repr(float(v))


def run_experiment(spec):
    """Run ``spec`` and write its CSV to ``spec.out_path`` (if set).

    Returns
    -------
    status : int
        0 when everything ran (and every check passed), 1 when a check failed.
    rows : list of tuple
        The CSV rows, header excluded, already formatted as strings.
    """
    alphas = sorted(float(a) for a in spec.alphas)
    rows = []
    status = 0
    if spec.name in ("mor-check", "lemma-checks"):
        header = CHECK_HEADER
        for a in alphas:
            if spec.name == "lemma-checks":
                checks = lemma_check_rows(a)
            else:
                checks = mor_check_rows(LtiSystem(a_alpha(a), B_PLANT, C_PLANT), 2, spec.seed)
            for check, value, tol, verdict in checks:
                rows.append((spec.name, _fmt(a), check, _fmt(value), _fmt(tol), verdict))
                if verdict == "fail":
                    status = 1
    else:
        header = SERIES_HEADER
        for a in alphas:
            for k, v in series(spec.name, a, spec.steps, spec.seed):
                rows.append((spec.name, _fmt(a), str(k), _fmt(v)))
    if spec.out_path is not None:
        with open(spec.out_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    return status, rows
