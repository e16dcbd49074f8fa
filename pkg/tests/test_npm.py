import numpy as np
import pytest

from natpower.errors import NearSingular, NotOrthonormal, ShapeError
from natpower.experiments import initial_frame, plane_projector, psi_vectors
from natpower.linalg import qr_thin, random_stiefel
from natpower.ltv import a_alpha
from natpower.npm import (
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
    reduced_npm_run,
    subspace_distance,
)
from natpower.oracle import general_eig


def _invariant_frame(alpha):
    B = general_eig(a_alpha(alpha)).dominant_basis(2)
    return B


class TestConfig:
    def test_defaults(self):
        cfg = NpmConfig()
        assert (cfg.max_iter, cfg.projector_tol) == (10000, 1e-12)

    @pytest.mark.parametrize("kw", [{"max_iter": 0}, {"projector_tol": 0.0}, {"z_floor": -1.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            NpmConfig(**kw)


class TestProjector:
    def test_from_basis_matches_frame(self):
        U = random_stiefel(5, 2, 3)
        a = SubspaceProjector.from_basis(U @ np.array([[2.0, 1.0], [0.0, 3.0]]))
        b = SubspaceProjector.from_frame(U)
        assert np.abs(a.matrix - b.matrix).max() < 1e-14
        assert a.rank == 2

    def test_rejects_non_projector(self):
        with pytest.raises(ValueError):
            SubspaceProjector(np.diag([1.0, 0.5]), 1)
        with pytest.raises(ValueError):
            SubspaceProjector(np.diag([1.0, 0.0]), 2)


class TestStep:
    def test_identity_matrix(self):
        U = random_stiefel(4, 2, 0)
        assert np.abs(npm_step(np.eye(4), U) - U).max() < 1e-15

    def test_hand_evaluation(self):
        # Z = [1 1] diag(4, 1) [1 1]^T / 2 = 2.5 ; A U / sqrt(Z) = [2, 1] / sqrt(5)
        U = np.array([[1.0], [1.0]]) / np.sqrt(2)
        out = npm_step(np.diag([2.0, 1.0]), U)
        np.testing.assert_allclose(out, np.array([[2.0], [1.0]]) / np.sqrt(5), atol=1e-15)

    def test_one_step_convergence_at_zero_alpha(self):
        U1 = npm_step(a_alpha(0.0), initial_frame(0.0))
        assert subspace_distance(U1, plane_projector(0.0)) <= 1e-10

    def test_singular_image_raises(self):
        A = np.diag([1.0, 0.0, 0.0])
        with pytest.raises(NearSingular):
            npm_step(A, np.eye(3)[:, 1:])

    def test_rejects_non_frame(self):
        with pytest.raises(NotOrthonormal):
            npm_step(np.eye(2), [[1.0], [1.0]])
        with pytest.raises(ShapeError):
            npm_step(np.eye(3), np.eye(2)[:, :1])


class TestStationaryStep:
    def test_identity_matrix(self):
        U = random_stiefel(4, 2, 1)
        assert np.abs(npm_stationary_step(np.eye(4), U) - U).max() < 1e-14

    @pytest.mark.parametrize("alpha", [0.0, 0.2, 0.5, 0.9])
    def test_invariant_frame_is_fixed(self, alpha):
        U = _invariant_frame(alpha)
        assert np.linalg.norm(npm_stationary_step(a_alpha(alpha), U) - U) <= 1e-9

    def test_plain_step_moves_invariant_frame(self):
        # A_U has eigenvalues 1 and -1, so it is not symmetric positive definite
        U = _invariant_frame(0.5)
        A = a_alpha(0.5)
        plain = npm_step(A, U)
        stat = npm_stationary_step(A, U)
        assert np.linalg.norm(plain - U) > 1e-3
        assert np.abs(plain @ plain.T - stat @ stat.T).max() <= 1e-12

    def test_hand_case_projector(self):
        A = np.diag([2.0, 1.0])
        U = np.array([[1.0], [1.0]]) / np.sqrt(2)
        a, b = npm_step(A, U), npm_stationary_step(A, U)
        assert np.abs(a @ a.T - b @ b.T).max() <= 1e-12

    def test_singular_compression_raises(self):
        # U^T A U = 0 while A U is full rank
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(NearSingular):
            npm_stationary_step(A, np.array([[1.0], [0.0]]))


class TestRun:
    @pytest.mark.parametrize("alpha", [0.2, 0.5])
    def test_rate_matches_alpha(self, alpha):
        rep = npm_run(a_alpha(alpha), initial_frame(alpha), reference=plane_projector(alpha))
        assert rep.converged
        assert fit_rate(rep.distances) == pytest.approx(alpha, rel=0.15)

    def test_symmetric_rate(self):
        A = np.diag([3.0, 2.0, 1.0])
        P = SubspaceProjector.from_basis(np.eye(3)[:, :2])
        rep = npm_run(A, random_stiefel(3, 2, 4), reference=P)
        assert rep.converged
        assert subspace_distance(rep.final_frame, P) < 1e-10
        assert fit_rate(rep.distances) == pytest.approx(0.5, rel=0.15)

    def test_identity_converges_immediately(self):
        U = random_stiefel(4, 2, 5)
        P = SubspaceProjector.from_frame(U)
        rep = npm_run(np.eye(4), U, reference=P)
        assert rep.converged and rep.iterations == 1
        assert rep.distances[0] < 1e-15

    def test_max_iter_reported(self):
        rep = npm_run(a_alpha(0.9), initial_frame(0.9), NpmConfig(max_iter=5))
        assert rep.iterations == 5 and not rep.converged
        assert len(rep.projector_deltas) == 5 and rep.distances is None

    def test_keep_frames(self):
        U0 = initial_frame(0.5)
        rep = npm_run(a_alpha(0.5), U0, NpmConfig(max_iter=3), keep_frames=True)
        assert len(rep.frames) == 4
        np.testing.assert_array_equal(rep.frames[0], U0)
        np.testing.assert_array_equal(rep.frames[1], npm_step(a_alpha(0.5), U0))

    def test_stationary_variant_converges_as_frame(self):
        A = a_alpha(0.5)
        rep = npm_run(A, initial_frame(0.5), variant="stationary")
        assert rep.converged
        U = rep.final_frame
        assert np.linalg.norm(npm_stationary_step(A, U) - U) < 1e-9

    def test_rotation_block_does_not_converge(self):
        # the cut at r = 1 splits a conjugate pair, so no gap exists
        c, s = np.cos(0.9), np.sin(0.9)
        A = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 0.3]])
        rep = npm_run(A, random_stiefel(3, 1, 2), NpmConfig(max_iter=300))
        assert not rep.converged

    def test_near_singular_reports_iteration(self):
        A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
        with pytest.raises(NearSingular) as info:
            npm_run(A, np.eye(3)[:, 2:])
        assert info.value.iteration == 3


class TestReduced:
    def test_identity_stays(self):
        u0 = np.array([[0.6], [0.8]])
        rep = reduced_npm_run(np.eye(2), u0)
        assert np.abs(rep.final_frame - u0).max() < 1e-15

    def test_reflection_oscillates(self):
        # generic start alternates between two directions with period 2
        u0 = np.array([[0.6], [0.8]])
        A = np.diag([1.0, -1.0])
        rep = reduced_npm_run(A, u0, NpmConfig(max_iter=50), keep_frames=True)
        assert not rep.converged
        assert np.abs(rep.frames[2] - u0).max() < 1e-15
        assert np.abs(rep.frames[1] - np.array([[0.6], [-0.8]])).max() < 1e-15

    def test_reflection_eigenvector_start_is_fixed(self):
        rep = reduced_npm_run(np.diag([1.0, -1.0]), np.array([[1.0], [0.0]]))
        assert rep.converged and rep.iterations == 1

    def test_needs_m_below_r(self):
        with pytest.raises(ShapeError):
            reduced_npm_run(np.eye(2), np.eye(2))

    def test_lift_on_gap_matrix(self):
        A = np.diag([3.0, 2.0, 1.0]) + np.triu(np.ones((3, 3)), 1) * 0.4
        Ur = npm_run(A, random_stiefel(3, 2, 6)).final_frame
        rep = reduced_npm_run(projected_matrix(A, Ur), random_stiefel(2, 1, 7))
        lifted = Ur @ rep.final_frame
        P = general_eig(A).dominant_projector(1)
        assert subspace_distance(lifted, P) < 1e-6

    def test_a_alpha_tie_lands_in_plane(self):
        # |1| = |-1| so the reduced run has no gap; the lift still lies in the plane
        A = a_alpha(0.5)
        Ur = npm_run(A, initial_frame(0.5)).final_frame
        rep = reduced_npm_run(projected_matrix(A, Ur), np.array([[0.6], [0.8]]), NpmConfig(max_iter=200))
        assert partial_overlap_distance(Ur @ rep.final_frame, plane_projector(0.5)) < 1e-8


class TestDistances:
    def test_same_span(self):
        U = random_stiefel(5, 2, 9)
        P = SubspaceProjector.from_frame(U @ np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert subspace_distance(U, P) < 1e-14

    def test_orthogonal_spans(self):
        P = SubspaceProjector.from_basis(np.eye(4)[:, 2:])
        assert subspace_distance(np.eye(4)[:, :2], P) == pytest.approx(1.0)

    def test_standard_start_in_open_interval(self):
        d = subspace_distance(initial_frame(0.5), plane_projector(0.5))
        assert 0 < d < 1

    def test_partial_overlap(self):
        p1 = psi_vectors(0.5)[0][:, None]
        P = plane_projector(0.5)
        assert partial_overlap_distance(p1, P) < 1e-15
        normal = np.cross(*[v for v in psi_vectors(0.5)[:2]])
        normal = (normal / np.linalg.norm(normal))[:, None]
        assert partial_overlap_distance(normal, P) == pytest.approx(1.0)

    def test_partial_overlap_decays_at_rank_one(self):
        A = a_alpha(0.5)
        U = initial_frame(0.5, r=1)
        P = plane_projector(0.5)
        d0 = partial_overlap_distance(U, P)
        for _ in range(60):
            U = npm_step(A, U)
        assert partial_overlap_distance(U, P) < 1e-12 < d0

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            subspace_distance(np.eye(3)[:, :1], np.eye(2))


class TestProjectedMatrix:
    @pytest.mark.parametrize("alpha", [0.2, 0.5])
    def test_converged_eigenvalues(self, alpha):
        A = a_alpha(alpha)
        U = npm_run(A, initial_frame(alpha)).final_frame
        lam = np.sort(np.linalg.eigvals(projected_matrix(A, U)).real)
        np.testing.assert_allclose(lam, [-1.0, 1.0], atol=1e-8)

    def test_full_frame_returns_matrix(self):
        A = a_alpha(0.2)
        np.testing.assert_array_equal(projected_matrix(A, np.eye(3)), A)

    def test_rank_one_goes_to_zero(self):
        A = a_alpha(0.5)
        U = initial_frame(0.5, r=1)
        for _ in range(250):
            U = npm_step(A, U)
        assert abs(projected_matrix(A, U)[0, 0]) < 1e-3


class TestOja:
    def test_invariant_frame(self):
        assert oja_residual(a_alpha(0.5), _invariant_frame(0.5)) < 1e-9

    def test_identity(self):
        assert oja_residual(np.eye(4), random_stiefel(4, 2, 1)) < 1e-14

    def test_slow_case_decreases(self):
        A = a_alpha(0.9)
        U = initial_frame(0.9)
        res = {}
        for k in range(1, 101):
            U = npm_step(A, U)
            res[k] = oja_residual(A, U)
        assert res[100] < res[10]


class TestDomainRank:
    @pytest.mark.parametrize("alpha", [0.0, 0.2, 0.5, 0.9])
    def test_standard_start(self, alpha):
        ok, smin = domain_rank_check(a_alpha(alpha), initial_frame(alpha), 2)
        assert ok and smin > 1e-3

    def test_third_eigenvector_is_outside(self):
        psi3 = psi_vectors(0.5)[2][:, None]
        ok, smin = domain_rank_check(a_alpha(0.5), psi3, 2)
        assert not ok and smin < 1e-10

    def test_eigenvector_frame(self):
        p1, p2, _ = psi_vectors(0.2)
        U, _ = qr_thin(np.column_stack([p1, p2]))
        assert domain_rank_check(a_alpha(0.2), U, 2)[0]

    def test_bad_m(self):
        with pytest.raises(ShapeError):
            domain_rank_check(a_alpha(0.2), initial_frame(0.2), 1)


class TestFitRate:
    def test_exact_geometric(self):
        assert fit_rate(0.3 ** np.arange(30)) == pytest.approx(0.3, rel=1e-12)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_rate([1.0, 1e-3, 1e-12])
