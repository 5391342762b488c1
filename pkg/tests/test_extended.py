import json

import numpy as np
import pytest

from extgauss import extended as E
from extgauss import gauss
from extgauss.extended import (
    ExtendedGaussian,
    ExtendedGaussianMap,
    InfeasibleObservation,
    PrecisionRep,
    as_distribution,
    condition_equal,
    covariance_rep,
    dirac,
    from_covariance_rep,
    from_gaussian,
    gaussian,
    observe,
    to_covariance,
    to_precision,
    uniform,
)
from extgauss.gauss import NotPSD
from extgauss.subspace import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    column_space,
    intersect,
    minkowski_sum,
    product,
)

from _gen import (
    LOOSE_RANK,
    gauss_observe_oracle,
    random_extended,
    random_extended_map,
    random_gaussian_map,
    reconstruct_extended,
    span_above,
    support_point,
    tau_conditioning_problem,
    tau_regularized,
)

DIAG = Subspace.span([[1.0, 1.0]])
LOOSE_EQ = Tolerance(eq_abs_tol=1e-4)


class TestNormalFormAndEquality:
    def test_translation_absorbed_three_ways(self):
        a = ExtendedGaussian(Subspace.full(1), [10.0], [[0.0]])
        b = uniform(1)
        c = ExtendedGaussian(Subspace.full(1), [0.0], [[10.0]])
        assert a.equals(b) and b.equals(c) and a.equals(c)

    def test_joint_representations_identified(self):
        a = ExtendedGaussian(DIAG, [0, 0], np.eye(2))
        b = ExtendedGaussian(DIAG, [0, 0], np.diag([0.0, 2.0]))
        assert a.equals(b)

    def test_distinct_variances_differ(self):
        assert not gaussian([0.0], [[1.0]]).equals(gaussian([0.0], [[2.0]]))

    @pytest.mark.parametrize("seed", range(25))
    def test_translation_invariance_random(self, seed):
        rng = np.random.default_rng(7000 + seed)
        psi = random_extended(rng, int(rng.integers(1, 6)))
        inside = psi.nondet.basis @ rng.standard_normal(psi.nondet.dim)
        assert E.translate(psi, inside).equals(psi)
        off = psi.nondet.annihilator()
        if off.dim:
            outside = off.basis @ (0.5 + rng.random(off.dim))
            assert not E.translate(psi, outside).equals(psi)

    def test_json_round_trip(self):
        psi = random_extended(np.random.default_rng(1), 3)
        blob = json.dumps(psi.to_dict())
        back = ExtendedGaussian.from_dict(json.loads(blob))
        assert back.equals(psi)
        assert set(psi.to_dict()) == {"dim", "mean", "cov", "nondet_basis"}


class TestPushforward:
    def test_identity(self):
        psi = random_extended(np.random.default_rng(2), 3)
        assert E.pushforward(np.eye(3), psi).equals(psi)

    def test_nonuniqueness_collapse(self):
        psi = ExtendedGaussian(DIAG, [0, 0], np.eye(2))
        assert E.pushforward(np.eye(2), psi).equals(
            ExtendedGaussian(DIAG, [0, 0], np.diag([0.0, 2.0]))
        )

    def test_difference_removes_ignorance(self):
        psi = ExtendedGaussian(DIAG, [0, 0], np.eye(2))
        out = E.pushforward([[1.0, -1.0]], psi)
        assert out.nondet.dim == 0
        np.testing.assert_allclose(out.cov, [[2.0]], atol=1e-10)
        # large-variance oracle: the same result for any tau
        for tau in (1e4, 1e8):
            mean, cov = tau_regularized(psi, tau)
            a = np.array([[1.0, -1.0]])
            np.testing.assert_allclose(a @ cov @ a.T, [[2.0]], atol=1e-6)

    def test_uniform_pushforward_has_column_space_ignorance(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((3, 2)) @ np.array([[1.0, 0.0], [0.0, 0.0]])
        out = E.pushforward(a, uniform(2))
        assert out.nondet == column_space(a)
        assert out.equals(ExtendedGaussian(column_space(a), np.zeros(3), np.zeros((3, 3))))


class TestComposeTensorMarginal:
    def test_identity_unit(self):
        rng = np.random.default_rng(4)
        f = random_extended_map(rng, 2, 3)
        assert E.compose(E.identity(3), f).equals(f)
        assert E.compose(f, E.identity(2)).equals(f)

    def test_shared_offset_construction(self):
        # two unit normals with an unknown common offset along the diagonal
        pair = as_distribution(E.tensor(gaussian([0.0], [[1.0]]), gaussian([0.0], [[1.0]])))
        add_unknown = ExtendedGaussianMap(DIAG, np.eye(2), [0, 0], np.zeros((2, 2)))
        out = as_distribution(E.compose(add_unknown, pair))
        assert out.equals(ExtendedGaussian(DIAG, [0, 0], np.eye(2)))
        assert out.equals(ExtendedGaussian(DIAG, [0, 0], np.diag([0.0, 2.0])))

    def test_marginal_of_coupled_pair_is_uniform(self):
        psi = ExtendedGaussian(DIAG, [0, 0], np.eye(2))
        assert E.marginal(psi, [0]).equals(uniform(1))
        # large-variance oracle: the first coordinate's variance diverges
        for tau in (1e4, 1e6, 1e8):
            _, cov = tau_regularized(psi, tau)
            assert cov[0, 0] > tau / 4

    @pytest.mark.parametrize("seed", range(20))
    def test_associativity(self, seed):
        rng = np.random.default_rng(7100 + seed)
        dims = [int(rng.integers(0, 4)) for _ in range(4)]
        f = random_extended_map(rng, dims[0], dims[1])
        g = random_extended_map(rng, dims[1], dims[2])
        h = random_extended_map(rng, dims[2], dims[3])
        assert E.compose(h, E.compose(g, f)).equals(E.compose(E.compose(h, g), f))

    @pytest.mark.parametrize("seed", range(10))
    def test_comonoid_and_delete_naturality(self, seed):
        rng = np.random.default_rng(7200 + seed)
        n, m = int(rng.integers(1, 4)), int(rng.integers(0, 4))
        cpy, ident = E.copy(n), E.identity(n)
        drop_left = E.tensor(E.delete(n), ident)
        assert E.compose(drop_left, cpy).equals(ident)
        f = random_extended_map(rng, n, m)
        assert E.compose(E.delete(m), f).equals(E.delete(n))


class TestDuality:
    def test_uniform_has_zero_precision(self):
        p = to_precision(uniform(3))
        assert p.support == Subspace.full(3)
        np.testing.assert_allclose(p.form, np.zeros((3, 3)))
        rep = covariance_rep(uniform(3))
        assert rep.dual_support.dim == 0
        np.testing.assert_allclose(rep.form, np.zeros((3, 3)))

    def test_rank_deficient_gaussian(self):
        p = to_precision(gaussian([0, 0], np.diag([0.0, 2.0])))
        assert p.support == Subspace.span([[0.0, 1.0]])
        np.testing.assert_allclose(p.form, np.diag([0.0, 0.5]), atol=1e-12)

    def test_full_rank_is_matrix_inverse(self):
        cov = np.array([[2.0, 0.5], [0.5, 1.0]])
        p = to_precision(gaussian([0, 0], cov))
        assert p.support == Subspace.full(2)
        np.testing.assert_allclose(p.form, np.linalg.inv(cov), atol=1e-10)

    def test_rejects_non_psd_form(self):
        with pytest.raises(NotPSD):
            PrecisionRep(Subspace.full(1), [[-1.0]])

    def test_rejects_form_off_support(self):
        with pytest.raises(ValueError):
            PrecisionRep(Subspace.span([[1.0, 0.0]]), np.eye(2))

    @pytest.mark.parametrize("seed", range(80))
    def test_round_trip_and_kernel_identities(self, seed):
        rng = np.random.default_rng(7300 + seed)
        n = int(rng.integers(0, 7))
        d_dim = int(rng.integers(0, n + 1))
        rank = int(rng.integers(0, n - d_dim + 1))
        psi = random_extended(rng, n, nondet_dim=d_dim, rank=rank)
        centered = ExtendedGaussian(psi.nondet, np.zeros(n), psi.cov)
        prec = to_precision(psi)
        back = to_covariance(prec)
        assert back.equals(centered, Tolerance(eq_abs_tol=1e-7))
        # the form's kernel inside the support is the nondeterminism
        kernel = intersect(prec.support, column_space(prec.form).annihilator())
        assert kernel == psi.nondet
        # support identity against the round-tripped covariance
        assert prec.support == minkowski_sum(column_space(back.cov), back.nondet)
        # covariance-side round trip
        assert from_covariance_rep(covariance_rep(psi)).equals(centered)
        rep = covariance_rep(psi)
        k = intersect(rep.dual_support, column_space(rep.form).annihilator())
        assert k == prec.support.annihilator()


class TestConditional:
    def test_reduces_to_gaussian_case(self):
        rng = np.random.default_rng(5)
        f = random_gaussian_map(rng, 2, 4)
        got = E.conditional(from_gaussian(f), 2)
        expected = from_gaussian(gauss.conditional(f, 2))
        assert got.equals(expected)

    def test_coupled_pair_conditional(self):
        psi = ExtendedGaussian(DIAG, [0, 0], np.eye(2))
        cond = E.conditional(psi, 1)
        assert cond.nondet.dim == 0
        np.testing.assert_allclose(cond.lin, [[1.0]], atol=1e-9)
        np.testing.assert_allclose(cond.cov, [[2.0]], atol=1e-9)
        np.testing.assert_allclose(cond.mean, [0.0], atol=1e-9)

    def test_pure_output_ignorance(self):
        nondet = product(Subspace.zero(1), Subspace.full(2))
        phi = ExtendedGaussianMap(
            nondet, np.random.default_rng(6).standard_normal((3, 2)), np.zeros(3), np.eye(3)
        )
        cond = E.conditional(phi, 1)
        assert cond.nondet == Subspace.full(2)
        np.testing.assert_allclose(cond.lin, np.zeros((2, 3)), atol=1e-10)
        # large-variance oracle: conditional covariance diverges on Y
        mean = np.zeros(3)
        cov = np.eye(3) + 1e8 * nondet.projector()
        g = gauss.conditional(gauss.distribution(mean, cov, LOOSE_RANK), 1, LOOSE_RANK)
        assert np.linalg.eigvalsh(g.cov)[0] > 1e7

    @pytest.mark.parametrize("seed", range(60))
    def test_reconstruction_random(self, seed):
        rng = np.random.default_rng(7400 + seed)
        na, nx, ny = (int(rng.integers(0, 4)) for _ in range(3))
        phi = random_extended_map(rng, na, nx + ny)
        out = reconstruct_extended(phi, nx, DEFAULT_TOL)
        assert out.equals(phi, Tolerance(eq_abs_tol=1e-6)), f"seed {seed}"


class TestExactConditioning:
    def test_equality_of_two_unit_normals(self):
        joint = as_distribution(E.tensor(gaussian([0.0], [[1.0]]), gaussian([0.0], [[1.0]])))
        post = condition_equal(joint)
        np.testing.assert_allclose(post.cov, [[0.5, 0.5], [0.5, 0.5]], atol=1e-10)
        u_marg = E.marginal(post, [0])
        np.testing.assert_allclose(u_marg.cov, [[0.5]], atol=1e-10)
        assert u_marg.nondet.dim == 0

    @pytest.mark.parametrize("seed", range(30))
    def test_uniform_partner_changes_nothing(self, seed):
        rng = np.random.default_rng(7500 + seed)
        n = int(rng.integers(1, 5))
        psi = random_extended(rng, n)
        joint = as_distribution(E.tensor(psi, uniform(n)))
        post = condition_equal(joint)
        assert E.marginal(post, range(n)).equals(psi, Tolerance(eq_abs_tol=1e-7))
        # afterwards the two halves are exactly equal
        assert E.marginal(post, range(n, 2 * n)).equals(psi, Tolerance(eq_abs_tol=1e-7))

    def test_infeasible_dirac(self):
        with pytest.raises(InfeasibleObservation):
            observe(dirac([0.0]), [[1.0]], [5.0])

    def test_feasibility_scale_anchoring(self):
        # residual variance twelve orders below the joint scale is not support
        psi = gaussian([0.0, 0.0], np.diag([1.0, 1e-16]))
        with pytest.raises(InfeasibleObservation):
            observe(psi, [[0.0, 1.0]], [5.0])

    def test_observation_of_uniform_is_dirac(self):
        post = observe(uniform(1), [[1.0]], [4.0])
        assert post.equals(dirac([4.0]))

    @pytest.mark.parametrize("seed", range(20))
    def test_observation_order_invariance(self, seed):
        rng = np.random.default_rng(7600 + seed)
        n = int(rng.integers(2, 5))
        psi = random_extended(rng, n)
        l1 = rng.standard_normal((1, n))
        l2 = rng.standard_normal((1, n))
        x0 = support_point(rng, psi)
        c1, c2 = l1 @ x0, l2 @ x0
        a = observe(observe(psi, l1, c1), l2, c2)
        b = observe(observe(psi, l2, c2), l1, c1)
        assert a.equals(b, Tolerance(eq_abs_tol=1e-6))

    def test_uniform_on_zero_space(self):
        assert uniform(0).equals(dirac(np.zeros(0)))


class TestLargeVarianceOracle:
    @pytest.mark.parametrize("seed", range(12))
    def test_observe_matches_tau_limit(self, seed):
        rng = np.random.default_rng(7700 + seed)
        psi, obs, value = tau_conditioning_problem(rng)
        ext = observe(psi, obs, value)
        p = ext.nondet.complement_projector()
        for tau, budget in ((1e4, 1e-2), (1e6, 1e-3), (1e8, 1e-4)):
            mean, cov = tau_regularized(psi, tau)
            post_mean, post_cov = gauss_observe_oracle(mean, cov, obs, value, LOOSE_RANK)
            err = max(
                float(np.max(np.abs(p @ post_mean - ext.mean))),
                float(np.max(np.abs(p @ post_cov @ p - ext.cov))),
            )
            assert err <= budget, f"tau={tau}: {err}"
        # support comparison at the tightest tau; both sides resolved at the
        # oracle's variance floor
        got = span_above(post_cov, 1e-3)
        expected = minkowski_sum(span_above(ext.cov, 1e-3), ext.nondet)
        assert got.equals(expected, LOOSE_EQ)


class TestSupportAndFunctorPaths:
    def test_support_of_extended_map(self):
        rng = np.random.default_rng(8)
        m = random_extended_map(rng, 2, 3)
        s = E.support(m)
        assert s.noise_space == minkowski_sum(column_space(m.cov), m.nondet)

    @pytest.mark.parametrize("seed", range(30))
    def test_paths_into_affine_relations_agree(self, seed):
        # support of the embedded Gaussian map equals the embedding of its
        # support: the two functor paths agree on underlying affine data
        rng = np.random.default_rng(7800 + seed)
        n, m = int(rng.integers(0, 4)), int(rng.integers(0, 4))
        f = random_gaussian_map(rng, n, m)
        via_extended = E.support(from_gaussian(f))
        direct = gauss.support(f)
        assert via_extended.equals(direct)
        # embedding the support map itself (noise as pure nondeterminism, no
        # covariance left) and taking its affine shadow changes nothing
        embedded = E.ExtendedGaussianMap(
            direct.noise_space, direct.lin, direct.offset,
            np.zeros((m, m)),
        )
        assert E.support(embedded).equals(direct)

    @pytest.mark.parametrize("seed", range(20))
    def test_support_functorial_on_extended_maps(self, seed):
        rng = np.random.default_rng(7900 + seed)
        n, p, m = (int(rng.integers(0, 4)) for _ in range(3))
        g = random_extended_map(rng, n, p)
        f = random_extended_map(rng, p, m)
        lhs = E.support(E.compose(f, g))
        rhs = gauss.compose_support(E.support(f), E.support(g))
        assert lhs.equals(rhs)
