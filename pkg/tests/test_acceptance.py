"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test prints a single PASS line once its assertions have run; run
``pytest tests/test_acceptance.py -v -s`` to see them.
"""

import json

import numpy as np

from extgauss import extended as E
from extgauss import gauss, linrel
from extgauss.cli import DEMOS, main
from extgauss.decorated import (
    DecoratedMap,
    PointDec,
    SubDec,
    ZeroDec,
    congruent,
    lin_compose,
    normalize,
    rel_compose,
)
from extgauss.extended import ExtendedGaussian, condition_equal, observe, to_covariance, to_precision, uniform
from extgauss.subspace import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    column_space,
    image,
    intersect,
    minkowski_sum,
    structured_complement,
)

from _gen import (
    LOOSE_RANK,
    gauss_observe_oracle,
    random_extended,
    random_extended_map,
    random_gaussian_map,
    random_subspace,
    reconstruct_extended,
    span_above,
    tau_conditioning_problem,
    tau_regularized,
)
from test_decorated import GAUSS_DEC, perturb_inside_nondet, random_rel

DIAG = Subspace.span([[1.0, 1.0]])


def _ok(number, label):
    print(f"\nACCEPTANCE {number:02d} PASS: {label}")


def test_criterion_01_representation_equalities():
    tol = Tolerance(eq_abs_tol=1e-8)
    a = ExtendedGaussian(DIAG, [0, 0], np.eye(2))
    b = ExtendedGaussian(DIAG, [0, 0], np.diag([0.0, 2.0]))
    assert a.equals(b, tol)
    u1 = ExtendedGaussian(Subspace.full(1), [10.0], [[0.0]])
    u2 = uniform(1)
    u3 = ExtendedGaussian(Subspace.full(1), [0.0], [[10.0]])
    assert u1.equals(u2, tol) and u2.equals(u3, tol) and u1.equals(u3, tol)
    _ok(1, "equivalent representations compare equal (tol 1e-8)")


def test_criterion_02_coupled_pair_conditional():
    cond = E.conditional(ExtendedGaussian(DIAG, [0, 0], np.eye(2)), 1)
    assert cond.nondet.dim == 0
    assert abs(cond.lin[0, 0] - 1.0) <= 1e-8
    assert abs(cond.cov[0, 0] - 2.0) <= 1e-8
    assert abs(cond.mean[0]) <= 1e-8
    _ok(2, "conditional of the coupled pair is x + N(0, 2) with no residual ignorance")


def test_criterion_03_exact_equality_posterior(capsys):
    joint = E.as_distribution(
        E.tensor(E.gaussian([0.0], [[1.0]]), E.gaussian([0.0], [[1.0]]))
    )
    post = E.marginal(condition_equal(joint), [0])
    assert abs(post.cov[0, 0] - 0.5) <= 1e-10
    assert abs(post.mean[0]) <= 1e-10
    assert main(["demo", "exact-equality", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert abs(data["cov"][0][0] - 0.5) <= 1e-10
    with capsys.disabled():
        _ok(3, "conditioning two unit normals to be equal gives N(0, 0.5), API and demo")


def test_criterion_04_uninformative_partner():
    tol = Tolerance(eq_abs_tol=1e-7)
    rng = np.random.default_rng(41)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        psi = random_extended(rng, n)
        joint = E.as_distribution(E.tensor(psi, uniform(n)))
        post = E.marginal(condition_equal(joint), range(n))
        assert post.equals(psi, tol)
    _ok(4, "100 random priors unchanged by equality with an unknown (tol 1e-7)")


def test_criterion_05_duality_round_trips():
    tol = Tolerance(eq_abs_tol=1e-7)
    rng = np.random.default_rng(42)
    for _ in range(500):
        n = int(rng.integers(0, 7))
        d_dim = int(rng.integers(0, n + 1))
        rank = int(rng.integers(0, n - d_dim + 1))
        psi = random_extended(rng, n, nondet_dim=d_dim, rank=rank)
        centered = ExtendedGaussian(psi.nondet, np.zeros(n), psi.cov)
        prec = to_precision(psi)
        back = to_covariance(prec)
        assert back.equals(centered, tol)
        kernel = intersect(prec.support, column_space(prec.form).annihilator())
        assert kernel == psi.nondet
        assert prec.support == minkowski_sum(column_space(back.cov), back.nondet)
    _ok(5, "500 duality round trips with kernel and support identities (tol 1e-7)")


def test_criterion_06_conditional_reconstruction():
    tol = Tolerance(eq_abs_tol=1e-6)
    rng = np.random.default_rng(43)
    for _ in range(200):
        na, nx, ny = (int(rng.integers(0, 5)) for _ in range(3))
        phi = random_extended_map(rng, na, nx + ny)
        assert reconstruct_extended(phi, nx, DEFAULT_TOL).equals(phi, tol)
    _ok(6, "200 random morphisms rebuilt from marginal and conditional (tol 1e-6)")


def test_criterion_07_congruence_well_definedness():
    for dec in (GAUSS_DEC, SubDec(), ZeroDec()):
        rng = np.random.default_rng(44)
        for _ in range(200):
            n, p, m = (int(rng.integers(0, 4)) for _ in range(3))
            m1 = random_rel(rng, dec, n, p)
            m2 = random_rel(rng, dec, p, m)
            lin1, noise1 = perturb_inside_nondet(rng, dec, m1)
            lin2, noise2 = perturb_inside_nondet(rng, dec, m2)
            m1p = normalize(dec, m1.nondet, lin1, noise1)
            m2p = normalize(dec, m2.nondet, lin2, noise2)
            assert congruent(rel_compose(m2p, m1p), rel_compose(m2, m1))
    _ok(7, "200 perturbed representative pairs compose congruently, three noise models")


def test_criterion_08_structured_complement():
    rng = np.random.default_rng(45)
    for _ in range(200):
        nx, ny = int(rng.integers(0, 6)), int(rng.integers(0, 6))
        v = random_subspace(rng, nx + ny)
        k, u, w = structured_complement(v, nx, ny)
        assert k.dim + v.dim == nx + ny
        assert intersect(k, v).dim == 0
        assert minkowski_sum(k, v) == Subspace.full(nx + ny)
        px = np.hstack([np.eye(nx), np.zeros((nx, ny))])
        v_x = image(px, v)
        assert u.dim + v_x.dim == nx
        assert intersect(u, v_x).dim == 0
        assert minkowski_sum(u, v_x) == Subspace.full(nx)
    _ok(8, "200 random structured complements satisfy both direct sums exactly")


def test_criterion_09_cross_category_agreement():
    tol = Tolerance(eq_abs_tol=1e-8)
    # relations with no annotations against the relation module
    rng = np.random.default_rng(46)
    for _ in range(100):
        n, p, m = (int(rng.integers(0, 4)) for _ in range(3))
        dec = ZeroDec()
        m1, m2 = random_rel(rng, dec, n, p), random_rel(rng, dec, p, m)
        out = rel_compose(m2, m1)
        r1 = linrel.from_quotient_form(linrel.QuotientForm(m1.nondet, m1.lin))
        r2 = linrel.from_quotient_form(linrel.QuotientForm(m2.nondet, m2.lin))
        expected = linrel.to_quotient_form(linrel.compose(r2, r1))
        assert out.nondet.equals(expected.nondet, tol)
        assert np.allclose(out.lin, expected.lin, atol=1e-8)
    # point annotations against affine relations
    rng = np.random.default_rng(47)
    for _ in range(100):
        n, p, m = (int(rng.integers(0, 4)) for _ in range(3))
        dec = PointDec()
        m1, m2 = random_rel(rng, dec, n, p), random_rel(rng, dec, p, m)
        out = rel_compose(m2, m1)
        r1 = linrel.from_quotient_form_affine(
            linrel.AffineQuotientForm(m1.nondet, m1.lin, m1.noise)
        )
        r2 = linrel.from_quotient_form_affine(
            linrel.AffineQuotientForm(m2.nondet, m2.lin, m2.noise)
        )
        expected = linrel.to_quotient_form_affine(linrel.compose_affine(r2, r1))
        assert out.nondet.equals(expected.nondet, tol)
        assert np.allclose(out.lin, expected.lin, atol=1e-8)
        assert np.allclose(out.noise, expected.offset, atol=1e-8)
    # point/covariance annotated maps against Gaussian maps
    rng = np.random.default_rng(48)
    for _ in range(100):
        n, p, m = (int(rng.integers(0, 4)) for _ in range(3))
        f1, f2 = random_gaussian_map(rng, n, p), random_gaussian_map(rng, p, m)
        out = lin_compose(
            DecoratedMap(GAUSS_DEC, f2.lin, (f2.mean, f2.cov)),
            DecoratedMap(GAUSS_DEC, f1.lin, (f1.mean, f1.cov)),
        )
        expected = gauss.compose(f2, f1)
        assert np.allclose(out.lin, expected.lin, atol=1e-8)
        assert np.allclose(out.noise[0], expected.mean, atol=1e-8)
        assert np.allclose(out.noise[1], expected.cov, atol=1e-8)
    _ok(9, "three cross-module composition agreements, 100 random pairs each (tol 1e-8)")


def test_criterion_10_support_functoriality():
    rng = np.random.default_rng(49)
    for _ in range(100):
        n, p, m = (int(rng.integers(0, 4)) for _ in range(3))
        g = random_gaussian_map(rng, n, p)
        f = random_gaussian_map(rng, p, m)
        lhs = gauss.support(gauss.compose(f, g))
        rhs = gauss.compose_support(gauss.support(f), gauss.support(g))
        assert lhs.equals(rhs)
        # both paths into affine data agree on the embedded map
        via_extended = E.support(E.from_gaussian(f))
        assert via_extended.equals(gauss.support(f))
    _ok(10, "support is functorial and both paths to affine relations agree (100 pairs)")


def test_criterion_11_large_variance_oracle():
    rng = np.random.default_rng(50)
    tau = 1e8
    for _ in range(50):
        psi, obs, value = tau_conditioning_problem(rng)
        ext = observe(psi, obs, value)
        p = ext.nondet.complement_projector()
        mean, cov = tau_regularized(psi, tau)
        post_mean, post_cov = gauss_observe_oracle(mean, cov, obs, value, LOOSE_RANK)
        assert float(np.max(np.abs(p @ post_mean - ext.mean))) <= 1e-4
        assert float(np.max(np.abs(p @ post_cov @ p - ext.cov))) <= 1e-4
        got = span_above(post_cov, 1e-3)
        expected = minkowski_sum(span_above(ext.cov, 1e-3), ext.nondet)
        assert got.equals(expected, Tolerance(eq_abs_tol=1e-4))
    _ok(11, "50 conditioning problems match the tau=1e8 Gaussian stand-in (tol 1e-4)")


def test_criterion_12_cli_end_to_end(tmp_path, capsys):
    for name, entry in DEMOS.items():
        assert main(["demo", name, "--json"]) == 0
        computed = json.loads(capsys.readouterr().out)
        expected = entry["expected"]
        assert list(computed) == list(expected)
        assert computed["variables"] == expected["variables"]
        np.testing.assert_allclose(computed["mean"], expected["mean"], atol=1e-8)
        np.testing.assert_allclose(computed["cov"], expected["cov"], atol=1e-8)
        np.testing.assert_allclose(
            np.abs(np.asarray(computed["nondet_basis"], dtype=float)),
            np.abs(np.asarray(expected["nondet_basis"], dtype=float)),
            atol=1e-8,
        )
    impossible = tmp_path / "impossible.gx"
    impossible.write_text("x = 0\nobserve x == 1\nreturn x\n")
    assert main(["run", str(impossible)]) == 2
    capsys.readouterr()
    with capsys.disabled():
        _ok(12, "demo programs print the documented JSON; infeasible program exits 2")
