import math

import numpy as np
import pytest

from anisokrr import krr
from anisokrr.covariance import build
from anisokrr.spectral import KernelSpec


def test_sample_deterministic():
    cov = build(2, 0.0)
    a = krr.sample(3, cov, seed=7)
    b = krr.sample(3, cov, seed=7)
    np.testing.assert_array_equal(a.X, b.X)
    assert not np.array_equal(a.X, krr.sample(3, cov, seed=8).X)


def test_sample_variances_clt():
    cov = build(5, 0.8)
    ds = krr.sample(10**5, cov, seed=0)
    z_var = ds.Z.var(axis=0)
    assert np.max(np.abs(z_var - 1.0)) < 0.02
    x_var = ds.X.var(axis=0)
    # 3 standard errors of a variance estimate: 3 * sigma_j * sqrt(2/n)
    assert np.all(np.abs(x_var - cov.sigma) < 3 * cov.sigma * math.sqrt(2e-5))


def test_whitening_relation():
    cov = build(4, 1.2)
    ds = krr.sample(50, cov, seed=3)
    np.testing.assert_allclose(ds.X, ds.Z * np.sqrt(cov.sigma), rtol=1e-14)


def test_constant_kernel():
    cov = build(4, 0.5)
    spec = KernelSpec.hermite((1.0,))
    rng = np.random.default_rng(0)
    for _ in range(5):
        x, y = rng.standard_normal((2, 4))
        assert krr.kernel_eval(x, y, spec, cov) == pytest.approx(1.0)


def test_linear_level_is_inner_product():
    cov = build(6, 0.9)
    spec = KernelSpec.hermite((0.0, 1.0))
    rng = np.random.default_rng(1)
    for _ in range(10):
        x, y = rng.standard_normal((2, 6)) * np.sqrt(cov.sigma)
        assert krr.kernel_eval(x, y, spec, cov) == pytest.approx(
            float(x @ y), abs=1e-10)


@pytest.mark.parametrize("d,L", [(3, 3), (5, 2), (10, 3)])
def test_fast_path_matches_direct_oracle(d, L):
    cov = build(d, 0.7)
    spec = KernelSpec.hermite(tuple(1.0 for _ in range(L + 1)))
    rng = np.random.default_rng(42)
    for _ in range(100):
        x, y = rng.standard_normal((2, d)) * np.sqrt(cov.sigma)
        fast = krr.kernel_eval(x, y, spec, cov)
        direct = krr.kernel_eval_direct(x, y, spec, cov)
        assert abs(fast - direct) <= 1e-10


def test_matrix_path_matches_pairwise():
    cov = build(7, 0.4)
    spec = KernelSpec.hermite((1.0, 0.5, 0.25, 0.125))
    rng = np.random.default_rng(5)
    Z, Zp = rng.standard_normal((12, 7)), rng.standard_normal((9, 7))
    K = krr.kernel_matrix(Z, Zp, spec, cov)
    s = np.sqrt(cov.sigma)
    for i in range(12):
        for j in range(9):
            assert K[i, j] == pytest.approx(
                krr.kernel_eval(Z[i] * s, Zp[j] * s, spec, cov), abs=1e-10)


def test_kernel_matrix_symmetric_psd():
    cov = build(20, 0.6)
    spec = KernelSpec.hermite((1.0, 1.0, 1.0, 1.0))
    Z = krr.sample(150, cov, seed=9).Z
    K = krr.kernel_matrix(Z, Z, spec, cov)
    assert np.max(np.abs(K - K.T)) <= 1e-12
    w = np.linalg.eigvalsh(K)
    assert w.min() >= -1e-8 * np.abs(K).max()


def test_scalar_fit_closed_form():
    cov = build(2, 0.0)
    spec = KernelSpec.hermite((1.0,))  # k == 1 everywhere
    ds = krr.Dataset(X=np.zeros((1, 2)), Z=np.zeros((1, 2)),
                     y=np.array([1.0]), noise_sigma=0.0, seed=0)
    model = krr.fit(ds, spec, cov, ridge=0.5)
    assert model.dual_coeffs[0] == pytest.approx(1.0 / 1.5)


def test_large_ridge_shrinks_predictions():
    cov = build(5, 0.3)
    spec = KernelSpec.hermite((1.0, 1.0, 1.0))
    target = krr.make_target("first_coord", cov)
    train = krr.train_dataset(40, cov, target, seed=2)
    model = krr.fit(train, spec, cov, ridge=1e8)
    preds = krr.predict(model, krr.sample(30, cov, seed=3).Z)
    assert np.max(np.abs(preds)) < 1e-4


def test_interpolation_limit():
    cov = build(4, 0.5)
    spec = KernelSpec.hermite((1.0, 1.0, 1.0, 1.0))
    target = krr.make_target("first_coord", cov)
    train = krr.train_dataset(30, cov, target, seed=4)
    model = krr.fit(train, spec, cov, ridge=1e-8)
    fitted = krr.predict(model, train.Z)
    assert np.max(np.abs(fitted - train.y)) <= 1e-4


def test_permutation_invariance_of_risk():
    cov = build(5, 0.4)
    spec = KernelSpec.hermite((1.0, 1.0, 1.0))
    target = krr.make_target("first_coord", cov)
    train = krr.train_dataset(35, cov, target, seed=6)
    perm = np.random.default_rng(0).permutation(35)
    shuffled = krr.Dataset(X=train.X[perm], Z=train.Z[perm], y=train.y[perm],
                           noise_sigma=0.0, seed=6)
    m1 = krr.fit(train, spec, cov, 0.01)
    m2 = krr.fit(shuffled, spec, cov, 0.01)
    r1, _ = krr.excess_risk_mc(m1, target, cov, 1000, seed=10)
    r2, _ = krr.excess_risk_mc(m2, target, cov, 1000, seed=10)
    assert r1 == pytest.approx(r2, rel=1e-8)


def test_constant_target_learned_fast():
    cov = build(3, 0.0)
    spec = KernelSpec.hermite((1.0, 1.0))
    target = krr.make_target("custom", cov, terms=((1, 0, 2.0),))
    train = krr.train_dataset(10, cov, target, seed=1)
    model = krr.fit(train, spec, cov, ridge=1e-8)
    risk, _ = krr.excess_risk_mc(model, target, cov, 500, seed=2)
    assert risk <= 1e-6


def test_null_model_risk_is_target_norm():
    cov = build(10, 0.5)
    spec = KernelSpec.hermite((1.0, 1.0, 1.0, 1.0))
    target = krr.make_target("first_coord", cov)  # ||f*||^2 = 3
    model = krr.FittedKRR(dual_coeffs=np.zeros(5),
                          Z_train=np.zeros((5, 10)), spec=spec, cov=cov,
                          ridge=1.0)
    risk, se = krr.excess_risk_mc(model, target, cov, 20000, seed=3)
    assert risk == pytest.approx(3.0, abs=5 * se)


def test_risk_consistent_across_test_seeds():
    cov = build(6, 0.3)
    spec = KernelSpec.hermite((1.0, 1.0, 1.0))
    target = krr.make_target("first_coord", cov)
    train = krr.train_dataset(50, cov, target, seed=0)
    model = krr.fit(train, spec, cov, 0.01)
    m1, s1 = krr.excess_risk_mc(model, target, cov, 4000, seed=1)
    m2, s2 = krr.excess_risk_mc(model, target, cov, 4000, seed=2)
    assert abs(m1 - m2) <= 4 * math.hypot(s1, s2)


def test_make_target_kinds():
    cov = build(100, 0.5)
    first = krr.make_target("first_coord", cov)
    assert first.terms == ((1, 1, 1.0), (1, 2, 1.0), (1, 3, 1.0))
    last = krr.make_target("last_coord", cov)
    assert last.terms == ((100, 1, 1.0), (100, 2, 1.0), (100, 3, 1.0))
    empty = krr.make_target("custom", cov)
    assert empty.terms == () and empty.l2_norm_sq() == 0.0
    with pytest.raises(ValueError):
        krr.make_target("middle", cov)
    with pytest.raises(ValueError):
        krr.TargetFunction(((1, 2, 1.0), (1, 2, 0.5)))  # duplicate (j, p)


def test_target_norm_and_evaluation():
    cov = build(3, 0.0)
    t = krr.make_target("custom", cov, terms=((2, 2, 1.5),))
    assert t.l2_norm_sq() == pytest.approx(2.25)
    z = np.array([[0.0, 2.0, 1.0]])
    # he_2(2) = (4-1)/sqrt(2)
    assert t.evaluate(z)[0] == pytest.approx(1.5 * 3 / math.sqrt(2))


def test_n_test_minimum_enforced():
    cov = build(3, 0.0)
    spec = KernelSpec.hermite((1.0,))
    model = krr.FittedKRR(dual_coeffs=np.zeros(2), Z_train=np.zeros((2, 3)),
                          spec=spec, cov=cov, ridge=1.0)
    with pytest.raises(ValueError):
        krr.excess_risk_mc(model, krr.make_target("custom", cov), cov, 50, seed=0)
