import math

import pytest

from anisokrr import krr, theory
from anisokrr.covariance import build, r0
from anisokrr.multiindex import MultiIndex
from anisokrr.spectral import KernelSpec

XI = (1.0, 1.0, 1.0, 1.0)


def make_partition(d, alpha, kappa, delta0=0.05, spec=None):
    cov = build(d, alpha)
    spec = spec or KernelSpec.hermite(XI)
    return cov, spec, theory.partition(cov, spec, float(d) ** kappa, kappa, delta0)


def test_partition_isotropic_kappa_15():
    _, _, part = make_partition(100, 0.0, 1.5, delta0=0.1)
    assert len(part.low) == 101
    assert part.d_kappa == 1


def test_partition_high_empty_when_threshold_low():
    # every enumerated sigma^beta clears the threshold
    cov = build(5, 0.0)
    spec = KernelSpec.hermite(XI)
    part = theory.partition(cov, spec, 5.0**9.5, 9.5, 0.1)
    assert part.high_mass == 0.0
    assert len(part.low) == math.comb(5 + 3, 3)


def test_degree_cap_floor():
    _, _, part = make_partition(50, 0.5, 1.2)
    assert part.d_kappa == 2


def test_partition_warning_flags_not_errors():
    cov = build(20, 0.5)
    spec = KernelSpec.hermite(XI)
    part = theory.partition(cov, spec, 20.0**2, 2.0, 0.05)  # integer kappa
    assert any("integer" in w for w in part.warnings)


def test_low_monotone_in_kappa():
    prev = -1
    for kappa in (0.7, 1.2, 1.7, 2.3):
        _, _, part = make_partition(40, 0.3, kappa)
        assert len(part.low) >= prev
        prev = len(part.low)


def test_high_mass_plus_low_mass_is_trace():
    cov, spec, part = make_partition(30, 0.6, 1.3)
    rule_total = sum(XI)  # each level sums to xi_k
    rule = theory.eigenvalue_rule(spec)
    low_mass = sum(rule(b, cov) for b in part.low)
    assert low_mass + part.high_mass == pytest.approx(rule_total, abs=1e-10)


def test_effective_risk_zero_when_low_target_empty():
    cov, spec, part = make_partition(30, 0.4, 1.4)
    target = krr.make_target("custom", cov)  # f* == 0
    pred = theory.effective_risk(part, target, 30.0**1.4, 0.01, spec, cov)
    assert pred.risk == 0.0


def test_shrinkage_limits_and_ordering():
    cov, spec, part = make_partition(30, 0.4, 1.4)
    target = krr.make_target("first_coord", cov)
    pred = theory.effective_risk(part, target, 1e12, 0.01, spec, cov)
    assert all(0 < s <= 1 for s in pred.shrinkage.values())
    # enormous n: everything in Low is learned
    assert pred.risk == pytest.approx(pred.high_target_mass, abs=1e-10)
    # larger diagonal => larger s
    rule = theory.eigenvalue_rule(spec)
    pairs = sorted(pred.shrinkage.items(), key=lambda kv: rule(kv[0], cov))
    values = [s for _, s in pairs]
    assert values == sorted(values)


def test_risk_decreases_with_n():
    cov = build(50, 0.6)
    spec = KernelSpec.hermite(XI)
    target = krr.make_target("first_coord", cov)
    risks = []
    for kappa in (1.1, 1.45, 1.85):
        n = 50.0**kappa
        part = theory.partition(cov, spec, n, kappa, 0.05)
        risks.append(theory.effective_risk(part, target, n, 0.01, spec, cov).risk)
    assert risks == sorted(risks, reverse=True)


def test_high_residual_flag_default_on_for_misaligned_target():
    # last-coordinate target at strong anisotropy: degree-2,3 terms in High
    cov = build(100, 0.9)
    spec = KernelSpec.hermite(XI)
    kappa = 1.5
    part = theory.partition(cov, spec, 100.0**kappa, kappa, 0.05)
    target = krr.make_target("last_coord", cov)
    pred = theory.effective_risk(part, target, 100.0**kappa, 0.01, spec, cov)
    assert pred.high_residual_included
    assert pred.high_target_mass >= 2.0
    off = theory.effective_risk(part, target, 100.0**kappa, 0.01, spec, cov,
                                include_high_residual=False)
    assert off.risk <= pred.risk - 2.0 + 1e-9


def test_literal_mode_differs_and_is_recorded():
    cov, spec, part = make_partition(40, 0.5, 1.3)
    target = krr.make_target("first_coord", cov)
    n = 40.0**1.3
    d_mode = theory.effective_risk(part, target, n, 0.01, spec, cov, mode="default")
    l_mode = theory.effective_risk(part, target, n, 0.01, spec, cov, mode="literal")
    assert d_mode.mode == "default" and l_mode.mode == "literal"
    assert l_mode.gamma_ridge == pytest.approx(d_mode.gamma_ridge + 0.01)
    assert l_mode.risk != d_mode.risk
    with pytest.raises(ValueError):
        theory.effective_risk(part, target, n, 0.01, spec, cov, mode="exotic")


def test_zero_diagonal_error():
    cov = build(10, 0.0)
    spec = KernelSpec.hermite((1.0, 0.0, 1.0, 1.0))  # no mass on level 1
    kappa = 1.5
    part = theory.partition(cov, spec, 10.0**kappa, kappa, 0.3)
    target = krr.make_target("custom", cov, terms=((1, 1, 1.0),))
    with pytest.raises(ZeroDivisionError):
        theory.effective_risk(part, target, 10.0**kappa, 0.01, spec, cov)


def test_predictor_degree_check_isotropic():
    _, _, part = make_partition(100, 0.0, 1.5, delta0=0.1)
    chk = theory.predictor_degree_check(part)
    assert chk.d_kappa == 1
    assert chk.max_low_degree == 1
    assert chk.top_degree_examples


def test_predictor_degree_check_d_kappa_membership():
    # alpha=0.9, kappa=1.5, d=100: D(kappa)=15; 15*e1 in Low iff
    # sigma_1^15 > d^{-(kappa+delta0)} -- checked by raw log arithmetic.
    d, alpha, kappa, delta0 = 100, 0.9, 1.5, 0.05
    cov = build(d, alpha)
    assert math.floor(kappa / (1 - alpha)) == 15
    in_low = 15 * math.log(cov.sigma[0]) > -(kappa + delta0) * math.log(d)
    # at d=100 sigma_1 ~ 1/r0 with r0 ~ 7, so 15 levels cost far more than
    # d^{-1.55}: the top degree is not reachable here
    assert not in_low


def test_alignment_dichotomy_thresholds():
    # target He_2 on coordinate 1 becomes learnable at n ~ r0^2; on
    # coordinate d at n ~ sigma_d^{-2} ~ d^2, for every alpha in (0,1)
    for alpha in (0.3, 0.5, 0.7, 0.9):
        cov = build(100, alpha)
        kappa_first = 2 * math.log(1 / cov.sigma[0]) / math.log(100)
        kappa_last = 2 * math.log(1 / cov.sigma[-1]) / math.log(100)
        # first coordinate: threshold ~ r0^2, i.e. kappa ~ 2 log_d r0
        assert kappa_first == pytest.approx(
            2 * math.log(r0(cov)) / math.log(100), rel=1e-12)
        assert kappa_last > kappa_first
        # last coordinate: sigma_d^{-2} grows like d^2; the constant is
        # alpha-dependent, so check the exponent as a log-log slope
        ds = (100, 1000, 10000)
        lo, hi = ds[0], ds[-1]
        slope = (math.log(1 / build(hi, alpha).sigma[-1] ** 2)
                 - math.log(1 / build(lo, alpha).sigma[-1] ** 2)) / \
            (math.log(hi) - math.log(lo))
        assert slope == pytest.approx(2.0, abs=0.2)


def test_example_2e1_threshold_matches_partition():
    # 2*e1 enters Low exactly when kappa + delta0 > 2 log_d(1/sigma_1)
    d, alpha, delta0 = 50, 0.4, 0.05
    cov = build(d, alpha)
    spec = KernelSpec.hermite(XI)
    kappa_star = 2 * math.log(1 / cov.sigma[0]) / math.log(d) - delta0
    beta = MultiIndex.from_dense([2], d)
    for kappa, expect in ((kappa_star - 0.1, False), (kappa_star + 0.1, True)):
        part = theory.partition(cov, spec, float(d) ** kappa, kappa, delta0)
        assert (beta in set(part.low)) is expect


def test_kappa_from_n():
    assert theory.kappa_from_n(100.0**1.7, 100) == pytest.approx(1.7, rel=1e-12)
