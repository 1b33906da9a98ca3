"""The D operator, both Delta routes, thresholds, theorem checkers, oracle."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussmeans.convexity_analysis import (
    CriterionReport,
    FunctionJet,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    classify_curvature,
    corollary1_radius,
    curvature_tolerance,
    curvature_verdict,
    d_of_phi,
    d_operator,
    delta_both_ways,
    delta_from_parts,
    theorem2_bound,
    y0_threshold,
)
from gaussmeans.functions import EntireFunction
from gaussmeans.integral_means import (
    MeanParams,
    circle_mean,
    geometric_grid,
    h_values,
    radial_mean_profile,
)
from gaussmeans.special_fn import DomainFault, phi, x0_of_alpha

ONE_PLUS_Z = EntireFunction.polynomial([1.0, 1.0])
T0 = 1.793282132900761


# ----------------------------------------------------------------------
# the D operator
# ----------------------------------------------------------------------

@given(a=st.floats(min_value=0.1, max_value=6.0),
       x=st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=100, deadline=None)
def test_d_vanishes_on_powers(a, x):
    # f = x^a is exactly log-linear in log x, so D(f) = 0
    jet = FunctionJet(value=x ** a, d1=a * x ** (a - 1.0),
                      d2=a * (a - 1.0) * x ** (a - 2.0))
    assert d_operator(jet, x) == pytest.approx(0.0, abs=1e-10 * (1 + a * a))


def test_d_known_values():
    # f = e^x: f'/f = f''/f = 1, so D = 1 + x - x = 1 at every x
    for x in (0.3, 1.0, 4.0):
        jet = FunctionJet(value=math.exp(x), d1=math.exp(x), d2=math.exp(x))
        assert d_operator(jet, x) == pytest.approx(1.0, rel=1e-13)
    # f = 2 pi (1 + x) at x = 1: 1/2 + 0 - 1/4 = 1/4
    jet = FunctionJet(value=4.0 * math.pi, d1=2.0 * math.pi, d2=0.0)
    assert d_operator(jet, 1.0) == pytest.approx(0.25, rel=1e-14)


def test_d_of_phi_reference():
    assert d_of_phi(-1.0, 1.0) == pytest.approx(0.66130311266153411, rel=1e-13)
    assert d_of_phi(1.0, 1.0) == pytest.approx(-0.33869688733846589, rel=1e-13)
    assert d_of_phi(0.0, 5.0) == 0.0  # phi(0, x) = x is log-linear


def test_d_of_phi_sign_follows_negative_alpha():
    for x in (0.2, 1.0, 3.0):
        assert d_of_phi(-0.7, x) > 0.0
        assert d_of_phi(0.7, x) < 0.0


def test_function_jet_requires_positive_value():
    with pytest.raises(DomainFault):
        FunctionJet(value=0.0, d1=1.0, d2=0.0)
    with pytest.raises(DomainFault):
        FunctionJet(value=-1.0, d1=1.0, d2=0.0)


# ----------------------------------------------------------------------
# the two Delta routes
# ----------------------------------------------------------------------

def test_delta_reference_value():
    pair = delta_both_ways(EntireFunction.monomial(1), MeanParams(2.0, 1.0), 1.0)
    assert pair.delta_quadratic == pytest.approx(-0.039353792098071057, rel=1e-10)
    assert pair.signs_agree
    assert pair.delta_direct < 0.0


def test_delta_routes_are_proportional():
    """delta_quadratic = Delta * h^2 / (phi' M^2) with a positive multiplier,
    so the two routes must agree in sign and in ratio."""
    f, params, x = EntireFunction.monomial(1), MeanParams(2.0, 1.0), 1.0
    jet = circle_mean(f, params.p, x)
    h, _ = h_values(f, params, np.array([x]))
    _, dph = phi(params.alpha, x)
    pair = delta_both_ways(f, params, x)
    expected = pair.delta_direct * float(h[0]) ** 2 / (dph * jet.value ** 2)
    assert pair.delta_quadratic == pytest.approx(expected, rel=1e-9)


def test_delta_vanishes_for_constant_function():
    # f = const: M'/M = 0 and h = M phi, so both routes give exactly zero
    pair = delta_both_ways(EntireFunction.monomial(0), MeanParams(2.0, -1.0), 1.0)
    assert abs(pair.delta_direct) <= pair.tol_direct
    assert abs(pair.delta_quadratic) <= pair.tol_quadratic
    assert pair.signs_agree


def test_delta_from_parts_rejects_bad_inputs():
    with pytest.raises(DomainFault):
        delta_from_parts(1.0, -1.0, 1.0, 0.0, 1.0)  # x <= 0
    with pytest.raises(DomainFault):
        delta_from_parts(1.0, 1.0, 0.0, 0.0, 1.0)   # M <= 0
    with pytest.raises(DomainFault):
        delta_from_parts(1.0, 1.0, 1.0, 0.0, 0.0)   # h <= 0


# ----------------------------------------------------------------------
# quotient rule: D(h/phi) computed as one jet must equal D(h) - D(phi)
# ----------------------------------------------------------------------

def quotient_jet(alpha, x, M, dM, h):
    ph, dph = phi(alpha, x)
    hp = M * dph
    hpp = (dM - alpha * M) * dph
    q = h / ph
    qp = (hp - q * dph) / ph
    qpp = (hpp - 2.0 * qp * dph - q * (-alpha * dph)) / ph
    return FunctionJet(value=q, d1=qp, d2=qpp)


@pytest.mark.parametrize("alpha", [-1.0, 1.0])
def test_quotient_rule_spot_checks(alpha):
    params = MeanParams(p=2.0, alpha=alpha)
    xs = geometric_grid(0.1, 2.0, 7)
    jets = [circle_mean(ONE_PLUS_Z, params.p, float(x)) for x in xs]
    h, _ = h_values(ONE_PLUS_Z, params, xs)
    for i, x in enumerate(map(float, xs)):
        pair = delta_from_parts(alpha, x, jets[i].value, jets[i].dM, float(h[i]))
        dq = d_operator(quotient_jet(alpha, x, jets[i].value, jets[i].dM,
                                     float(h[i])), x)
        tol = 1e-8 * max(abs(dq), abs(pair.delta_direct)) + 1e-12
        assert abs(dq - pair.delta_direct) <= tol


# ----------------------------------------------------------------------
# thresholds
# ----------------------------------------------------------------------

def test_y0_threshold_reference():
    assert y0_threshold(-1.0, 1.0) == pytest.approx(-0.37357819526915266, rel=1e-12)
    assert y0_threshold(-1.0, 3.0) == pytest.approx(3.0162273544217789, rel=1e-12)
    with pytest.raises(DomainFault):
        y0_threshold(0.5, 1.0)
    with pytest.raises(DomainFault):
        y0_threshold(-1.0, 0.0)


def test_y0_sign_change_at_x0():
    # y0 <= 0 below x0 (slope condition free), >= 0 above
    x0 = x0_of_alpha(-1.0)
    assert y0_threshold(-1.0, 0.9 * x0) < 0.0
    assert y0_threshold(-1.0, 1.1 * x0) > 0.0
    assert abs(y0_threshold(-1.0, x0)) < 1e-10


def test_theorem2_bound_reference():
    assert theorem2_bound(-1.0, 3.0) == pytest.approx(0.016169372314230789, rel=1e-12)
    assert theorem2_bound(-1.0, 0.5) == 0.0  # below x0 the bound is zero
    x0 = x0_of_alpha(-1.0)
    assert theorem2_bound(-1.0, x0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainFault):
        theorem2_bound(1.0, 1.0)


def test_corollary1_radius_reference():
    assert corollary1_radius(-1.0) == pytest.approx(1.3391348449281577, rel=1e-13)
    assert corollary1_radius(-1.0) == pytest.approx(math.sqrt(T0), rel=1e-13)
    assert corollary1_radius(-4.0) == pytest.approx(math.sqrt(T0) / 2.0, rel=1e-13)
    with pytest.raises(DomainFault):
        corollary1_radius(1.0)


# ----------------------------------------------------------------------
# criterion reports
# ----------------------------------------------------------------------

def test_criterion_report_invariants():
    ok = CriterionReport(criterion="demo", interval=(0.1, 1.0), verdict="holds",
                         witnesses=[(0.5, 0.01)], tolerances={})
    assert ok.passed
    assert ok.to_dict()["verdict"] == "holds"
    with pytest.raises(ValueError, match="witness"):
        CriterionReport(criterion="demo", interval=(0.1, 1.0), verdict="fails",
                        witnesses=[(0.5, 0.01)], tolerances={})
    with pytest.raises(ValueError, match="verdict"):
        CriterionReport(criterion="demo", interval=(0.1, 1.0), verdict="maybe",
                        witnesses=[], tolerances={})
    bad = CriterionReport(criterion="demo", interval=(0.1, 1.0), verdict="fails",
                          witnesses=[(0.5, -0.01)], tolerances={})
    assert not bad.passed


# ----------------------------------------------------------------------
# theorem checkers
# ----------------------------------------------------------------------

def test_theorem1_holds_for_log_convex_example():
    params = MeanParams(p=2.0, alpha=-1.0)
    report = check_theorem1(ONE_PLUS_Z, params, interval=(0.1, x0_of_alpha(-1.0)),
                            n_points=64)
    assert report.verdict == "holds"
    assert report.passed
    assert len(report.segments) == 1 and report.segments[0][0] == "holds"
    assert all(s >= 0.0 for _, s in report.witnesses)


def test_theorem1_requires_negative_alpha():
    with pytest.raises(DomainFault):
        check_theorem1(ONE_PLUS_Z, MeanParams(2.0, 1.0))


def test_theorem2_prefix_semantics_for_monomial():
    # z^1 at p=2 has constant slope y = 1 and slope derivative 0, so the
    # hypothesis dy >= bound holds until the bound lifts off at x0 and
    # fails beyond; the conclusion is asserted only on the prefix
    params = MeanParams(p=2.0, alpha=-1.0)
    report = check_theorem2(EntireFunction.monomial(1), params, x_max=5.0,
                            n_points=96)
    assert report.verdict == "hypotheses-not-met"
    assert report.segments[0][0] == "holds"
    assert report.segments[-1][0] == "hypotheses-not-met"
    x0 = x0_of_alpha(-1.0)
    assert report.segments[0][2] <= x0 * 1.05   # prefix ends near x0
    assert report.segments[-1][1] >= x0 * 0.95


def test_theorem3_holds_for_monomial():
    report = check_theorem3(EntireFunction.monomial(1), MeanParams(2.0, 1.0),
                            n_points=48)
    assert report.verdict == "holds"
    assert report.interval == (2.5e-3, 9.0)


def test_theorem3_hypothesis_gate():
    # M(x) = 2 pi (1 + x) is strictly log-concave... in fact D(M) > 0 here,
    # so the log-concavity hypothesis fails from the start
    report = check_theorem3(ONE_PLUS_Z, MeanParams(2.0, 1.0), n_points=48)
    assert report.verdict == "hypotheses-not-met"
    with pytest.raises(DomainFault):
        check_theorem3(ONE_PLUS_Z, MeanParams(2.0, -1.0))


def test_theorem3_stable_under_tolerance_shrink():
    f = EntireFunction.monomial(2)
    for tol in (1e-8, 1e-10, 1e-12):
        report = check_theorem3(f, MeanParams(2.0, 0.5), n_points=48, tol=tol)
        assert report.verdict == "holds", f"tol={tol}"


# ----------------------------------------------------------------------
# curvature oracle
# ----------------------------------------------------------------------

def test_classify_curvature_unit():
    assert classify_curvature(np.array([1.0, 2.0]), 0.1) == "convex"
    assert classify_curvature(np.array([-1.0, -2.0]), 0.1) == "concave"
    assert classify_curvature(np.array([0.01, -0.01]), 0.1) == "linear"
    assert classify_curvature(np.array([1.0, -1.0]), 0.1) == "mixed"
    with pytest.raises(DomainFault):
        classify_curvature(np.array([]), 0.1)


def test_curvature_tolerance_grows_with_quad_tol():
    logs = np.log(np.linspace(1.0, 3.0, 21))
    t1 = curvature_tolerance(logs, 0.05, 1e-12)
    t2 = curvature_tolerance(logs, 0.05, 1e-8)
    assert t2 > t1 > 0.0


def test_oracle_verdicts_match_theory():
    # alpha > 0, monomial: mean is a ratio of incomplete gammas, known concave
    prof = radial_mean_profile(EntireFunction.monomial(1), MeanParams(2.0, 1.0),
                               (0.05, 3.0, 64))
    assert curvature_verdict(prof).verdict == "concave"
    # alpha = 0, monomial: exactly log-linear
    prof = radial_mean_profile(EntireFunction.monomial(2), MeanParams(2.0, 0.0),
                               (0.05, 3.0, 64))
    assert curvature_verdict(prof).verdict == "linear"
    # alpha < 0 inside the universal radius: log-convex
    prof = radial_mean_profile(ONE_PLUS_Z, MeanParams(2.0, -1.0),
                               (0.1, corollary1_radius(-1.0), 64))
    assert curvature_verdict(prof).verdict == "convex"


def test_oracle_invariant_under_variable_substitution():
    """Log-log curvature does not care whether the abscissa is r or x = r^2:
    relabeling multiplies both the second differences and the tolerance by
    the same constant."""
    prof = radial_mean_profile(ONE_PLUS_Z, MeanParams(2.0, 1.0), (0.3, 1.8, 33))
    relabeled = dataclasses.replace(prof, r=prof.x, x=prof.x * prof.x)
    a = curvature_verdict(prof)
    b = curvature_verdict(relabeled)
    assert a.verdict == b.verdict
    np.testing.assert_allclose(b.second_differences,
                               a.second_differences / 4.0, rtol=1e-6)


def test_curvature_summary_to_dict():
    prof = radial_mean_profile(EntireFunction.monomial(1), MeanParams(2.0, 1.0),
                               (0.05, 3.0, 33))
    d = curvature_verdict(prof).to_dict()
    assert d["verdict"] == "concave"
    assert d["interior_points"] == 31
    assert d["min_second_difference"] <= d["max_second_difference"]
