"""Log-convexity analysis of Gaussian integral means.

Everything here is organized around the differential operator

    D(f)(x) = f'/f + x f''/f - x (f'/f)^2,

whose sign at x decides whether ln f is convex (D >= 0) or concave
(D <= 0) as a function of ln x. The Gaussian mean is h/ (2 pi phi), and
since D of a quotient is the difference of D's, its log-convexity in
ln x is governed by

    Delta(x) = D(h)(x) - D(phi)(x),

computed two independent ways: directly from the jets of h and phi
(`delta_direct`), and through the quadratic form -A w^2 + B w - C in
w = h/M (`delta_quadratic`); the two differ by the positive factor
h^2 / (phi' M^2), so their signs must agree.

The three convexity criteria implemented by ``check_theorem1/2/3``:

* T1 (alpha < 0): if ln M is convex in ln x on an interval and
  x M'/M >= y0(x) there, the mean is log-convex in ln x on it.
* T2 (alpha < 0): if (x M'/M)' >= theorem2_bound(x) on (0, x_max], the
  mean is log-convex in ln x there; the bound is 0 below x0 and
  g1^2 / (4 x (phi - x)^2) above.
* T3 (alpha >= 0): if ln M is concave in ln x, the mean is log-concave
  in ln x.

In particular the mean of z^k is log-convex in ln r on
(0, sqrt(t0/(-alpha))) for alpha < 0 (`corollary1_radius`) and
log-concave everywhere for alpha >= 0; both are exercised against a
model-free oracle, `loglog_second_difference`, which just differences
ln(mean) on a geometric grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functions import EntireFunction
from .integral_means import (
    MeanParams,
    MeanProfile,
    _check_geometric,
    circle_mean,
    geometric_grid,
    h_values,
)
from .special_fn import (
    DomainFault,
    SIGN_TOL,
    aux_abcs,
    aux_g,
    phi,
    sign_tolerance,
    x0_of_alpha,
)

__all__ = [
    "FunctionJet",
    "SlopeFunction",
    "DeltaPair",
    "CriterionReport",
    "CurvatureSummary",
    "d_operator",
    "d_of_phi",
    "delta_from_parts",
    "delta_both_ways",
    "y0_threshold",
    "theorem2_bound",
    "corollary1_radius",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "loglog_second_difference",
    "curvature_tolerance",
    "classify_curvature",
    "curvature_verdict",
]


@dataclass(frozen=True)
class FunctionJet:
    """A positive function value with two derivatives at one point."""

    value: float
    d1: float
    d2: float

    def __post_init__(self):
        if not (self.value > 0.0) or not math.isfinite(self.value):
            raise DomainFault(f"jet value must be positive, got {self.value}")


@dataclass(frozen=True)
class SlopeFunction:
    """y = x M'/M and its derivative dy = (x M'/M)' at one point."""

    y: float
    dy: float


@dataclass(frozen=True)
class DeltaPair:
    """Delta(x) evaluated along both routes, with sign agreement."""

    x: float
    delta_direct: float
    delta_quadratic: float
    signs_agree: bool
    tol_direct: float
    tol_quadratic: float


def d_operator(jet: FunctionJet, x: float) -> float:
    """D(f) = f'/f + x f''/f - x (f'/f)^2 from a jet at x > 0."""
    if not (x > 0.0):
        raise DomainFault(f"d_operator requires x > 0, got {x}")
    t = jet.d1 / jet.value
    return t + x * jet.d2 / jet.value - x * t * t


def d_of_phi(alpha: float, x: float) -> float:
    """D(phi) in closed form: (phi - x) phi' / phi^2.

    Nonnegative for alpha <= 0, nonpositive for alpha >= 0, zero at
    alpha = 0 where phi(x) = x.
    """
    if alpha == 0.0:
        if not (x > 0.0):
            raise DomainFault(f"d_of_phi requires x > 0, got {x}")
        return 0.0
    ph, dph = phi(alpha, x)
    if x == 0.0:
        raise DomainFault("d_of_phi requires x > 0")
    return (ph - x) * dph / (ph * ph)


def _d_scale(jet: FunctionJet, x: float) -> float:
    t = abs(jet.d1 / jet.value)
    return t + x * abs(jet.d2) / jet.value + x * t * t


def delta_from_parts(alpha: float, x: float, M: float, dM: float, h: float,
                     quad_tol: float = 1e-10) -> DeltaPair:
    """Both Delta routes from precomputed M, M', h at one point.

    delta_direct uses the exact identities h' = M phi' and
    h'' = (M' - alpha M) phi'; delta_quadratic is -A w^2 + B w - C at
    w = h/M. Tolerances scale with the summed magnitudes of the terms of
    each expression, so `signs_agree` only reports a conflict when both
    values are decisively nonzero with opposite signs.
    """
    if not (M > 0.0 and h > 0.0):
        raise DomainFault(f"delta needs M > 0 and h > 0, got M={M}, h={h}")
    ph, dph = phi(alpha, x)
    h_jet = FunctionJet(h, M * dph, (dM - alpha * M) * dph)
    dd = d_operator(h_jet, x) - d_of_phi(alpha, x)

    y = max(x * dM / M, 0.0)
    bundle = aux_abcs(alpha, x, y)
    w = h / M
    dq = -bundle.A * w * w + bundle.B * w - bundle.C

    phi_scale = abs(dph / ph) + x * abs(alpha) * dph / ph + x * (dph / ph) ** 2
    scale_d = _d_scale(h_jet, x) + phi_scale
    scale_q = abs(bundle.A) * w * w + abs(bundle.B) * w + abs(bundle.C)
    qtol = max(quad_tol, 1e-13)
    tol_d = SIGN_TOL * (1.0 + scale_d) + 4.0 * qtol * scale_d
    tol_q = SIGN_TOL * (1.0 + scale_q) + 4.0 * qtol * scale_q

    zero_d = abs(dd) <= tol_d
    zero_q = abs(dq) <= tol_q
    agree = not ((not zero_d) and (not zero_q) and dd * dq < 0.0)
    return DeltaPair(x=x, delta_direct=dd, delta_quadratic=dq,
                     signs_agree=agree, tol_direct=tol_d, tol_quadratic=tol_q)


def delta_both_ways(f: EntireFunction, params: MeanParams, x: float,
                    tol: float = 1e-10) -> DeltaPair:
    """Evaluate both Delta routes for f at a single x > 0."""
    jet = circle_mean(f, params.p, x, tol)
    h, _ = h_values(f, params, np.array([x]), tol)
    return delta_from_parts(params.alpha, x, jet.value, jet.dM, float(h[0]), tol)


def y0_threshold(alpha: float, x: float) -> float:
    """The slope threshold y0 = g1 g2 / ((phi - x) g3) for alpha < 0.

    Nonpositive on (0, x0], nonnegative on [x0, infinity) — its sign
    follows -g1. The denominator is strictly positive for alpha < 0.
    """
    if not (alpha < 0.0):
        raise DomainFault(f"y0_threshold requires alpha < 0, got {alpha}")
    if not (x > 0.0):
        raise DomainFault(f"y0_threshold requires x > 0, got {x}")
    ph, _ = phi(alpha, x)
    g1, g2, g3 = aux_g(alpha, x)
    den = (ph - x) * g3
    if den <= 0.0:
        raise DomainFault(
            f"y0 denominator degenerate at alpha={alpha}, x={x} "
            f"(phi-x={ph - x}, g3={g3}); x is too small to resolve"
        )
    return g1 * g2 / den


def theorem2_bound(alpha: float, x: float) -> float:
    """Piecewise slope-derivative bound: 0 on (0, x0), g1^2/(4x(phi-x)^2) after.

    Continuous at x0 (both branches vanish there); within a relative 1e-6
    collar of x0 the two branches are both evaluated and the max is taken.
    """
    if not (alpha < 0.0):
        raise DomainFault(f"theorem2_bound requires alpha < 0, got {alpha}")
    if not (x > 0.0):
        raise DomainFault(f"theorem2_bound requires x > 0, got {x}")
    x0 = x0_of_alpha(alpha)

    def upper() -> float:
        ph, _ = phi(alpha, x)
        g1, _, _ = aux_g(alpha, x)
        return g1 * g1 / (4.0 * x * (ph - x) ** 2)

    if abs(x - x0) <= 1e-6 * x0:
        return max(0.0, upper())
    if x < x0:
        return 0.0
    return upper()


def corollary1_radius(alpha: float) -> float:
    """Radius sqrt(t0/(-alpha)) below which monomial-type means are log-convex."""
    if not (alpha < 0.0):
        raise DomainFault(f"corollary1_radius requires alpha < 0, got {alpha}")
    return math.sqrt(x0_of_alpha(alpha))


# ----------------------------------------------------------------------
# criterion reports
# ----------------------------------------------------------------------

_VERDICTS = ("holds", "fails", "hypotheses-not-met")


@dataclass
class CriterionReport:
    """Outcome of one theorem/corollary check over an interval.

    witnesses are (x, slack) pairs at the tightest grid points; slack is
    the checked margin including its tolerance, so negative slack means
    violated beyond tolerance. segments lists (status, x_lo, x_hi) runs,
    which matters when hypotheses hold only on part of the grid.
    """

    criterion: str
    interval: tuple[float, float]
    verdict: str
    witnesses: list[tuple[float, float]]
    tolerances: dict[str, float]
    segments: list[tuple[str, float, float]] = field(default_factory=list)
    notes: str = ""

    def __post_init__(self):
        if self.verdict not in _VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "fails" and not any(s < 0.0 for _, s in self.witnesses):
            raise ValueError("a 'fails' verdict needs a witness beyond tolerance")

    @property
    def passed(self) -> bool:
        return self.verdict == "holds"

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "interval": list(self.interval),
            "verdict": self.verdict,
            "witnesses": [[x, s] for x, s in self.witnesses],
            "tolerances": dict(self.tolerances),
            "segments": [[tag, lo, hi] for tag, lo, hi in self.segments],
            "notes": self.notes,
        }


def _segments_of(xs: np.ndarray, statuses: list[str]) -> list[tuple[str, float, float]]:
    runs = []
    start = 0
    for i in range(1, len(statuses) + 1):
        if i == len(statuses) or statuses[i] != statuses[start]:
            runs.append((statuses[start], float(xs[start]), float(xs[i - 1])))
            start = i
    return runs


def _tightest(xs: np.ndarray, slacks: np.ndarray, k: int = 5) -> list[tuple[float, float]]:
    order = np.argsort(slacks)[:k]
    return [(float(xs[i]), float(slacks[i])) for i in order]


@dataclass
class _GridEval:
    xs: np.ndarray
    M: np.ndarray
    dM: np.ndarray
    d2M: np.ndarray
    h: np.ndarray
    DM: np.ndarray        # D operator applied to M
    tol_DM: np.ndarray
    y: np.ndarray
    dy: np.ndarray        # (x M'/M)'
    dd: np.ndarray        # delta_direct = D(h) - D(phi)
    tol_dd: np.ndarray


def _evaluate_grid(f: EntireFunction, params: MeanParams, xs: np.ndarray,
                   tol: float) -> _GridEval:
    jets = [circle_mean(f, params.p, float(xi), tol) for xi in xs]
    M = np.array([j.value for j in jets])
    dM = np.array([j.dM for j in jets])
    d2M = np.array([j.d2M for j in jets])
    h, _ = h_values(f, params, xs, tol)
    n = xs.size
    DM = np.empty(n)
    tol_DM = np.empty(n)
    y = np.empty(n)
    dy = np.empty(n)
    dd = np.empty(n)
    tol_dd = np.empty(n)
    for i in range(n):
        x = float(xs[i])
        jet = FunctionJet(M[i], dM[i], d2M[i])
        DM[i] = d_operator(jet, x)
        tol_DM[i] = sign_tolerance(_d_scale(jet, x))
        t = dM[i] / M[i]
        y[i] = x * t
        dy[i] = (dM[i] + x * d2M[i]) / M[i] - x * t * t
        pair = delta_from_parts(params.alpha, x, M[i], dM[i], float(h[i]), tol)
        dd[i] = pair.delta_direct
        tol_dd[i] = pair.tol_direct
    return _GridEval(xs=xs, M=M, dM=dM, d2M=d2M, h=h, DM=DM, tol_DM=tol_DM,
                     y=y, dy=dy, dd=dd, tol_dd=tol_dd)


def _base_tolerances(tol: float) -> dict[str, float]:
    return {"sign_tol": SIGN_TOL, "quad_tol": tol}


def check_theorem1(f: EntireFunction, params: MeanParams,
                   interval: tuple[float, float] | None = None,
                   n_points: int = 512, tol: float = 1e-10) -> CriterionReport:
    """T1 check (alpha < 0): log-convex M and y >= y0 on I imply a log-convex mean.

    Hypotheses and conclusion are verified pointwise on a geometric grid
    over I; the default I approximates (0, x0), where y0 <= 0 makes the
    slope condition automatic for any nondecreasing M.
    """
    if not (params.alpha < 0.0):
        raise DomainFault(f"check_theorem1 requires alpha < 0, got {params.alpha}")
    x0 = x0_of_alpha(params.alpha)
    if interval is None:
        interval = (1e-3 * x0, x0)
    lo, hi = float(interval[0]), float(interval[1])
    if not (0.0 < lo < hi):
        raise DomainFault(f"bad interval {interval}")
    xs = geometric_grid(lo, hi, n_points)
    ev = _evaluate_grid(f, params, xs, tol)

    y0 = np.array([y0_threshold(params.alpha, float(x)) for x in xs])
    tol_y = np.array([sign_tolerance(ev.y[i], y0[i]) for i in range(xs.size)])
    slack_h1 = ev.DM + ev.tol_DM                 # require D(M) >= -tol
    slack_h2 = (ev.y - y0) + tol_y               # require y >= y0 - tol
    slack_c = ev.dd + ev.tol_dd                  # require Delta >= -tol

    hyp_ok = (slack_h1 >= 0.0) & (slack_h2 >= 0.0)
    concl_ok = slack_c >= 0.0
    statuses = [
        "hypotheses-not-met" if not hyp_ok[i]
        else ("holds" if concl_ok[i] else "fails")
        for i in range(xs.size)
    ]
    if any(s == "fails" for s in statuses):
        verdict = "fails"
        mask = np.array([s == "fails" for s in statuses])
        witnesses = _tightest(xs[mask], slack_c[mask])
    elif all(hyp_ok):
        verdict = "holds"
        witnesses = _tightest(xs, slack_c)
    else:
        verdict = "hypotheses-not-met"
        hyp_slack = np.minimum(slack_h1, slack_h2)
        witnesses = _tightest(xs, hyp_slack)
    return CriterionReport(
        criterion="theorem1", interval=(lo, hi), verdict=verdict,
        witnesses=witnesses, tolerances=_base_tolerances(tol),
        segments=_segments_of(xs, statuses),
        notes="hypotheses: D(M) >= 0 and x M'/M >= y0 on I; "
              "conclusion: Delta >= 0 pointwise on I",
    )


def _prefix_report(criterion: str, xs: np.ndarray, hyp_slack: np.ndarray,
                   concl_slack: np.ndarray, interval: tuple[float, float],
                   tolerances: dict[str, float], notes: str) -> CriterionReport:
    """Shared verdict logic for the cumulative theorems (T2, T3).

    Their proofs integrate delta' from 0, so the conclusion is only
    asserted on the maximal prefix of the grid where the hypothesis
    holds; beyond the first hypothesis failure the status is
    hypotheses-not-met even if the hypothesis recovers later.
    """
    n = xs.size
    first_bad = n
    for i in range(n):
        if hyp_slack[i] < 0.0:
            first_bad = i
            break
    statuses = []
    for i in range(n):
        if i >= first_bad:
            statuses.append("hypotheses-not-met")
        else:
            statuses.append("holds" if concl_slack[i] >= 0.0 else "fails")
    if any(s == "fails" for s in statuses):
        verdict = "fails"
        mask = np.array([s == "fails" for s in statuses])
        witnesses = _tightest(xs[mask], concl_slack[mask])
    elif first_bad == n:
        verdict = "holds"
        witnesses = _tightest(xs, concl_slack)
    else:
        verdict = "hypotheses-not-met"
        witnesses = _tightest(xs[first_bad:], hyp_slack[first_bad:])
    return CriterionReport(
        criterion=criterion, interval=interval, verdict=verdict,
        witnesses=witnesses, tolerances=tolerances,
        segments=_segments_of(xs, statuses), notes=notes,
    )


def check_theorem2(f: EntireFunction, params: MeanParams, x_max: float,
                   n_points: int = 512, tol: float = 1e-10) -> CriterionReport:
    """T2 check (alpha < 0): (x M'/M)' >= theorem2_bound on (0, x_max].

    The conclusion (Delta >= 0) is asserted on the maximal prefix of the
    grid where the hypothesis holds, mirroring the proof's integration
    of delta from 0.
    """
    if not (params.alpha < 0.0):
        raise DomainFault(f"check_theorem2 requires alpha < 0, got {params.alpha}")
    if not (x_max > 0.0):
        raise DomainFault(f"x_max must be positive, got {x_max}")
    x0 = x0_of_alpha(params.alpha)
    lo = 1e-3 * min(x_max, x0)
    xs = geometric_grid(lo, x_max, n_points)
    ev = _evaluate_grid(f, params, xs, tol)
    bound = np.array([theorem2_bound(params.alpha, float(x)) for x in xs])
    tol_b = np.array([sign_tolerance(ev.dy[i], bound[i]) for i in range(xs.size)])
    hyp_slack = (ev.dy - bound) + tol_b
    concl_slack = ev.dd + ev.tol_dd
    return _prefix_report(
        "theorem2", xs, hyp_slack, concl_slack, (lo, float(x_max)),
        _base_tolerances(tol),
        notes="hypothesis: (x M'/M)' >= piecewise bound from 0 up; "
              "conclusion: Delta >= 0 on the hypothesis prefix",
    )


def check_theorem3(f: EntireFunction, params: MeanParams,
                   interval: tuple[float, float] | None = None,
                   n_points: int = 512, tol: float = 1e-10) -> CriterionReport:
    """T3 check (alpha >= 0): log-concave M implies a log-concave mean.

    Hypothesis D(M) <= 0 and conclusion Delta <= 0, again with prefix
    semantics from the low end of the grid.
    """
    if not (params.alpha >= 0.0):
        raise DomainFault(f"check_theorem3 requires alpha >= 0, got {params.alpha}")
    if interval is None:
        interval = (2.5e-3, 9.0)
    lo, hi = float(interval[0]), float(interval[1])
    if not (0.0 < lo < hi):
        raise DomainFault(f"bad interval {interval}")
    xs = geometric_grid(lo, hi, n_points)
    ev = _evaluate_grid(f, params, xs, tol)
    hyp_slack = ev.tol_DM - ev.DM               # require D(M) <= tol
    concl_slack = ev.tol_dd - ev.dd             # require Delta <= tol
    return _prefix_report(
        "theorem3", xs, hyp_slack, concl_slack, (lo, hi),
        _base_tolerances(tol),
        notes="hypothesis: D(M) <= 0 from the grid's low end; "
              "conclusion: Delta <= 0 on the hypothesis prefix",
    )


# ----------------------------------------------------------------------
# model-free curvature oracle
# ----------------------------------------------------------------------

def loglog_second_difference(profile: MeanProfile) -> tuple[np.ndarray, np.ndarray]:
    """Centered second differences of ln(mean) in ln r on a geometric grid.

    Returns (interior radii, second differences divided by step^2). The
    same routine serves profiles indexed by any geometric abscissa
    (r or x = r^2): rescaling the abscissa multiplies both the values
    and `curvature_tolerance` by the same constant, so verdicts are
    invariant under the substitution.
    """
    ratio = _check_geometric(profile.r)
    if np.any(profile.mean <= 0.0):
        raise DomainFault("profile means must be positive for log analysis")
    step = math.log(ratio)
    L = np.log(profile.mean)
    d2 = (L[2:] - 2.0 * L[1:-1] + L[:-2]) / (step * step)
    return profile.r[1:-1], d2


def curvature_tolerance(log_means: np.ndarray, step: float, quad_tol: float,
                        safety: float = 2.0) -> float:
    """Tolerance for second-difference curvature verdicts.

    Sum of the centered-difference discretization error, estimated from
    fourth differences of the data (|L''''| step^2 / 12), and the
    quadrature noise amplification 4 quad_tol / step^2.
    """
    if step <= 0.0:
        raise DomainFault(f"step must be positive, got {step}")
    L = np.asarray(log_means, dtype=np.float64)
    if L.size >= 5:
        d4 = np.diff(L, 4)
        est4 = float(np.max(np.abs(d4))) / step ** 4 if d4.size else 0.0
    else:
        est4 = 0.0
    return safety * (step * step * est4 / 12.0) + 4.0 * quad_tol / (step * step) + 1e-14


def classify_curvature(second_differences: np.ndarray, tol: float) -> str:
    """convex / concave / linear / mixed from signed second differences."""
    d2 = np.asarray(second_differences, dtype=np.float64)
    if d2.size == 0:
        raise DomainFault("no interior points to classify")
    convex = bool(np.all(d2 >= -tol))
    concave = bool(np.all(d2 <= tol))
    if convex and concave:
        return "linear"
    if convex:
        return "convex"
    if concave:
        return "concave"
    return "mixed"


@dataclass
class CurvatureSummary:
    """Second-difference oracle verdict over one profile."""

    verdict: str
    tol_curv: float
    r: np.ndarray
    second_differences: np.ndarray

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tol_curv": self.tol_curv,
            "min_second_difference": float(np.min(self.second_differences)),
            "max_second_difference": float(np.max(self.second_differences)),
            "interior_points": int(self.r.size),
        }


def curvature_verdict(profile: MeanProfile, safety: float = 2.0) -> CurvatureSummary:
    """Run the second-difference oracle on a profile and classify it."""
    r, d2 = loglog_second_difference(profile)
    step = math.log(_check_geometric(profile.r))
    tol = curvature_tolerance(np.log(profile.mean), step, profile.tol, safety)
    return CurvatureSummary(verdict=classify_curvature(d2, tol), tol_curv=tol,
                            r=r, second_differences=d2)
