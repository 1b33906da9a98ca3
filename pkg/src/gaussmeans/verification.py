"""Property suites for the inequality chain behind the convexity theorems.

Each suite re-checks, on explicit parameter grids, the pointwise facts
the proofs rest on:

* lemma4 — the phi identities and the signs of phi - x, g1, g2, g3 by
  the sign of alpha;
* lemma5 — S > 0, the discriminant identity
  (1 - alpha x)^2 - 4AC = ((2x - (1+alpha x) phi)/phi)^2, the domination
  S^2 >= u^2 for alpha <= 0, sign agreement of the two Delta routes, and
  h/M <= (B+S)/(2A) for alpha < 0;
* dchain — the slope quadratic d2(y) = (y - xA'/A)(B - S) + 2xA' phi
  attains its minimum at y* with value -(1/2)(1 + alpha x^2/(phi-x))^2,
  plus the bracketed positivity facts that make y* well-defined;
* delta — the boundary behavior of
  delta(x) = h - M (B - S)/(2A), which vanishes as x -> 0+ and is
  sign-definite by regime (>= 0 for alpha < 0 under the convexity
  hypotheses, <= 0 for alpha >= 0 under log-concavity of M).

Failures are data, not exceptions: every failure record carries the full
operand list (phi, g's, A, B, C, S, y, h, M) so a counterexample can be
reproduced from the report alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .convexity_analysis import (
    FunctionJet,
    _d_scale,
    d_operator,
    delta_from_parts,
    y0_threshold,
)
from .functions import EntireFunction
from .integral_means import MeanParams, circle_mean, geometric_grid, h_values
from .special_fn import (
    CancellationFault,
    DomainFault,
    SIGN_TOL,
    aux_abcs,
    aux_g,
    phi,
    sign_tolerance,
    x0_of_alpha,
)

__all__ = [
    "GridSpec",
    "SuiteReport",
    "verify_lemma4",
    "verify_lemma5",
    "verify_d_chain",
    "verify_delta_boundary",
    "ystar_of",
    "d2_minimum_closed_form",
    "d3_chain_facts",
]


@dataclass(frozen=True)
class GridSpec:
    """Parameter grid: alpha list x geometric x-grid (+ optional y samples)."""

    alpha_values: tuple[float, ...]
    x_range: tuple[float, float]
    x_count: int
    y_values: tuple[float, ...] = ()

    def __post_init__(self):
        lo, hi = self.x_range
        if not (lo > 0.0 and hi > lo):
            raise DomainFault(f"x_range must satisfy 0 < lo < hi, got {self.x_range}")
        if self.x_count < 2:
            raise DomainFault(f"x_count must be >= 2, got {self.x_count}")
        for v in (*self.alpha_values, lo, hi, *self.y_values):
            if not math.isfinite(v):
                raise DomainFault(f"grid values must be finite, got {v}")

    def x_grid(self) -> np.ndarray:
        return geometric_grid(self.x_range[0], self.x_range[1], self.x_count)


@dataclass
class SuiteReport:
    """Outcome of one verification suite; failures empty <=> suite passes."""

    suite: str
    checks_run: int
    failures: list[dict]
    tolerances: dict[str, float]
    hypotheses_met: bool = True
    notes: str = ""

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "checks_run": self.checks_run,
            "failures": self.failures,
            "tolerances": dict(self.tolerances),
            "hypotheses_met": self.hypotheses_met,
            "passed": self.passed,
            "notes": self.notes,
        }


_LEMMA4_DEFAULT = GridSpec(
    alpha_values=(-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0),
    x_range=(1e-3, 20.0),
    x_count=400,
)
_LEMMA5_DEFAULT = GridSpec(alpha_values=(), x_range=(0.01, 10.0), x_count=200)


def _operands(alpha: float, x: float, **extra) -> dict:
    ph, dph = phi(alpha, x)
    g1, g2, g3 = aux_g(alpha, x)
    out = {"alpha": alpha, "x": x, "phi": ph, "dphi": dph,
           "g1": g1, "g2": g2, "g3": g3}
    out.update(extra)
    return out


def _fail(failures: list, check: str, lhs: float, rhs: float, slack: float,
          operands: dict) -> None:
    failures.append({"check": check, "lhs": lhs, "rhs": rhs,
                     "slack": slack, "operands": operands})


def verify_lemma4(grid: GridSpec | None = None) -> SuiteReport:
    """Weight-function facts: phi' = 1 - alpha phi and the g sign table."""
    grid = grid or _LEMMA4_DEFAULT
    xs = grid.x_grid()
    failures: list[dict] = []
    checks = 0
    id_rel = 1e-12
    for alpha in grid.alpha_values:
        for x in map(float, xs):
            ph, dph = phi(alpha, x)
            g1, g2, g3 = aux_g(alpha, x)

            checks += 1
            resid = abs(dph - (1.0 - alpha * ph))
            allow = id_rel * max(1.0, abs(dph))
            if resid > allow:
                _fail(failures, "phi_identity", dph, 1.0 - alpha * ph,
                      allow - resid, _operands(alpha, x))

            checks += 1
            ts = sign_tolerance(ph, x)
            d = ph - x
            ok = (d <= ts) if alpha > 0 else (d >= -ts) if alpha < 0 else (abs(d) <= ts)
            if not ok:
                _fail(failures, "phi_minus_x_sign", d, 0.0,
                      -abs(d) + ts, _operands(alpha, x))

            checks += 1
            if alpha >= 0.0:
                ts = sign_tolerance(x * (1.0 - alpha * x), ph)
                if g1 > ts:
                    _fail(failures, "g1_nonpositive", g1, 0.0, ts - g1,
                          _operands(alpha, x))

            checks += 1
            ts = sign_tolerance(alpha * ph * ph, 2.0 * (1.0 + alpha * x) * ph, 2.0 * x)
            if g2 > ts:
                _fail(failures, "g2_nonpositive", g2, 0.0, ts - g2,
                      _operands(alpha, x))

            checks += 1
            ts = sign_tolerance(x, (1.0 + alpha * x) * ph)
            ok = (g3 <= ts) if alpha > 0 else (g3 >= -ts) if alpha < 0 else (abs(g3) <= ts)
            if not ok:
                _fail(failures, "g3_sign", g3, 0.0, -abs(g3) + ts,
                      _operands(alpha, x))
    return SuiteReport(
        suite="lemma4", checks_run=checks, failures=failures,
        tolerances={"identity_rel": id_rel, "sign_tol": SIGN_TOL},
        notes="signs follow -sign(alpha): phi >= x, g3 >= 0 for alpha < 0; "
              "phi <= x, g1 <= 0, g3 <= 0 for alpha > 0; g2 <= 0 always",
    )


def verify_lemma5(f: EntireFunction, params: MeanParams,
                  grid: GridSpec | None = None, tol: float = 1e-10) -> SuiteReport:
    """Quadratic-form facts along one function: S, the discriminant, eq-(4)."""
    grid = grid or _LEMMA5_DEFAULT
    xs = grid.x_grid()
    alpha = params.alpha
    jets = [circle_mean(f, params.p, float(x), tol) for x in xs]
    h, _ = h_values(f, params, xs, tol)
    failures: list[dict] = []
    checks = 0
    hypotheses_met = True
    skipped = 0
    for i, x in enumerate(map(float, xs)):
        M, dM = jets[i].value, jets[i].dM
        if dM < -sign_tolerance(M / x):
            # the lemma assumes a nondecreasing circle mean; for an entire
            # function that is automatic, so a decisive violation means the
            # quadrature went wrong rather than the fact being tested
            hypotheses_met = False
            skipped += 1
            continue
        y = max(x * dM / M, 0.0)
        bundle = aux_abcs(alpha, x, y)
        A, B, C, S = bundle.A, bundle.B, bundle.C, bundle.S
        ph = bundle.phi
        ops = _operands(alpha, x, A=A, B=B, C=C, S=S, y=y, M=M, h=float(h[i]))

        checks += 1
        ts = 1e-12 * (1.0 + abs(B))
        if not S > ts:
            _fail(failures, "S_positive", S, 0.0, S - ts, ops)

        checks += 1
        u = (2.0 * x - (1.0 + alpha * x) * ph) / ph
        lhs = (1.0 - alpha * x) ** 2 - 4.0 * A * C
        resid = abs(lhs - u * u)
        allow = 1e-10 * max(1.0, abs(lhs), u * u, abs(4.0 * A * C))
        if resid > allow:
            _fail(failures, "discriminant_identity", lhs, u * u,
                  allow - resid, ops)

        if alpha <= 0.0:
            checks += 1
            slack = S * S - u * u * (1.0 - 1e-10) + 1e-14 * (1.0 + u * u)
            if slack < 0.0:
                _fail(failures, "S_dominates_u", S * S, u * u, slack, ops)

        checks += 1
        pair = delta_from_parts(alpha, x, M, dM, float(h[i]), tol)
        if not pair.signs_agree:
            _fail(failures, "delta_signs_agree", pair.delta_direct,
                  pair.delta_quadratic,
                  -min(abs(pair.delta_direct), abs(pair.delta_quadratic)), ops)

        if alpha < 0.0:
            checks += 1
            upper = (B + S) / (2.0 * A)
            ratio = float(h[i]) / M
            ts = sign_tolerance(ratio, upper)
            if ratio > upper + ts:
                _fail(failures, "mean_ratio_below_upper_root", ratio, upper,
                      upper + ts - ratio, ops)
    notes = "checks S > 0, discriminant identity, S^2 >= u^2 (alpha <= 0), " \
            "Delta sign agreement, h/M <= (B+S)/(2A) (alpha < 0)"
    if skipped:
        notes += f"; skipped {skipped} points with decisively negative M'"
    return SuiteReport(
        suite="lemma5", checks_run=checks, failures=failures,
        tolerances={"identity_rel": 1e-10, "sign_tol": SIGN_TOL, "quad_tol": tol},
        hypotheses_met=hypotheses_met, notes=notes,
    )


# ----------------------------------------------------------------------
# the d2 minimization chain
# ----------------------------------------------------------------------

def ystar_of(alpha: float, x: float) -> float:
    """Minimizer y* of d2 over y >= 0, in closed form (alpha < 0, x > x0)."""
    ph, _ = phi(alpha, x)
    num = (ph - x * (1.0 - alpha * x)) * (
        -(1.0 + 2.0 * alpha * x) * ph * ph + x * (5.0 + 3.0 * alpha * x) * ph - 4.0 * x * x
    )
    den = 2.0 * (ph - x) * (ph * ph - x * (3.0 + alpha * x) * ph + 2.0 * x * x)
    return num / den


def d2_minimum_closed_form(alpha: float, x: float) -> float:
    """Minimum value d2(y*) = -(1/2) (1 + alpha x^2/(phi - x))^2."""
    ph, _ = phi(alpha, x)
    t = 1.0 + alpha * x * x / (ph - x)
    return -0.5 * t * t


def _golden_min(fun, lo: float, hi: float, iters: int = 80):
    """Golden-section minimum of a unimodal scalar function on [lo, hi]."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if b - a <= 1e-15 * (1.0 + abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = fun(d)
    ym = c if fc < fd else d
    return ym, fun(ym), b - a


def verify_d_chain(alpha: float, x: float,
                   y_grid: np.ndarray | None = None) -> SuiteReport:
    """Minimum of the slope quadratic d2 against its closed form.

    Valid for alpha < 0 and x > x0 (below x0 the minimizer y* changes
    sign and the closed-form minimum claim does not apply).
    """
    if not (alpha < 0.0):
        raise DomainFault(f"verify_d_chain requires alpha < 0, got {alpha}")
    x0 = x0_of_alpha(alpha)
    if not (x > x0):
        raise DomainFault(f"verify_d_chain requires x > x0 = {x0}, got x = {x}")
    ph, dph = phi(alpha, x)
    g1, g2, g3 = aux_g(alpha, x)
    A = (ph - x) / (ph * ph)
    C = x * dph
    xAp = x * g2 / ph ** 3
    r0 = xAp / A
    c0 = 2.0 * xAp * ph
    b0 = 1.0 - alpha * x
    q = -4.0 * A * C

    ystar = ystar_of(alpha, x)
    d2star = d2_minimum_closed_form(alpha, x)
    if y_grid is None:
        y_grid = np.linspace(0.0, max(10.0, 4.0 * ystar), 100_000)
    else:
        y_grid = np.asarray(y_grid, dtype=np.float64)
    values = kernels.d2_scan(y_grid, b0, q, r0, c0)
    i_min = int(np.argmin(values))
    step = float(y_grid[1] - y_grid[0]) if y_grid.size > 1 else 0.0

    def d2_scalar(y: float) -> float:
        B = b0 + y
        S = math.sqrt(B * B + q)
        return (y - r0) * (B - S) + c0

    lo = float(y_grid[max(i_min - 1, 0)])
    hi = float(y_grid[min(i_min + 1, y_grid.size - 1)])
    y_ref, d2_ref, bracket = _golden_min(d2_scalar, lo, hi)

    failures: list[dict] = []
    checks = 0
    ops = _operands(alpha, x, A=A, B=b0 + ystar, C=C,
                    S=math.sqrt((b0 + ystar) ** 2 + q),
                    ystar=ystar, d2star=d2star, y_refined=y_ref,
                    d2_refined=d2_ref, grid_argmin=float(y_grid[i_min]))

    checks += 1
    slack = step * 1.0001 + bracket - abs(float(y_grid[i_min]) - ystar)
    if slack < 0.0:
        _fail(failures, "grid_argmin_near_ystar", float(y_grid[i_min]), ystar,
              slack, ops)

    checks += 1
    slack = 1e-6 * (1.0 + abs(ystar)) - abs(y_ref - ystar)
    if slack < 0.0:
        _fail(failures, "refined_argmin_matches_ystar", y_ref, ystar, slack, ops)

    checks += 1
    floor = 1e-12 * (abs(c0) + abs(r0) * (b0 + abs(ystar)) + 1.0)
    allow = 1e-6 * abs(d2star) + floor
    if abs(d2_ref - d2star) > allow:
        _fail(failures, "min_matches_closed_form", d2_ref, d2star,
              allow - abs(d2_ref - d2star), ops)

    checks += 1
    p1 = ph * ph - x * (3.0 + alpha * x) * ph + 2.0 * x * x
    ts = sign_tolerance(ph * ph, x * (3.0 + abs(alpha) * x) * ph, 2.0 * x * x)
    if p1 < -ts:
        _fail(failures, "p1_nonnegative", p1, 0.0, p1 + ts, ops)

    checks += 1
    p1_alt = (ph - x) ** 2 + x * g3
    resid = abs(p1 - p1_alt)
    allow = 1e-10 * max(1.0, abs(p1), abs(p1_alt))
    if resid > allow:
        _fail(failures, "p1_identity", p1, p1_alt, allow - resid, ops)

    checks += 1
    p2 = -(1.0 + 2.0 * alpha * x) * ph * ph + x * (5.0 + 3.0 * alpha * x) * ph - 4.0 * x * x
    ts = sign_tolerance(ph * ph * (1.0 + 2.0 * abs(alpha) * x),
                        x * (5.0 + 3.0 * abs(alpha) * x) * ph, 4.0 * x * x)
    if p2 < -ts:
        _fail(failures, "p2_nonnegative", p2, 0.0, p2 + ts, ops)

    checks += 1
    ratio = alpha * ph * ph / g2          # alpha / (phi A')
    if ratio < 1.0 - 1e-10:
        _fail(failures, "alpha_over_phiAprime_ge_1", ratio, 1.0,
              ratio - 1.0, ops)

    return SuiteReport(
        suite="dchain", checks_run=checks, failures=failures,
        tolerances={"closed_form_rel": 1e-6, "identity_rel": 1e-10,
                    "sign_tol": SIGN_TOL},
        notes=f"x0 = {x0}; grid of {y_grid.size} y-points on "
              f"[{float(y_grid[0])}, {float(y_grid[-1])}] plus golden-section "
              "refinement",
    )


def d3_chain_facts(alpha: float, x: float, y: float) -> dict:
    """Operands of the d3 bound: d3 = (alpha phi^2/g2) y + u - S.

    For alpha > 0 the coefficient alpha phi^2 / g2 is <= -1, so
    d3 <= u - S for every y >= 0; and S >= |u| holds whenever y = 0,
    alpha x <= 1, or y >= 2(alpha x - 1), giving d3 <= 0. For alpha < 0
    the same coefficient is >= 1 (it equals alpha/(phi A')).
    """
    if not (x > 0.0 and y >= 0.0):
        raise DomainFault(f"need x > 0 and y >= 0, got x={x}, y={y}")
    bundle = aux_abcs(alpha, x, y)
    ph = bundle.phi
    _, g2, _ = aux_g(alpha, x)
    if g2 == 0.0:
        raise DomainFault(f"g2 vanishes at alpha={alpha}, x={x}; d3 is undefined")
    u = 2.0 * x / ph - 1.0 - alpha * x
    coeff = alpha * ph * ph / g2
    d3 = coeff * y + u - bundle.S
    return {
        "alpha": alpha, "x": x, "y": y, "phi": ph, "g2": g2, "u": u,
        "S": bundle.S, "coeff": coeff, "d3": d3,
        "u_minus_S": u - bundle.S, "S_minus_abs_u": bundle.S - abs(u),
        "domination_valid": y == 0.0 or alpha * x <= 1.0 or y >= 2.0 * (alpha * x - 1.0),
    }


# ----------------------------------------------------------------------
# boundary behavior of delta
# ----------------------------------------------------------------------

def verify_delta_boundary(f: EntireFunction, params: MeanParams,
                          probes, stable: bool = True,
                          tol: float = 1e-10) -> SuiteReport:
    """delta(x) -> 0 as x -> 0+, monotonically and with the regime sign.

    ``probes`` is a decreasing sequence in (0, 1]. The quadratic root is
    evaluated as 2C/(B+S) by default; the textbook (B-S)/(2A) form is
    allowed only for probes >= 1e-4 (below that it loses all digits to
    cancellation and the suite refuses to pretend otherwise).
    """
    probes = np.asarray(probes, dtype=np.float64)
    if probes.ndim != 1 or probes.size < 2:
        raise DomainFault("need at least two probe points")
    if not (np.all(probes > 0.0) and np.all(probes <= 1.0)):
        raise DomainFault("probes must lie in (0, 1]")
    if np.any(np.diff(probes) >= 0.0):
        raise DomainFault("probes must be strictly decreasing")
    if not stable and float(probes.min()) < 1e-4:
        raise CancellationFault(
            "the (B-S)/(2A) form cancels catastrophically below x = 1e-4; "
            "use the stable 2C/(B+S) form there"
        )
    alpha = params.alpha
    xs = probes[::-1].copy()
    jets = [circle_mean(f, params.p, float(x), tol) for x in xs]
    h, _ = h_values(f, params, xs, tol)

    deltas = np.empty(xs.size)
    scales = np.empty(xs.size)
    hyp_ok = np.empty(xs.size, dtype=bool)
    records = []
    for i, x in enumerate(map(float, xs)):
        M, dM, d2M = jets[i].value, jets[i].dM, jets[i].d2M
        y = max(x * dM / M, 0.0)
        bundle = aux_abcs(alpha, x, y)
        if stable or bundle.A == 0.0:
            root = 2.0 * bundle.C / (bundle.B + bundle.S)
        else:
            root = (bundle.B - bundle.S) / (2.0 * bundle.A)
        deltas[i] = float(h[i]) - M * root
        scales[i] = M * bundle.phi
        DM = d_operator(FunctionJet(M, dM, d2M), x)
        tol_DM = sign_tolerance(_d_scale(FunctionJet(M, dM, d2M), x))
        if alpha < 0.0:
            y0 = y0_threshold(alpha, x)
            hyp_ok[i] = DM >= -tol_DM and y >= y0 - sign_tolerance(y, y0)
        else:
            hyp_ok[i] = DM <= tol_DM
        records.append(_operands(alpha, x, A=bundle.A, B=bundle.B, C=bundle.C,
                                 S=bundle.S, y=y, M=M, h=float(h[i]),
                                 delta=deltas[i]))

    failures: list[dict] = []
    checks = 0
    # walk from the largest probe downward
    for i in range(xs.size - 1, 0, -1):
        checks += 1
        big, small = abs(deltas[i]), abs(deltas[i - 1])
        allow = big * (1.0 + 1e-9) + tol * (scales[i] + scales[i - 1])
        if small > allow:
            _fail(failures, "delta_magnitude_nonincreasing", small, big,
                  allow - small, records[i - 1])
    for i in range(xs.size):
        if not hyp_ok[i]:
            continue
        checks += 1
        allow = 4.0 * tol * scales[i] + 1e-300
        if alpha < 0.0:
            if deltas[i] < -allow:
                _fail(failures, "delta_nonnegative", deltas[i], 0.0,
                      deltas[i] + allow, records[i])
        else:
            if deltas[i] > allow:
                _fail(failures, "delta_nonpositive", deltas[i], 0.0,
                      allow - deltas[i], records[i])
    met = bool(np.all(hyp_ok))
    notes = "regime sign: delta >= 0 for alpha < 0 under the theorem-1 " \
            "hypotheses, delta <= 0 for alpha >= 0 under log-concave M"
    if not met:
        bad = [float(xs[i]) for i in range(xs.size) if not hyp_ok[i]]
        notes += f"; sign check skipped at probes {bad} (hypotheses not met)"
    return SuiteReport(
        suite="delta", checks_run=checks, failures=failures,
        tolerances={"quad_tol": tol, "sign_tol": SIGN_TOL},
        hypotheses_met=met, notes=notes,
    )
