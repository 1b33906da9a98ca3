"""Scalar special functions for Gaussian-weighted radial integrals.

Everything here is built on the weight antiderivative

    phi(x) = integral_0^x e^{-alpha t} dt = (1 - e^{-alpha x}) / alpha,

whose derivative is phi'(x) = e^{-alpha x} = 1 - alpha*phi(x). The g-functions
and the (A, B, C, S) bundle are the algebraic combinations of phi that control
the sign of the log-log second derivative of a Gaussian integral mean; they
are always evaluated from the phi returned by :func:`phi` so that
phi' = 1 - alpha*phi stays an exact internal identity.

Sign conventions worth keeping in mind (x > 0):

* sign(phi - x) = -sign(alpha),
* g1 = x(1 - alpha x) - phi is <= 0 for alpha >= 0, and for alpha < 0 changes
  sign exactly once, at x0 = t0/(-alpha) where t0 solves e^t = 1 + t + t^2,
* g2 = alpha phi^2 - 2(1 + alpha x) phi + 2x is <= 0 for every alpha,
* g3 = x - (1 + alpha x) phi is >= 0 for alpha <= 0 and <= 0 for alpha >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "AuxiliaryBundle",
    "RootResult",
    "ConvergenceError",
    "DomainFault",
    "CancellationFault",
    "SIGN_TOL",
    "phi",
    "aux_g",
    "aux_abcs",
    "solve_t0",
    "x0_of_alpha",
    "lower_incomplete_gamma",
    "sign_tolerance",
]

#: |v| <= SIGN_TOL * (1 + scale) is treated as zero by every sign test.
SIGN_TOL = 1e-9

_SERIES_CUTOFF = 1e-8  # |alpha*x| below this uses the alternating series


class ConvergenceError(RuntimeError):
    """An iteration failed to reach the requested tolerance."""


class DomainFault(ValueError):
    """Inputs left the mathematical domain of an operation."""


class CancellationFault(ArithmeticError):
    """A numerically unstable form was requested where it loses all digits."""


def sign_tolerance(*scales: float) -> float:
    """Zero threshold for sign tests: SIGN_TOL * (1 + max magnitude)."""
    m = 0.0
    for s in scales:
        a = abs(s)
        if a > m:
            m = a
    return SIGN_TOL * (1.0 + m)


def phi(alpha: float, x: float) -> tuple[float, float]:
    """Weight antiderivative phi(x) and its derivative phi'(x) = e^{-alpha x}.

    Uses the closed form -expm1(-alpha*x)/alpha away from alpha*x ~ 0 and a
    5-term alternating series below |alpha*x| < 1e-8, where the closed form
    would divide one rounded quantity by another. alpha = 0 returns (x, 1).
    """
    if not (math.isfinite(alpha) and math.isfinite(x)):
        raise DomainFault(f"phi requires finite inputs, got alpha={alpha}, x={x}")
    if x < 0.0:
        raise DomainFault(f"phi requires x >= 0, got x={x}")
    if alpha == 0.0:
        return x, 1.0
    u = alpha * x
    dphi = math.exp(-u)
    if abs(u) < _SERIES_CUTOFF:
        val = x * (1.0 - u / 2.0 + u * u / 6.0 - u ** 3 / 24.0 + u ** 4 / 120.0)
        return val, dphi
    return -math.expm1(-u) / alpha, dphi


def aux_g(alpha: float, x: float) -> tuple[float, float, float]:
    """The three sign-carrying combinations (g1, g2, g3) of phi at x.

    g1 = x(1 - alpha x) - phi
    g2 = alpha phi^2 - 2(1 + alpha x) phi + 2x
    g3 = x - (1 + alpha x) phi
    """
    p, _ = phi(alpha, x)
    g1 = x * (1.0 - alpha * x) - p
    g2 = alpha * p * p - 2.0 * (1.0 + alpha * x) * p + 2.0 * x
    g3 = x - (1.0 + alpha * x) * p
    return g1, g2, g3


@dataclass(frozen=True)
class AuxiliaryBundle:
    """Everything the quadratic sign analysis needs at one (alpha, x, y).

    A = (phi - x)/phi^2, B = (1 - alpha x) + y, C = x phi', and
    S = sqrt(B^2 - 4AC). S is strictly positive on the mean's domain: for
    alpha <= 0 because B^2 - 4AC exceeds ((2x - (1+alpha x) phi)/phi)^2 >= 0
    with the gap y^2 + 2y(1 - alpha x) >= 0, and for alpha > 0 directly from
    A < 0 < C. The g's ride along so failure reports can show all operands.
    """

    alpha: float
    x: float
    y: float
    phi: float
    dphi: float
    g1: float
    g2: float
    g3: float
    A: float
    B: float
    C: float
    S: float

    @property
    def discriminant(self) -> float:
        return self.B * self.B - 4.0 * self.A * self.C


def aux_abcs(alpha: float, x: float, y: float) -> AuxiliaryBundle:
    """Assemble the (A, B, C, S) bundle at a point; y is the slope x M'/M."""
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainFault(f"aux_abcs requires x > 0, got x={x}")
    if not (y >= 0.0) or not math.isfinite(y):
        raise DomainFault(f"aux_abcs requires y >= 0, got y={y}")
    p, dp = phi(alpha, x)
    g1 = x * (1.0 - alpha * x) - p
    g2 = alpha * p * p - 2.0 * (1.0 + alpha * x) * p + 2.0 * x
    g3 = x - (1.0 + alpha * x) * p
    A = (p - x) / (p * p)
    B = (1.0 - alpha * x) + y
    C = x * dp
    disc = B * B - 4.0 * A * C
    slack = 1e-12 * max(B * B, abs(4.0 * A * C), 1e-300)
    if disc < -slack:
        raise DomainFault(
            f"discriminant B^2-4AC = {disc} is negative beyond rounding slack "
            f"at alpha={alpha}, x={x}, y={y}"
        )
    S = math.sqrt(disc) if disc > 0.0 else 0.0
    return AuxiliaryBundle(
        alpha=alpha, x=x, y=y, phi=p, dphi=dp,
        g1=g1, g2=g2, g3=g3, A=A, B=B, C=C, S=S,
    )


@dataclass(frozen=True)
class RootResult:
    value: float
    residual: float
    iterations: int


def _u(t: float) -> float:
    # e^t - 1 - t - t^2, written with expm1 so the near-zero region keeps digits
    return math.expm1(t) - t - t * t


def _du(t: float) -> float:
    return math.expm1(t) - 2.0 * t


def solve_t0(tolerance: float = 1e-12, bracket: tuple[float, float] = (1.0, 3.0)) -> RootResult:
    """Root of u(t) = e^t - 1 - t - t^2 on (0, inf) by safeguarded Newton.

    u is negative on (0, t0) and positive beyond, so any bracket [lo, hi]
    with u(lo) < 0 < u(hi) isolates the same root (t0 = 1.7932821329...).
    Newton steps falling outside the current bracket are replaced by
    bisection; the bracket shrinks monotonically either way.
    """
    if not (tolerance > 0.0):
        raise DomainFault(f"tolerance must be positive, got {tolerance}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (lo < hi):
        raise DomainFault(f"bracket must satisfy lo < hi, got {bracket}")
    ulo, uhi = _u(lo), _u(hi)
    if not (ulo < 0.0 < uhi):
        raise DomainFault(
            f"bracket {bracket} does not isolate the root: u(lo)={ulo}, u(hi)={uhi}"
        )
    t = 0.5 * (lo + hi)
    for it in range(1, 201):
        ut = _u(t)
        if abs(ut) <= tolerance:
            return RootResult(value=t, residual=ut, iterations=it)
        if ut < 0.0:
            lo = t
        else:
            hi = t
        dut = _du(t)
        step_ok = False
        if dut != 0.0:
            tn = t - ut / dut
            if lo < tn < hi:
                step_ok = True
        if not step_ok:
            tn = 0.5 * (lo + hi)
        if tn == t:  # bracket collapsed to adjacent doubles
            return RootResult(value=t, residual=ut, iterations=it)
        t = tn
    raise ConvergenceError(
        f"t0 root finding did not reach |u| <= {tolerance} in 200 iterations"
    )


_T0_CACHE: float | None = None


def _t0() -> float:
    global _T0_CACHE
    if _T0_CACHE is None:
        _T0_CACHE = solve_t0(tolerance=1e-14).value
    return _T0_CACHE


def x0_of_alpha(alpha: float) -> float:
    """Unique positive root x0 = t0/(-alpha) of g1 for alpha < 0.

    g1 > 0 on (0, x0) and g1 < 0 on (x0, inf); rejects alpha >= 0 where g1
    has no positive root (it is <= 0 throughout).
    """
    if not (alpha < 0.0) or not math.isfinite(alpha):
        raise DomainFault(f"x0_of_alpha requires alpha < 0, got {alpha}")
    return _t0() / (-alpha)


_GAMMA_MAX_ITER = 700
_EXP_UNDERFLOW = -745.0  # exp() underflows to 0 below this


def lower_incomplete_gamma(s: float, z: float) -> float:
    """Lower incomplete gamma gamma(s, z) = integral_0^z t^{s-1} e^{-t} dt.

    Series expansion for z < s + 1, continued fraction (modified Lentz) for
    the upper tail otherwise; the split keeps the subtraction
    gamma = Gamma(s) - Gamma(s, z) free of cancellation. Relative accuracy
    is driven to ~1e-15 so callers comfortably get 1e-12. For z so large
    that the upper tail underflows, the value saturates at Gamma(s).
    """
    if not (s > 0.0) or not math.isfinite(s):
        raise DomainFault(f"lower_incomplete_gamma requires s > 0, got s={s}")
    if not (z >= 0.0) or not math.isfinite(z):
        raise DomainFault(f"lower_incomplete_gamma requires z >= 0, got z={z}")
    if z == 0.0:
        return 0.0
    lgam = math.lgamma(s)
    if lgam > 709.0:
        raise OverflowError(
            f"Gamma({s}) overflows double precision; gamma(s, z) saturates"
        )
    lp = s * math.log(z) - z  # log of z^s e^{-z}
    if z < s + 1.0:
        # gamma(s,z) = z^s e^{-z} * sum_{n>=0} z^n / (s (s+1) ... (s+n))
        ap = s
        term = 1.0 / s
        total = term
        for _ in range(_GAMMA_MAX_ITER):
            ap += 1.0
            term *= z / ap
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        else:
            raise ConvergenceError(
                f"incomplete gamma series stalled at s={s}, z={z}"
            )
        if lp < _EXP_UNDERFLOW:
            return 0.0  # value below the double-precision floor
        return total * math.exp(lp)
    # Upper tail Gamma(s,z) = z^s e^{-z} * CF, by modified Lentz iteration.
    tiny = 1e-300
    b = z + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise ConvergenceError(
            f"incomplete gamma continued fraction stalled at s={s}, z={z}"
        )
    gamma_s = math.exp(lgam)
    if lp < _EXP_UNDERFLOW:
        return gamma_s  # saturated: the upper tail underflowed to zero
    return gamma_s - math.exp(lp) * h
