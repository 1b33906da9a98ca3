"""Low-level numeric kernels, JIT-compiled when numba is available.

Two implementations exist for every kernel: a loop form that numba compiles
with ``@njit``, and a vectorized pure-numpy form. The active set is chosen at
import time by the ``GAUSSMEANS_BACKEND`` environment variable:

* ``numba`` -- require the JIT path (raises if numba cannot be imported),
* ``numpy`` -- force the vectorized fallback,
* unset    -- numba when importable, numpy otherwise.

``benchmarks/bench_kernels.py`` times the two paths against each other.

The circle kernels integrate, over theta on [0, 2*pi), the quantity
|f(sqrt(x) e^{i theta})|^p together with its first and second derivatives
with respect to x (differentiation under the integral sign). Writing
F, F', F'' for the function and its complex derivatives at z = sqrt(x)e^{i theta}
and G = |F|^2, the derivative of G in x is Re(z F' conj(F))/x, and the second
derivative follows from d(z)/dx = z/(2x) and |z|^2 = x. All powers of
|F| are taken directly on g = |F| to keep intermediates inside double range
even when the circle passes near a zero of f.
"""

from __future__ import annotations

import math
import os

import numpy as np

ENV_VAR = "GAUSSMEANS_BACKEND"


def _resolve_backend() -> str:
    choice = os.environ.get(ENV_VAR, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            f"{ENV_VAR} must be 'numba' or 'numpy' (got {choice!r})"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()


# ----------------------------------------------------------------------
# numpy implementations
# ----------------------------------------------------------------------

def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for k in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * z + coeffs[k]
    return acc


def poly_circle_terms_numpy(c0, c1, c2, x, p, thetas):
    """Integrand samples (|f|^p and its two x-derivatives) at given angles.

    c0, c1, c2: complex coefficient arrays (constant term first) of f, f', f''.
    Returns three float arrays aligned with ``thetas``. Angles where f
    vanishes exactly contribute zero (the integrand is zero there and the
    singular derivative factors carry measure zero).
    """
    z = np.sqrt(x) * np.exp(1j * np.asarray(thetas, dtype=np.float64))
    F = _horner(c0, z)
    F1 = _horner(c1, z)
    F2 = _horner(c2, z)
    G = F.real * F.real + F.imag * F.imag
    g = np.sqrt(G)
    out0 = np.zeros_like(g)
    out1 = np.zeros_like(g)
    out2 = np.zeros_like(g)
    m = g > 0.0
    if not np.any(m):
        return out0, out1, out2
    g = g[m]
    cFn = np.conj(F[m]) / g          # conj(F)/|F|, modulus one
    zF1 = z[m] * F1[m]
    t = (zF1 * cFn).real             # Re(z F' conj F)/|F|
    w2 = (z[m] * z[m] * F2[m] * cFn).real
    q1 = F1[m].real ** 2 + F1[m].imag ** 2
    ph = 0.5 * p
    gp = g ** p
    gpm1 = g ** (p - 1.0)
    gpm2 = g ** (p - 2.0)
    out0[m] = gp
    out1[m] = ph * gpm1 * t / x
    out2[m] = (
        ph * (ph - 1.0) * gpm2 * t * t / (x * x)
        + ph * (gpm1 * (w2 - t) / (2.0 * x) + gpm2 * q1 / 2.0) / x
    )
    return out0, out1, out2


def poly_circle_sums_numpy(c0, c1, c2, x, p, n, start, step):
    """Sums of the three circle integrands over theta_j = 2 pi j / n, j in
    range(start, n, step)."""
    j = np.arange(start, n, step, dtype=np.float64)
    thetas = (2.0 * np.pi / n) * j
    t0, t1, t2 = poly_circle_terms_numpy(c0, c1, c2, x, p, thetas)
    return float(t0.sum()), float(t1.sum()), float(t2.sum())


def exp_circle_terms_numpy(beta_re, beta_im, x, p, thetas):
    """Circle integrand samples for f(z) = exp(beta z).

    With w = beta*sqrt(x) and rho(theta) = Re(w e^{i theta}), the integrand
    is e^{p rho}, and both derivative integrands are e^{p rho} times
    polynomials in rho, Re((w e^{i theta})^2), and |beta|^2.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    rx = math.sqrt(x)
    wr = beta_re * rx
    wi = beta_im * rx
    c = np.cos(thetas)
    s = np.sin(thetas)
    rho = wr * c - wi * s
    # Re((w e^{i theta})^2) = (wr^2 - wi^2) cos 2T - 2 wr wi sin 2T
    c2t = c * c - s * s
    s2t = 2.0 * c * s
    rho2 = (wr * wr - wi * wi) * c2t - 2.0 * wr * wi * s2t
    b2 = beta_re * beta_re + beta_im * beta_im
    ph = 0.5 * p
    gp = np.exp(p * rho)
    out0 = gp
    out1 = ph * gp * rho / x
    out2 = ph * gp * (
        (ph - 1.0) * rho * rho / (x * x)
        + (rho2 - rho) / (2.0 * x * x)
        + b2 / (2.0 * x)
    )
    return out0, out1, out2


def exp_circle_sums_numpy(beta_re, beta_im, x, p, n, start, step):
    j = np.arange(start, n, step, dtype=np.float64)
    thetas = (2.0 * np.pi / n) * j
    t0, t1, t2 = exp_circle_terms_numpy(beta_re, beta_im, x, p, thetas)
    return float(t0.sum()), float(t1.sum()), float(t2.sum())


def d2_scan_numpy(y, b0, q, r0, c0):
    """Evaluate d2(y) = (y - r0) * (B - S) + c0 with B = b0 + y and
    S = sqrt(B^2 + q) over an array of slopes y.

    q is -4*A*C of the discriminant; r0 = x A'/A; c0 = 2 x A' phi.
    """
    y = np.asarray(y, dtype=np.float64)
    B = b0 + y
    S = np.sqrt(B * B + q)
    return (y - r0) * (B - S) + c0


# ----------------------------------------------------------------------
# loop implementations (numba sources)
# ----------------------------------------------------------------------

def _poly_circle_sums_loop(c0, c1, c2, x, p, n, start, step):
    two_pi = 2.0 * math.pi
    rx = math.sqrt(x)
    ph = 0.5 * p
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    for j in range(start, n, step):
        th = two_pi * j / n
        z = complex(rx * math.cos(th), rx * math.sin(th))
        F = 0.0 + 0.0j
        for k in range(c0.shape[0] - 1, -1, -1):
            F = F * z + c0[k]
        F1 = 0.0 + 0.0j
        for k in range(c1.shape[0] - 1, -1, -1):
            F1 = F1 * z + c1[k]
        F2 = 0.0 + 0.0j
        for k in range(c2.shape[0] - 1, -1, -1):
            F2 = F2 * z + c2[k]
        G = F.real * F.real + F.imag * F.imag
        if G <= 0.0:
            continue
        g = math.sqrt(G)
        cFn = F.conjugate() / g
        zF1 = z * F1
        t = (zF1 * cFn).real
        w2 = (z * z * F2 * cFn).real
        q1 = F1.real * F1.real + F1.imag * F1.imag
        gp = g ** p
        gpm1 = g ** (p - 1.0)
        gpm2 = g ** (p - 2.0)
        s0 += gp
        s1 += ph * gpm1 * t / x
        s2 += (
            ph * (ph - 1.0) * gpm2 * t * t / (x * x)
            + ph * (gpm1 * (w2 - t) / (2.0 * x) + gpm2 * q1 / 2.0) / x
        )
    return s0, s1, s2


def _exp_circle_sums_loop(beta_re, beta_im, x, p, n, start, step):
    two_pi = 2.0 * math.pi
    rx = math.sqrt(x)
    wr = beta_re * rx
    wi = beta_im * rx
    b2 = beta_re * beta_re + beta_im * beta_im
    ph = 0.5 * p
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    for j in range(start, n, step):
        th = two_pi * j / n
        c = math.cos(th)
        s = math.sin(th)
        rho = wr * c - wi * s
        c2t = c * c - s * s
        s2t = 2.0 * c * s
        rho2 = (wr * wr - wi * wi) * c2t - 2.0 * wr * wi * s2t
        gp = math.exp(p * rho)
        s0 += gp
        s1 += ph * gp * rho / x
        s2 += ph * gp * (
            (ph - 1.0) * rho * rho / (x * x)
            + (rho2 - rho) / (2.0 * x * x)
            + b2 / (2.0 * x)
        )
    return s0, s1, s2


def _d2_scan_loop(y, b0, q, r0, c0):
    out = np.empty(y.shape[0], dtype=np.float64)
    for i in range(y.shape[0]):
        B = b0 + y[i]
        S = math.sqrt(B * B + q)
        out[i] = (y[i] - r0) * (B - S) + c0
    return out


# ----------------------------------------------------------------------
# backend wiring
# ----------------------------------------------------------------------

_JITTED: dict = {}


def numba_variants() -> dict:
    """Compile (once) and return the @njit kernel twins, keyed by name.

    Raises ImportError when numba is unavailable. Used by the backend
    selection below, by the equivalence tests, and by the benchmark.
    """
    if not _JITTED:
        from numba import njit

        jit = njit(cache=True, fastmath=False)
        _JITTED["poly_circle_sums"] = jit(_poly_circle_sums_loop)
        _JITTED["exp_circle_sums"] = jit(_exp_circle_sums_loop)
        _JITTED["d2_scan"] = jit(_d2_scan_loop)
    return dict(_JITTED)


if BACKEND == "numba":
    _active = numba_variants()
    poly_circle_sums = _active["poly_circle_sums"]
    exp_circle_sums = _active["exp_circle_sums"]
    d2_scan = _active["d2_scan"]
else:
    poly_circle_sums = poly_circle_sums_numpy
    exp_circle_sums = exp_circle_sums_numpy
    d2_scan = d2_scan_numpy
