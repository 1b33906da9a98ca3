"""The JIT kernels must agree with their pure-numpy twins bit-for-nearly-bit."""

import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaussmeans import kernels

try:
    JITTED = kernels.numba_variants()
    HAS_NUMBA = True
except ImportError:
    JITTED = {}
    HAS_NUMBA = False

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not importable")


def _random_jet(rng, deg):
    c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    j = np.arange(deg + 1, dtype=np.float64)
    return c, j * c, j * (j - 1.0) * c


def _close(a, b, rel=1e-11):
    # the two backends sum in different orders, so errors are relative to
    # the largest component, not to each (possibly cancelled) sum
    scale = max(1.0, *(abs(v) for v in a), *(abs(v) for v in b))
    for u, v in zip(a, b):
        assert abs(u - v) <= rel * scale


@needs_numba
@given(deg=st.integers(min_value=0, max_value=6),
       x=st.floats(min_value=1e-3, max_value=9.0),
       p=st.floats(min_value=0.5, max_value=4.0),
       seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_poly_sums_numba_matches_numpy(deg, x, p, seed):
    rng = np.random.default_rng(seed)
    c0, c1, c2 = _random_jet(rng, deg)
    for (n, start, step) in [(64, 0, 1), (128, 1, 2), (256, 0, 2)]:
        a = kernels.poly_circle_sums_numpy(c0, c1, c2, x, p, n, start, step)
        b = JITTED["poly_circle_sums"](c0, c1, c2, x, p, n, start, step)
        _close(a, b)


@needs_numba
@given(br=st.floats(min_value=-2.0, max_value=2.0),
       bi=st.floats(min_value=-2.0, max_value=2.0),
       x=st.floats(min_value=1e-3, max_value=9.0),
       p=st.floats(min_value=0.5, max_value=4.0))
@settings(max_examples=60, deadline=None)
def test_exp_sums_numba_matches_numpy(br, bi, x, p):
    for (n, start, step) in [(64, 0, 1), (128, 1, 2)]:
        a = kernels.exp_circle_sums_numpy(br, bi, x, p, n, start, step)
        b = JITTED["exp_circle_sums"](br, bi, x, p, n, start, step)
        _close(a, b)


@needs_numba
def test_d2_scan_numba_matches_numpy():
    rng = np.random.default_rng(7)
    y = np.abs(rng.standard_normal(4096)) * 5.0
    b0, q, r0, c0 = 2.5, 1.3, -0.7, 0.2
    a = kernels.d2_scan_numpy(y, b0, q, r0, c0)
    b = JITTED["d2_scan"](y, b0, q, r0, c0)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-15)


def test_node_doubling_decomposition():
    """sum over the 2N-grid = sum over even nodes + sum over odd nodes,
    and the even nodes of the 2N-grid are exactly the N-grid. This identity
    is what lets circle_mean reuse previous sums when it doubles N."""
    rng = np.random.default_rng(11)
    c0, c1, c2 = _random_jet(rng, 3)
    x, p, n = 2.25, 1.5, 128
    full = kernels.poly_circle_sums_numpy(c0, c1, c2, x, p, 2 * n, 0, 1)
    even = kernels.poly_circle_sums_numpy(c0, c1, c2, x, p, 2 * n, 0, 2)
    odd = kernels.poly_circle_sums_numpy(c0, c1, c2, x, p, 2 * n, 1, 2)
    coarse = kernels.poly_circle_sums_numpy(c0, c1, c2, x, p, n, 0, 1)
    _close(full, tuple(e + o for e, o in zip(even, odd)), rel=1e-13)
    _close(even, coarse, rel=1e-13)


def test_poly_terms_match_direct_evaluation():
    # spot-check the integrand samples against naive |f|^p at a few angles
    c = np.array([1.0 + 0j, 2.0 - 1j, 0.5j])
    j = np.arange(3.0)
    thetas = np.array([0.0, 0.9, 2.0, 5.1])
    x, p = 1.7, 2.6
    t0, _, _ = kernels.poly_circle_terms_numpy(c, j * c, j * (j - 1) * c,
                                               x, p, thetas)
    z = np.sqrt(x) * np.exp(1j * thetas)
    direct = np.abs(c[0] + c[1] * z + c[2] * z * z) ** p
    np.testing.assert_allclose(t0, direct, rtol=1e-12)


def test_exp_terms_match_direct_evaluation():
    thetas = np.linspace(0.0, 6.0, 13)
    x, p = 0.8, 1.3
    beta = 1.2 - 0.4j
    t0, _, _ = kernels.exp_circle_terms_numpy(beta.real, beta.imag, x, p, thetas)
    z = np.sqrt(x) * np.exp(1j * thetas)
    direct = np.abs(np.exp(beta * z)) ** p
    np.testing.assert_allclose(t0, direct, rtol=1e-12)


def test_d2_scan_reference_shape():
    y = np.array([0.0, 1.0])
    out = kernels.d2_scan_numpy(y, 1.0, 0.0, 0.0, 0.0)
    # with q=0: S=|B|, so d2 = (y - 0)(B - |B|) + 0 = 0 for B >= 0
    np.testing.assert_allclose(out, [0.0, 0.0], atol=1e-15)


# ----------------------------------------------------------------------
# backend selection (runs a fresh interpreter so import-time logic fires)
# ----------------------------------------------------------------------

def _probe_backend(env_value):
    code = (
        "import gaussmeans.kernels as k;"
        "print(k.BACKEND);"
        "print(k.poly_circle_sums is k.poly_circle_sums_numpy)"
    )
    import os
    env = dict(os.environ)
    if env_value is None:
        env.pop(kernels.ENV_VAR, None)
    else:
        env[kernels.ENV_VAR] = env_value
    return subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)


def test_backend_env_forces_numpy():
    proc = _probe_backend("numpy")
    assert proc.returncode == 0, proc.stderr
    backend, is_numpy = proc.stdout.split()
    assert backend == "numpy"
    assert is_numpy == "True"


@needs_numba
def test_backend_env_forces_numba():
    proc = _probe_backend("numba")
    assert proc.returncode == 0, proc.stderr
    backend, is_numpy = proc.stdout.split()
    assert backend == "numba"
    assert is_numpy == "False"


def test_backend_env_rejects_garbage():
    proc = _probe_backend("cuda")
    assert proc.returncode != 0
    assert "GAUSSMEANS_BACKEND" in proc.stderr
