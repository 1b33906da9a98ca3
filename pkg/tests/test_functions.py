"""Function representations, spec parsing, and the symmetry helpers."""

import math

import numpy as np
import pytest

from gaussmeans.functions import (
    EntireFunction,
    parse_complex,
    parse_function_spec,
)


def test_parse_complex_forms():
    assert parse_complex("1") == 1.0
    assert parse_complex("-2.5") == -2.5
    assert parse_complex("1+2i") == 1 + 2j
    assert parse_complex("1+2j") == 1 + 2j
    assert parse_complex("j") == 1j
    assert parse_complex("-j") == -1j
    assert parse_complex(" 0.5 - 0.25i ") == 0.5 - 0.25j
    with pytest.raises(ValueError, match="complex literal"):
        parse_complex("one")
    with pytest.raises(ValueError):
        parse_complex("")


def test_monomial_construction():
    f = EntireFunction.monomial(3)
    assert f.kind == "monomial"
    assert f.degree == 3
    np.testing.assert_array_equal(f.coefficients, [0, 0, 0, 1])
    assert f(2.0) == pytest.approx(8.0)
    with pytest.raises(ValueError, match="nonnegative"):
        EntireFunction.monomial(-1)
    with pytest.raises(ValueError):
        EntireFunction.monomial(2.5)


def test_polynomial_trims_trailing_zeros():
    f = EntireFunction.polynomial([1, 2, 0, 0])
    assert f.degree == 1
    with pytest.raises(ValueError, match="nonzero"):
        EntireFunction.polynomial([0, 0])
    with pytest.raises(ValueError, match="finite"):
        EntireFunction.polynomial([1.0, float("nan")])
    with pytest.raises(ValueError, match="nonempty"):
        EntireFunction.polynomial([])


def test_exponential_evaluation():
    f = EntireFunction.exponential(2.0 - 1.0j)
    z = 0.3 + 0.7j
    assert f(z) == pytest.approx(np.exp((2 - 1j) * z))
    assert f.coefficients is None
    assert f.degree is None
    assert not f.is_coefficient_based
    with pytest.raises(ValueError, match="finite"):
        EntireFunction.exponential(float("inf"))


def test_jet_coefficient_arrays():
    f = EntireFunction.polynomial([3.0, 2.0, 5.0])
    c0, c1, c2 = f.jet_coefficient_arrays()
    np.testing.assert_array_equal(c0, [3, 2, 5])
    np.testing.assert_array_equal(c1, [2, 10])   # d/dz: 2 + 10 z
    np.testing.assert_array_equal(c2, [10])      # d2/dz2: 10
    # constant function: derivative arrays must stay nonempty for the kernels
    g = EntireFunction.monomial(0)
    c0, c1, c2 = g.jet_coefficient_arrays()
    np.testing.assert_array_equal(c1, [0])
    np.testing.assert_array_equal(c2, [0])
    with pytest.raises(ValueError, match="no stored coefficients"):
        EntireFunction.exponential(1.0).jet_coefficient_arrays()


def test_squared_coefficients():
    f = EntireFunction.polynomial([1.0, 1.0 + 1.0j])
    np.testing.assert_allclose(f.squared_coefficients(), [1.0, 2.0])


def test_scaled_multiplies_coefficients():
    f = EntireFunction.polynomial([1.0, 2.0])
    g = f.scaled(3.0)
    np.testing.assert_array_equal(g.coefficients, [3.0, 6.0])
    with pytest.raises(ValueError, match="nonzero"):
        f.scaled(0.0)
    with pytest.raises(ValueError, match="coefficient-based"):
        EntireFunction.exponential(1.0).scaled(2.0)


def test_rotated_is_composition_with_rotation():
    theta0 = 0.8
    rot = complex(math.cos(theta0), math.sin(theta0))
    f = EntireFunction.polynomial([1.0, -2.0, 0.5j])
    g = f.rotated(theta0)
    for z in (0.3, 1.0 - 0.2j, -1.1j):
        assert g(z) == pytest.approx(f(rot * z), rel=1e-14)
    h = EntireFunction.exponential(1.0 + 0.5j).rotated(theta0)
    assert h.beta == pytest.approx((1.0 + 0.5j) * rot)


def test_parse_function_spec_round_trips():
    for spec in ("mono:3", "poly:1.0,1.0", "exp:1.0", "exp:0.5+0.25i"):
        f = parse_function_spec(spec)
        g = parse_function_spec(f.describe())
        assert g.kind == f.kind
        if f.is_coefficient_based:
            np.testing.assert_array_equal(g.coefficients, f.coefficients)
        else:
            assert g.beta == f.beta


def test_parse_function_spec_errors_name_the_problem():
    with pytest.raises(ValueError, match="mono:2"):
        parse_function_spec("nonsense")
    with pytest.raises(ValueError, match="degree must be an integer"):
        parse_function_spec("mono:x")
    with pytest.raises(ValueError, match="nonnegative"):
        parse_function_spec("mono:-1")
    with pytest.raises(ValueError, match="empty polynomial"):
        parse_function_spec("poly:")
    with pytest.raises(ValueError, match="unknown function kind"):
        parse_function_spec("bessel:1")
    with pytest.raises(ValueError, match="taylor:@path"):
        parse_function_spec("taylor:")
    with pytest.raises(ValueError, match="tail"):
        parse_function_spec("taylor:1,2;cutoff=3")


def test_taylor_inline_spec():
    f = parse_function_spec("taylor:1,0.5,0.25;tail=1e-9")
    assert f.kind == "taylor"
    np.testing.assert_allclose(f.coefficients, [1.0, 0.5, 0.25])
    assert f.tail_bound == pytest.approx(1e-9)
    assert parse_function_spec("taylor:2,1").tail_bound == 0.0


def test_taylor_file_parsing(tmp_path):
    path = tmp_path / "coeffs.txt"
    path.write_text(
        "# taylor coefficients, constant term first\n"
        "1.0\n"
        "0.5+0.5i\n"
        "\n"
        "0.25   # inline comment\n"
        "tail: 1e-9\n"
    )
    f = parse_function_spec(f"taylor:@{path}")
    assert f.kind == "taylor"
    np.testing.assert_allclose(f.coefficients, [1.0, 0.5 + 0.5j, 0.25])
    assert f.tail_bound == pytest.approx(1e-9)
    # round trip through describe()
    g = parse_function_spec(f.describe())
    np.testing.assert_allclose(g.coefficients, f.coefficients)
    assert g.tail_bound == f.tail_bound


def test_taylor_file_errors(tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing here\n")
    with pytest.raises(ValueError, match="no coefficients"):
        parse_function_spec(f"taylor:@{empty}")
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\nnot-a-number\n")
    with pytest.raises(ValueError, match="bad.txt:2"):
        parse_function_spec(f"taylor:@{bad}")


def test_describe_is_stable():
    assert parse_function_spec("mono:0").describe() == "mono:0"
    assert "poly:" in EntireFunction.polynomial([1, 1]).describe()
    assert "exp:" in EntireFunction.exponential(1.0).describe()
