import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renlab.series import (
    ExtractionError,
    PowerSeries,
    SingularSeriesError,
    check_convergence,
    richardson,
    series_arith,
    stencil_coefficients,
)


def ps(*c):
    return PowerSeries.from_list(c)


def test_invert_geometric():
    out = series_arith(ps(1, 0, 0, 1 / 3, 0), op="invert")
    assert np.allclose(out.coeffs, [1, 0, 0, -1 / 3, 0])


def test_power_four_thirds():
    out = series_arith(ps(1, 0, 0, 0.25, 0), op="power", q="4/3")
    assert np.allclose(out.coeffs, [1, 0, 0, 1 / 3, 0])


def test_mul_recovers_x():
    out = series_arith(ps(0, 1, 0, -0.25), ps(1, 0, 0.25, 0), "mul").truncate(3)
    assert np.allclose(out.coeffs, [0, 1, 0, 0])


def test_invert_zero_leading_coefficient():
    with pytest.raises(SingularSeriesError):
        series_arith(ps(0, 1, 0), op="invert")


def test_tensor_times_tensor_rejected():
    t = PowerSeries(np.zeros((3, 2, 2)), "tensor")
    with pytest.raises(TypeError):
        series_arith(t, t, "mul")


def test_tensor_scalar_product():
    t = PowerSeries(np.array([np.eye(2), np.zeros((2, 2))]), "tensor")
    out = series_arith(ps(2.0, 1.0), t, "mul")
    assert out.kind == "tensor"
    assert np.allclose(out.coeffs[1], np.eye(2))


def test_compose_matches_direct_evaluation():
    a = ps(1, 2, 3, 4)
    b = ps(0, 1, 1, 0)
    out = series_arith(a, b, "compose")
    x = 1e-3
    assert abs(out(x) - a(b(x))) < 1e-10


def test_compose_requires_vanishing_inner():
    with pytest.raises(ValueError):
        series_arith(ps(1, 1), ps(1, 1), "compose")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.floats(0.5, 2))
def test_invert_is_inverse(tail, c0):
    a = ps(c0, *tail)
    prod = series_arith(a, series_arith(a, op="invert"), "mul").truncate(4)
    assert np.allclose(prod.coeffs, [1, 0, 0, 0, 0], atol=1e-9)


def test_stencil_recovers_taylor_coefficients():
    c, err, _ = stencil_coefficients(lambda x: np.exp(x) * np.cos(x), N=4)
    assert np.allclose(c, [1, 1, 0, -1 / 3, -1 / 6], atol=1e-9)


def test_richardson_removes_leading_powers():
    hs = [0.1 / 2 ** k for k in range(4)]
    vals = [2.0 + 3 * h + 5 * h * h for h in hs]
    _, best, _, _ = richardson(vals, hs, [1, 2, 3])
    assert abs(best - 2.0) < 1e-12


def test_nonconvergent_table_raises_with_table():
    with pytest.raises(ExtractionError) as exc:
        check_convergence([1.0, 0.9, 0.8], 1e-12, table="T")
    assert exc.value.table == "T"
