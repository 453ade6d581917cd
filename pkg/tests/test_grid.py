import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from compact6.grid import Field1D, GridError, make_grid, make_grid_2d, sample


def test_make_grid_examples():
    g = make_grid(0, 30, 40)
    assert g.h == 0.75 and g.x[0] == 0 and g.x[40] == 30
    assert make_grid(0, 1, 8).h == 0.125
    g = make_grid(-10, 100, 600)
    assert g.h == pytest.approx(110 / 600, rel=1e-15)
    assert g.size == 601


@pytest.mark.parametrize("a,b,N", [(0, 1, 7), (0, 1, 0), (1, 1, 10), (2, 1, 10), (0, math.inf, 10)])
def test_make_grid_rejects(a, b, N):
    with pytest.raises(GridError):
        make_grid(a, b, N)


def test_error_message_mentions_minimum():
    with pytest.raises(GridError, match="N >= 8"):
        make_grid(0, 1, 4)


def test_non_integer_N():
    with pytest.raises(GridError):
        make_grid(0, 1, 10.0)


def test_sample_examples():
    g = make_grid(0, 30, 40)
    assert not np.any(sample(lambda x: 0 * x, g).values)
    np.testing.assert_array_equal(sample(np.sin, g).values, np.sin(0.75 * np.arange(41)))
    c, k = 0.03, 0.5
    g = make_grid(0, 30, 60)
    f = sample(lambda x: 3 * c / np.cosh(k * (x - 10)) ** 2, g)
    assert f.values.max() == pytest.approx(0.09, abs=1e-15)
    assert g.x[np.argmax(f.values)] == 10


def test_sample_scalar_only_callable():
    g = make_grid(0, 1, 8)
    assert sample(lambda x: math.exp(x), g).values[-1] == pytest.approx(math.e)


def test_sample_non_finite():
    g = make_grid(-1, 1, 8)
    with np.errstate(divide="ignore"), pytest.raises(GridError, match="node 4"):
        sample(lambda x: 1.0 / x, g)


def test_field_length_checked():
    g = make_grid(0, 1, 8)
    with pytest.raises(GridError):
        Field1D(np.zeros(5), g)
    Field1D(np.full(9, np.nan), g, diverged=True)


def test_grid2d_layout():
    g = make_grid_2d(0, 1, 8, 0, 2, 10)
    X, Y = g.mesh()
    assert X.shape == (9, 11) == g.shape
    # y runs fastest along a row
    assert np.all(X[3] == X[3, 0]) and np.all(np.diff(Y[3]) > 0)
    f = sample(lambda x, y: x + 10 * y, g)
    assert f.values[2, 5] == g.gx.x[2] + 10 * g.gy.x[5]


@given(
    a=st.floats(-1e3, 1e3),
    width=st.floats(1e-3, 1e3),
    N=st.integers(8, 5000),
)
def test_grid_spacing_property(a, width, N):
    b = a + width
    g = make_grid(a, b, N)
    assert g.h > 0
    assert abs(g.h * N - (b - a)) <= 4 * np.spacing(b - a)
    assert abs((g.x[-1] - g.x[0]) - (b - a)) <= 1e-12 * max(abs(a), abs(b), b - a)


@given(N=st.integers(8, 200), j=st.integers(0, 200))
def test_sample_is_bitwise(N, j):
    j = min(j, N)
    g = make_grid(-2.5, 7.25, N)
    f = sample(np.cos, g)
    assert f.values[j] == np.cos(-2.5 + j * g.h)
