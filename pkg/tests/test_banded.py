import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from compact6.banded import BandedMatrix, SingularMatrixError, banded_lu, banded_matvec, dense_oracle_solve
from compact6.grid import make_grid
from compact6.operators import build_first_derivative, build_second_derivative
from compact6.stepper import assemble_mass_system


def _tridiag(n, lo, d, up):
    return np.diag(np.full(n - 1, lo), -1) + np.diag(np.full(n, d)) + np.diag(np.full(n - 1, up), 1)


def test_identity_solve():
    m = BandedMatrix.from_dense(np.eye(5), 0, 0)
    rhs = np.arange(1.0, 6.0)
    np.testing.assert_array_equal(banded_lu(m).solve(rhs), rhs)


def test_compact_tridiagonal_all_ones():
    a = _tridiag(30, 1 / 3, 1.0, 1 / 3)
    m = BandedMatrix.from_dense(a, 1, 1)
    rhs = a @ np.ones(30)
    np.testing.assert_allclose(banded_lu(m).solve(rhs), 1.0, rtol=0, atol=1e-14)


def test_pentadiagonal_vs_dense_oracle():
    a = np.array([[6.0, 2, 1, 0], [1, 7, 2, 1], [3, 1, 8, 2], [0, 1, 2, 5]])
    rhs = np.array([1.0, -2, 3, 4])
    x = banded_lu(BandedMatrix.from_dense(a, 2, 2)).solve(rhs)
    np.testing.assert_allclose(x, dense_oracle_solve(a, rhs), rtol=0, atol=1e-12)
    np.testing.assert_allclose(x, np.linalg.inv(a) @ rhs, rtol=0, atol=1e-12)


def test_partial_pivoting_needed():
    # zero leading pivot: only solvable with row exchanges
    a = np.array([[0.0, 1, 0], [1, 0, 1], [0, 1, 1]])
    m = BandedMatrix.from_dense(a, 1, 1)
    rhs = np.array([1.0, 2, 3])
    np.testing.assert_allclose(a @ banded_lu(m).solve(rhs), rhs, atol=1e-14)


def test_singular_names_pivot():
    a = _tridiag(6, 1.0, 2.0, 1.0)
    a[:, 3] = 0.0  # no row exchange can supply a pivot for column 3
    with pytest.raises(SingularMatrixError) as err:
        banded_lu(BandedMatrix.from_dense(a, 1, 1))
    assert err.value.index == 3


def test_matvec_examples(rng):
    a = rng.standard_normal((7, 7))
    a[np.triu_indices(7, 3)] = 0
    a[np.tril_indices(7, -2)] = 0
    m = BandedMatrix.from_dense(a, 1, 2)
    assert not np.any(banded_matvec(m, np.zeros(7)))
    v = rng.standard_normal(7)
    np.testing.assert_array_equal(banded_matvec(BandedMatrix.from_dense(np.eye(7), 0, 0), v), v)
    np.testing.assert_allclose(m @ v, a @ v, rtol=1e-15)
    with pytest.raises(ValueError):
        banded_matvec(m, np.zeros(6))


def test_first_derivative_row_on_x_squared():
    g = make_grid(0, 1.6, 16)  # h = 0.1
    op = build_first_derivative(g)
    u = g.x**2
    got = banded_matvec(op.rhs, u[g.unknown])[5]
    coeffs = [-1 / 36, -7 / 9, 0.0, 7 / 9, 1 / 36]
    j = 7  # node of unknown row 5
    want = sum(c * u[j - 2 + k] for k, c in enumerate(coeffs))
    assert got == pytest.approx(want, rel=1e-15)


def test_dense_oracle_examples(rng):
    np.testing.assert_array_equal(dense_oracle_solve(np.eye(4), [1.0, 2, 3, 4]), [1, 2, 3, 4])
    hilb = scipy.linalg.hilbert(4)
    np.testing.assert_allclose(dense_oracle_solve(hilb, hilb.sum(axis=1)), 1.0, atol=1e-8)
    n, kl, ku = 50, 3, 2
    a = rng.uniform(-1, 1, (n, n))
    i, j = np.indices(a.shape)
    a[(j - i > ku) | (i - j > kl)] = 0
    a += np.diag(np.abs(a).sum(axis=1) + 1)
    rhs = rng.standard_normal(n)
    x = banded_lu(BandedMatrix.from_dense(a, kl, ku)).solve(rhs)
    np.testing.assert_allclose(x, dense_oracle_solve(a, rhs), rtol=0, atol=1e-12)
    with pytest.raises(SingularMatrixError):
        dense_oracle_solve(np.zeros((3, 3)), np.ones(3))


def test_from_dense_rejects_out_of_band():
    with pytest.raises(ValueError):
        BandedMatrix.from_dense(np.ones((4, 4)), 1, 1)


def test_lu_many_rhs(rng):
    a = _tridiag(20, 1 / 3, 1.0, 1 / 3)
    lu = banded_lu(BandedMatrix.from_dense(a, 1, 1))
    R = rng.standard_normal((20, 6))
    np.testing.assert_allclose(a @ lu.solve(R), R, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(N=st.integers(8, 200), delta=st.floats(0, 5), seed=st.integers(0, 2**31))
def test_assembled_systems_match_dense(N, delta, seed):
    r = np.random.default_rng(seed)
    g = make_grid(0, 2 * np.pi, N)
    op1, op2 = build_first_derivative(g), build_second_derivative(g)
    mass, mass_lu = assemble_mass_system(g, delta, op2)
    systems = [(op1.lhs, op1.lu), (op2.lhs, op2.lu), (mass, mass_lu)]
    for kind in ("interior",):
        o1, o2 = build_first_derivative(g, kind), build_second_derivative(g, kind)
        systems += [(o1.lhs, o1.lu), (o2.lhs, o2.lu)]
    for m, lu in systems:
        a = m.to_dense()
        rhs = r.standard_normal(m.n)
        want = dense_oracle_solve(a, rhs)
        assert np.max(np.abs(lu.solve(rhs) - want)) <= 1e-10 * np.max(np.abs(want))


@settings(max_examples=20, deadline=None)
@given(N=st.integers(8, 120), seed=st.integers(0, 2**31))
def test_symmetric_band_transpose(N, seed):
    # interior second-derivative rhs band is symmetric: <B x, y> == <x, B y>
    r = np.random.default_rng(seed)
    B = build_second_derivative(make_grid(0, 1, N), "interior").rhs
    x, y = r.standard_normal((2, B.n))
    assert banded_matvec(B, x) @ y == pytest.approx(x @ banded_matvec(B, y), rel=1e-12, abs=1e-12)
    np.testing.assert_array_equal(B.to_dense(), B.to_dense().T)
