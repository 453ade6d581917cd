import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compact6.diagnostics import (
    ErrorReport,
    InvariantReport,
    bore_rates,
    error_norms,
    invariants,
    leading_undulation,
    observed_order,
    percent_error,
    simpson,
)
from compact6.grid import Field1D, make_grid, sample
from compact6.models import SolitaryWaveParams, analytic_invariants_solitary, solitary_wave
from compact6.operators import build_first_derivative


def test_error_norms_zero():
    e = error_norms(np.ones(5), np.ones(5))
    assert (e.linf, e.l1, e.l2) == (0, 0, 0)


def test_error_norms_h_weighted_example():
    e = error_norms(np.array([1.0, 0, 0, 0]), np.zeros(4), h=0.5, weighting="h")
    assert e.linf == 1 and e.l1 == 0.5 and e.l2 == pytest.approx(math.sqrt(0.5))


def test_error_norms_mean_weighting():
    e = error_norms(np.array([1.0, 0, 0, 0]), np.zeros(4))
    assert e.l1 == 0.25 and e.l2 == 0.5


def test_error_norms_errors():
    g1, g2 = make_grid(0, 1, 8), make_grid(0, 2, 8)
    with pytest.raises(ValueError):
        error_norms(Field1D(np.zeros(9), g1), Field1D(np.zeros(9), g2))
    with pytest.raises(ValueError):
        error_norms(np.zeros(3), np.zeros(4))
    with pytest.raises(ValueError):
        error_norms(np.zeros(3), np.zeros(3), weighting="h")
    with pytest.raises(ValueError):
        error_norms(np.zeros(3), np.zeros(3), weighting="max")


@given(k=st.integers(-60, 60), seed=st.integers(0, 2**31), weighting=st.sampled_from(["mean", "h"]))
def test_norm_homogeneity_exact(k, seed, weighting):
    # power-of-two scales commute with every rounding step
    e = np.random.default_rng(seed).standard_normal(17)
    s = -(2.0**k)
    a = error_norms(e, np.zeros(17), h=0.125, weighting=weighting)
    b = error_norms(s * e, np.zeros(17), h=0.125, weighting=weighting)
    assert (b.linf, b.l1, b.l2) == (abs(s) * a.linf, abs(s) * a.l1, abs(s) * a.l2)


@settings(max_examples=50)
@given(
    s=st.floats(1e-100, 1e100) | st.floats(-1e100, -1e-100),
    seed=st.integers(0, 2**31),
    weighting=st.sampled_from(["mean", "h"]),
)
def test_norm_homogeneity(s, seed, weighting):
    e = np.random.default_rng(seed).standard_normal(17)
    a = error_norms(e, np.zeros(17), h=0.1, weighting=weighting)
    b = error_norms(s * e, np.zeros(17), h=0.1, weighting=weighting)
    for x, y in ((a.linf, b.linf), (a.l1, b.l1), (a.l2, b.l2)):
        assert y == pytest.approx(abs(s) * x, rel=1e-13)


def test_observed_order():
    assert observed_order(64.0, 1.0) == 6.0
    assert observed_order(3.9937e-6 * 10 ** (6.0844 * math.log10(2)), 3.9937e-6) == pytest.approx(6.0844)
    assert observed_order(2.7099e-4, 3.9937e-6) == pytest.approx(6.0844, abs=1e-4)
    assert observed_order(8.9386e-3, 8.7621e-4, base=10) == pytest.approx(1.0087, abs=1e-4)
    assert math.isnan(observed_order(0.0, 1.0))


def test_with_rates():
    coarse = ErrorReport(1.0, 2.0, 4.0)
    fine = ErrorReport(1 / 64, 2 / 64, 4 / 64).with_rates(coarse)
    assert (fine.rate_linf, fine.rate_l1, fine.rate_l2) == (6.0, 6.0, 6.0)


def test_simpson_examples():
    assert simpson(np.ones(11), 0.1) == pytest.approx(1.0, abs=1e-14)
    x = np.linspace(0, np.pi, 101)
    # composite Simpson error here is pi h^4/180 * ~1 = 1.08e-8
    assert simpson(np.sin(x), x[1]) == pytest.approx(2.0, abs=1.2e-8)
    x = np.linspace(0, np.pi, 201)
    assert simpson(np.sin(x), x[1]) == pytest.approx(2.0, abs=1e-9)
    x = np.linspace(0, 1, 5)
    assert simpson(x**3, 0.25) == 0.25
    with pytest.raises(ValueError):
        simpson([1.0, 2.0], 1.0)


@pytest.mark.parametrize("n", [3, 5, 7, 9])
def test_simpson_odd_intervals_exact_for_cubics(n):
    x = np.linspace(0, 2, n + 1)
    assert simpson(x**3 - x, x[1]) == pytest.approx(4.0 - 2.0, rel=1e-14)


@pytest.mark.parametrize("parity", [0, 1])
def test_simpson_fourth_order(parity):
    f = lambda x: np.exp(np.sin(3 * x))  # noqa: E731
    ref = simpson(f(np.linspace(0, 2, 200001)), 2 / 200000)
    errs = []
    for n in (40, 80, 160, 320):
        n += parity
        x = np.linspace(0, 2, n + 1)
        errs.append(abs(simpson(f(x), x[1]) - ref))
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert all(3.7 <= r <= 4.3 for r in rates), rates


def test_invariants_zero_and_percent():
    g = make_grid(0, 30, 120)
    rep = invariants(np.zeros(g.size), 1.0, build_first_derivative(g))
    assert (rep.I1, rep.I2, rep.I3) == (0, 0, 0)
    assert percent_error(0.36 * 1.0001, 0.36) == pytest.approx(0.01)
    with pytest.raises(ValueError):
        percent_error(1.0, 0.0)


def test_invariants_of_exact_solitary_wave():
    p = SolitaryWaveParams(0.03, 15.0, 1.0)
    ic, _ = solitary_wave(p)
    g = make_grid(-15, 45, 240)
    rep = invariants(sample(ic, g), 1.0, build_first_derivative(g)).against(analytic_invariants_solitary(p))
    assert rep.pct_err_1 < 1e-5 and rep.pct_err_2 < 1e-5 and rep.pct_err_3 < 1e-5


def test_bore_rates_examples():
    t = np.array([150, 200, 300, 400, 600, 800.0])
    lin = [(ti, InvariantReport(5e-3 * ti, 1.0, 2.0)) for ti in t]
    M = bore_rates(lin)
    assert M[0] == pytest.approx(5e-3, rel=1e-12)
    assert M[1] == pytest.approx(0.0, abs=1e-15) and M[2] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        bore_rates(lin[:1])
    with pytest.raises(ValueError):
        bore_rates([(1.0, lin[0][1]), (1.0, lin[1][1])])


def test_leading_undulation():
    g = make_grid(0, 10, 20)
    u = np.zeros(g.size)
    u[7] = 1.0
    assert leading_undulation(Field1D(u, g)) == (g.x[7], 1.0)
    assert leading_undulation(np.ones(g.size), g.x) == (10.0, 1.0)
    u[15] = 1.0
    assert leading_undulation(u, g.x)[0] == g.x[15]
    with pytest.raises(ValueError):
        leading_undulation(u)
