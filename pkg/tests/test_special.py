import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from airdemand.errors import DomainError
from airdemand.stats import f_cdf, f_sf, reg_incomplete_beta, t_cdf, t_sf
from oracles import f_sf_quad, ibeta_quad, t_cdf_quad


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 3.0), (7.0, 2.5), (120.0, 0.8)])
def test_beta_boundaries(a, b):
    assert reg_incomplete_beta(a, b, 0.0) == 0.0
    assert reg_incomplete_beta(a, b, 1.0) == 1.0


@pytest.mark.parametrize("x", [0.0, 0.1, 0.37, 0.5, 0.9, 1.0])
def test_uniform_case(x):
    assert reg_incomplete_beta(1.0, 1.0, x) == pytest.approx(x, abs=1e-15)


def test_beta_two_two_at_half():
    assert reg_incomplete_beta(2.0, 2.0, 0.5) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("x", [0.05, 0.3, 0.62, 0.95])
def test_beta_two_two_closed_form(x):
    assert reg_incomplete_beta(2.0, 2.0, x) == pytest.approx(3 * x**2 - 2 * x**3, abs=1e-14)


@pytest.mark.parametrize("args", [(0.0, 1.0, 0.5), (1.0, -1.0, 0.5), (1.0, 1.0, 1.5), (1.0, 1.0, -0.1), (1.0, 1.0, math.nan)])
def test_beta_domain(args):
    with pytest.raises(DomainError):
        reg_incomplete_beta(*args)


@pytest.mark.parametrize("df", [0.5, 1.0, 3.0, 30.0, 1e4])
def test_t_at_zero(df):
    assert t_cdf(0.0, df) == 0.5


def test_cauchy_closed_form():
    assert t_cdf(1.0, 1.0) == pytest.approx(0.75, abs=1e-14)
    for t in (-3.0, -0.2, 0.7, 12.0):
        assert t_cdf(t, 1.0) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-13)


def test_t_two_df_closed_form():
    for t in (-4.0, -1.0, 0.3, 2.5):
        assert t_cdf(t, 2.0) == pytest.approx(0.5 + t / (2 * math.sqrt(2 + t * t)), abs=1e-13)


@given(t=st.floats(-50, 50), df=st.floats(0.2, 500))
def test_t_symmetry(t, df):
    assert t_cdf(t, df) + t_cdf(-t, df) == pytest.approx(1.0, abs=1e-12)
    assert t_sf(t, df) == pytest.approx(t_cdf(-t, df), abs=1e-12)


@given(t=st.floats(-20, 20), df=st.floats(0.5, 200))
def test_t_cdf_monotone_in_t(t, df):
    assert t_cdf(t, df) <= t_cdf(t + 0.5, df)


def test_t_domain():
    with pytest.raises(DomainError):
        t_cdf(1.0, 0.0)


@pytest.mark.parametrize("d1,d2", [(1, 1), (5, 246), (3.5, 12)])
def test_f_at_zero(d1, d2):
    assert f_sf(0.0, d1, d2) == 1.0
    assert f_cdf(0.0, d1, d2) == 0.0


def test_published_anova_p_value():
    assert f_sf(2.287, 5, 246) == pytest.approx(0.047, abs=0.002)


@given(t=st.floats(-15, 15), df=st.floats(0.5, 300))
def test_f_one_is_t_squared(t, df):
    assert f_sf(t * t, 1, df) == pytest.approx(2 * (1 - t_cdf(abs(t), df)), abs=1e-9)


def test_f_domain():
    with pytest.raises(DomainError):
        f_sf(-1.0, 2, 3)
    with pytest.raises(DomainError):
        f_sf(1.0, 0, 3)


ALPHAS = [1.0, 1.5, 2.0, 5.0, 30.0]
XS = [0.01, 0.2, 0.5, 0.77, 0.99]


@pytest.mark.parametrize("a", ALPHAS)
@pytest.mark.parametrize("b", ALPHAS)
def test_beta_against_quadrature(a, b):
    for x in XS:
        assert abs(reg_incomplete_beta(a, b, x) - ibeta_quad(a, b, x)) < 1e-9


@pytest.mark.parametrize("df", [1.0, 2.5, 4.0, 30.0, 246.0])
def test_t_against_quadrature(df):
    for t in (-6.0, -1.3, -0.01, 0.4, 2.0, 9.0):
        assert abs(t_cdf(t, df) - t_cdf_quad(t, df)) < 1e-10


@pytest.mark.parametrize("d1,d2", [(1, 5), (2, 2), (5, 246), (10, 3.5)])
def test_f_against_quadrature(d1, d2):
    for f in (0.1, 0.9, 2.287, 6.0):
        assert abs(f_sf(f, d1, d2) - f_sf_quad(f, d1, d2)) < 1e-10


def test_extreme_tails_stay_in_range():
    for v in (t_cdf(-1e6, 3.0), t_cdf(1e6, 3.0), f_sf(1e8, 5, 246), reg_incomplete_beta(500.0, 500.0, 0.3)):
        assert 0.0 <= v <= 1.0
    assert np.isfinite(t_cdf(-40.0, 246.0))
