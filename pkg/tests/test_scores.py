import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy import stats

from lantest.errors import DomainError
from lantest.scores import ScoreFamily, check_regularity

GAUSS = ScoreFamily.gaussian()
T5 = ScoreFamily.student_t(5)
T7 = ScoreFamily.student_t(7)
FAMILIES = [GAUSS, T5, T7]


def t_logpdf_oracle(nu, x):
    # unit-variance t written directly from scipy's standard t
    s = math.sqrt((nu - 2) / nu)
    return stats.t.logpdf(x / s, nu) - math.log(s)


def fd(fn, x, h=1e-6):
    return (fn(x + h) - fn(x - h)) / (2 * h)


def test_gaussian_score_values():
    assert GAUSS.score(1.5) == -1.5
    assert GAUSS.score(0.0) == 0.0
    assert GAUSS.nf(0.0) == 1.0
    assert GAUSS.nf(1.0) == 0.0


@pytest.mark.parametrize("x", [0.0, 2.3, -4.0])
def test_gaussian_score_derivs_constant(x):
    assert GAUSS.score_derivs(x) == (-1.0, 0.0)


def test_student_t_score_matches_logpdf_derivative():
    expected = fd(lambda x: t_logpdf_oracle(5, x), 1.0)
    assert_allclose(T5.score(1.0), expected, rtol=1e-7)


def test_student_t_score_derivs_at_zero():
    d1, d2 = T5.score_derivs(0.0)
    assert d2 == 0.0
    assert_allclose(d1, fd(T5.score, 0.0), rtol=1e-7)


def test_student_t_nf_composes_score():
    expected = 1 + 2.0 * fd(lambda x: t_logpdf_oracle(7, x), 2.0)
    assert_allclose(T7.nf(2.0), expected, rtol=1e-7)


def test_logpdf_matches_scipy():
    x = np.linspace(-6, 6, 41)
    assert_allclose(T5.logpdf(x), t_logpdf_oracle(5, x), rtol=1e-12)
    assert_allclose(GAUSS.logpdf(x), stats.norm.logpdf(x), rtol=1e-12)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.label)
def test_derivatives_match_finite_differences_on_grid(fam):
    x = np.linspace(-10, 10, 2001)
    d1, d2 = fam.score_derivs(x)
    scale = np.maximum(1.0, np.abs(d1))
    assert np.max(np.abs(d1 - fd(fam.score, x)) / scale) < 1e-6
    d1_fd = (fam.score_derivs(x + 1e-5)[0] - fam.score_derivs(x - 1e-5)[0]) / 2e-5
    assert np.max(np.abs(d2 - d1_fd) / np.maximum(1.0, np.abs(d2))) < 1e-6
    nd_fd = fd(fam.nf, x)
    assert np.max(np.abs(fam.nf_deriv(x) - nd_fd) / np.maximum(1.0, np.abs(nd_fd))) < 1e-6


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.label)
@given(x=st.floats(-50, 50))
def test_nf_is_exact_composition(fam, x):
    assert fam.nf(x) == 1 + x * fam.score(x)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.label)
@given(x=st.floats(-1e6, 1e6))
def test_score_is_odd(fam, x):
    assert fam.score(-x) == -fam.score(x)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_nonfinite_input_rejected(bad):
    for fn in (GAUSS.score, T5.score_derivs, T7.nf):
        with pytest.raises(DomainError):
            fn(bad)
    with pytest.raises(DomainError):
        GAUSS.score(np.array([0.0, bad]))


def test_invalid_families():
    with pytest.raises(DomainError):
        ScoreFamily.student_t(2.5)
    with pytest.raises(DomainError):
        ScoreFamily("laplace")


def test_fisher_moments_gaussian():
    assert_allclose([GAUSS.fisher_moment(j) for j in range(3)], [1, 0, 3], atol=1e-8)
    with pytest.raises(DomainError):
        GAUSS.fisher_moment(3)


@pytest.mark.parametrize("nu", [5, 7])
def test_fisher_moments_student_t_closed_form(nu):
    # I_0 = (nu+1)/(nu+3) * nu/(nu-2) for the unit-variance t; I_2 from E[eps^2 M^2]
    fam = ScoreFamily.student_t(nu)
    i0 = (nu + 1) / (nu + 3) * nu / (nu - 2)
    i2 = 3 * (nu + 1) / (nu + 3)
    assert_allclose(fam.fisher_moment(0), i0, rtol=1e-9)
    assert abs(fam.fisher_moment(1)) < 1e-12
    assert_allclose(fam.fisher_moment(2), i2, rtol=1e-9)


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.label)
def test_fisher_moments_match_monte_carlo(fam):
    eps = fam.draw(np.random.default_rng(7), 10**6)
    m2 = fam.score(eps) ** 2
    for j in range(3):
        sample = eps**j * m2
        se = sample.std() / math.sqrt(sample.size)
        assert abs(sample.mean() - fam.fisher_moment(j)) < 4 * se


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.label)
def test_draws_have_unit_variance(fam):
    eps = fam.draw(np.random.default_rng(3), 200_000)
    assert abs(eps.mean()) < 0.01
    assert abs(eps.var() - 1) < 0.03


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.label)
def test_regularity_residuals(fam):
    rep = check_regularity(fam)
    assert rep.ok
    assert np.max(np.abs(rep.residuals)) < 1e-6
    assert_allclose(rep.normalization, (1, 0, 1), atol=1e-8)
    assert not rep.flagged


def test_regularity_heavy_tail_flagged():
    rep = check_regularity(ScoreFamily.student_t(3))
    assert "I_2" in rep.flagged
    assert len(rep.residuals) == 5
