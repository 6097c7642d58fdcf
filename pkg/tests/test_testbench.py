import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy.stats import norm

from lantest.central import CentralEval
from lantest.errors import DegenerateVarianceError, DomainError
from lantest.testbench import (critical_value, lecam_prediction, np_decide,
                               theoretical_power)

Z05 = 1.6448536269514722


def ev(v, tau2):
    return CentralEval(v, np.zeros(1), tau2, np.zeros(1), 100)


def test_critical_value():
    assert_allclose(critical_value(0.05), 1.6449, atol=1e-4)
    assert_allclose(critical_value(0.05), Z05, rtol=1e-15)
    with pytest.raises(DomainError):
        critical_value(1.0)


def test_boundary_is_rejection():
    z = critical_value(0.05)
    out = np_decide(ev(z, 1.0), 0.05)
    assert out.statistic == z
    assert out.reject


def test_zero_statistic_accepts():
    assert not np_decide(ev(0.0, 0.7), 0.05).reject


def test_statistic_is_standardized():
    out = np_decide(ev(1.0, 0.25), 0.05, "lse")
    assert out.statistic == 2.0
    assert out.flavor == "lse"
    assert out.threshold == critical_value(0.05)


def test_degenerate_variance():
    with pytest.raises(DegenerateVarianceError):
        np_decide(ev(1.0, 0.0))


@pytest.mark.parametrize("conv", ["tau", "tau2"])
def test_power_at_zero_is_level(conv):
    assert theoretical_power(0.0, 0.05, conv) == 0.05
    assert theoretical_power(0.0, 0.1, conv) == 0.1


def test_conventions_coincide_at_one():
    a = theoretical_power(1.0, 0.05, "tau")
    assert a == theoretical_power(1.0, 0.05, "tau2")
    assert_allclose(a, norm.sf(Z05 - 1))


def test_power_quarter():
    assert_allclose(theoretical_power(0.25, 0.05, "tau"), 1 - norm.cdf(Z05 - 0.5), rtol=1e-12)
    assert_allclose(theoretical_power(0.25, 0.05, "tau2"), 1 - norm.cdf(Z05 - 0.25), rtol=1e-12)


def test_power_errors():
    with pytest.raises(DomainError):
        theoretical_power(-0.1)
    with pytest.raises(DomainError):
        theoretical_power(0.5, 0.05, "tau3")


@given(a=st.floats(0, 50), b=st.floats(0, 50), conv=st.sampled_from(["tau", "tau2"]),
       level=st.sampled_from([0.01, 0.05, 0.1]))
def test_power_monotone(a, b, conv, level):
    lo, hi = sorted((a, b))
    assert theoretical_power(lo, level, conv) <= theoretical_power(hi, level, conv)
    assert level <= theoretical_power(lo, level, conv) <= 1.0


def test_lecam_prediction():
    assert lecam_prediction(0.0) == (0.0, 0.0)
    assert lecam_prediction(0.3) == (0.3, 0.3)
    with pytest.raises(DomainError):
        lecam_prediction(-1.0)


def test_decisive_gap_at_protocol_variance():
    # with tau2 near 0.425 the two conventions are further apart than 0.03
    gap = theoretical_power(0.425, 0.05, "tau") - theoretical_power(0.425, 0.05, "tau2")
    assert gap > 0.03
    assert math.isclose(gap, 0.049, abs_tol=0.002)
