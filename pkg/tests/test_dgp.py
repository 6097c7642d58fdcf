import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from lantest.dgp import (ModelConfig, Perturbation, SeriesPath, check_stationarity,
                         read_path_csv, simulate, simulate_ar1, simulate_arch, simulate_arm,
                         write_path_csv)
from lantest.errors import DomainError, StationarityError
from lantest.scores import ScoreFamily


def acf(y, k):
    y = y - y.mean()
    return float(np.dot(y[:-k], y[k:]) / np.dot(y, y))


@pytest.mark.parametrize("kind, sim", [("ar1", simulate_ar1), ("arch", simulate_arch),
                                       ("arm", simulate_arm)])
def test_zero_theta_returns_innovations(kind, sim):
    path = sim(ModelConfig(kind, theta=0.0), 300, seed=11)
    assert_array_equal(path.y, path.innovations)


def test_zero_vector_theta_returns_innovations():
    path = simulate_arm(ModelConfig("arm", theta=(0.0, 0.0, 0.0)), 200, seed=4)
    assert_array_equal(path.y, path.innovations)


def test_ar1_autocorrelation_and_variance():
    y = simulate_ar1(ModelConfig("ar1", theta=0.6), 10**5, seed=1).y
    assert abs(acf(y, 1) - 0.6) < 0.01
    assert abs(y.var() / (1 / (1 - 0.36)) - 1) < 0.02


def test_ar2_matches_yule_walker():
    t1, t2 = 0.5, 0.3
    y = simulate_arm(ModelConfig("arm", theta=(t1, t2)), 10**5, seed=2).y
    # rho1 = t1 + t2 rho1, rho2 = t1 rho1 + t2
    A = np.array([[1 - t2, 0.0], [-t1, 1.0]])
    rho1, rho2 = np.linalg.solve(A, [t1, t2])
    assert abs(acf(y, 1) - rho1) < 0.02
    assert abs(acf(y, 2) - rho2) < 0.02


def test_null_reduction_across_models():
    base = dict(theta=0.6, alpha=0.0, beta=0.0)
    a = simulate_ar1(ModelConfig("ar1", **base), 500, seed=9).y
    b = simulate_arch(ModelConfig("arch", **base), 500, seed=9).y
    c = simulate_arm(ModelConfig("arm", **base), 500, seed=9).y
    assert_array_equal(a, b)
    assert_array_equal(a, c)


def test_arch_scale_inflates_variance():
    n = 10**4
    cfg = ModelConfig("arch", theta=0.6)
    y0 = simulate_arch(cfg, n, seed=5).y
    y1 = simulate_arch(cfg.under("H1n", n), n, seed=5).y
    assert y1.var() > y0.var()


def test_arch_simulation_is_exact_recursion():
    cfg = ModelConfig("arch", theta=0.6, alpha=0.3, beta=0.4, burn_in=0)
    path = simulate_arch(cfg, 50, seed=3)
    y, e = path.y, path.innovations
    G, B = cfg.G, cfg.B
    for t in range(1, 50):
        expect = 0.6 * y[t - 1] + 0.3 * G(y[t - 1]) + math.sqrt(1 + 0.4 * B(y[t - 1])) * e[t]
        assert_allclose(y[t], expect, rtol=1e-14)


def test_arm_recursion_with_location_and_scale():
    cfg = ModelConfig("arm", theta=(0.5, -0.2), alpha=0.1, beta=0.2, burn_in=0)
    path = simulate_arm(cfg, 40, seed=8)
    y, e = path.y, path.innovations
    for t in range(2, 40):
        mean = 0.5 * y[t - 1] - 0.2 * y[t - 2] + 0.1 * cfg.G(y[t - 1])
        assert_allclose(y[t], mean + (1 + 0.2 * cfg.L(y[t - 1])) * e[t], rtol=1e-13)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**63 - 1), n=st.integers(2, 400),
       kind=st.sampled_from(["ar1", "arch", "arm"]))
def test_simulation_is_deterministic(seed, n, kind):
    cfg = ModelConfig(kind, theta=0.4, alpha=0.1, beta=0.1)
    a, b = simulate(cfg, n, seed), simulate(cfg, n, seed)
    assert a.y.tobytes() == b.y.tobytes()
    assert a.n == n


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(5, 300), extra=st.integers(1, 500))
def test_longer_paths_extend_shorter_ones(seed, n, extra):
    # the extended-sample estimator relies on this nesting
    cfg = ModelConfig("arch", theta=0.6, alpha=0.2, beta=0.2, score=ScoreFamily.student_t(5))
    short = simulate(cfg, n, seed).y
    long = simulate(cfg, n + extra, seed).y
    assert_array_equal(short, long[:n])


def test_ergodic_averages_stabilize():
    G = Perturbation()
    y = simulate_ar1(ModelConfig("ar1", theta=0.6), 2 * 10**5, seed=21).y
    for fn in (lambda v: G(v), lambda v: v**2 * G(v)):
        half, full = fn(y[:10**5]).mean(), fn(y).mean()
        assert abs(half / full - 1) < 0.01


def test_check_stationarity_examples():
    rep = check_stationarity(0.6)
    assert rep.stationary
    assert_allclose(rep.root_moduli, [1 / 0.6])
    rep = check_stationarity(1.0)
    assert not rep
    assert_allclose(rep.root_moduli, [1.0])
    assert check_stationarity((0.5, 0.3))
    roots = np.roots([-0.3, -0.5, 1.0])
    assert min(abs(roots)) > 1


@given(st.floats(-0.999, 0.999))
def test_ar1_stationarity_region(theta):
    assert check_stationarity(theta).stationary


@pytest.mark.parametrize("theta", [1.2, -1.0, (0.5, 0.6)])
def test_nonstationary_config_rejected(theta):
    kind = "arm" if isinstance(theta, tuple) else "ar1"
    with pytest.raises(StationarityError):
        ModelConfig(kind, theta=theta)


def test_config_validation():
    with pytest.raises(DomainError):
        ModelConfig("ar1", theta=(0.1, 0.2))
    with pytest.raises(DomainError):
        ModelConfig("garch")
    with pytest.raises(DomainError):
        check_stationarity(())
    with pytest.raises(DomainError):
        simulate(ModelConfig("arm", theta=(0.1, 0.1)), 2, seed=0)


def test_under_sets_amplitudes():
    cfg = ModelConfig("ar1")
    assert cfg.under("H1n", 400).alpha == 0.05
    assert cfg.under("H1n", 400).beta == 0.05
    assert cfg.under("H0", 400).alpha == 0.0
    with pytest.raises(DomainError):
        cfg.under("H2", 10)


def test_perturbation_parse_and_render():
    p = Perturbation.parse("2*rational")
    assert p == Perturbation("rational", 2.0)
    assert Perturbation.parse(str(p)) == p
    assert str(Perturbation()) == "rational"
    assert p(0.0) == 2.0
    assert Perturbation("zero").is_zero
    with pytest.raises(DomainError):
        Perturbation.parse("x*rational")
    with pytest.raises(DomainError):
        Perturbation("cubic")


def test_path_csv_round_trip(tmp_path):
    path = simulate(ModelConfig("ar1"), 100, seed=1)
    dest = write_path_csv(path, tmp_path / "p.csv")
    assert dest.read_text().startswith("index,y\n0,")
    assert_array_equal(read_path_csv(dest), path.y)
    (tmp_path / "bad.csv").write_text("a,b\n")
    with pytest.raises(DomainError):
        read_path_csv(tmp_path / "bad.csv")


def test_series_path_head():
    path = SeriesPath.from_values([1.0, 2.0, 3.0])
    assert path.head(2).n == 2
    assert np.isnan(path.innovations).all()
