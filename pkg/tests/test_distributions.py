"""Distribution catalog: closed forms vs quadrature, atoms, sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from mginf import (Deterministic, Exponential, G1, G2, PowerFunction,
                   QueueConfig, from_spec)
from mginf.distributions import require_coherent

RHO_GRID = (0.5, 1.0, 5.0, 10.0)
LAM_GRID = (0.5, 1.0, 2.0)


def catalog():
    """One instance per family over the (rho, lam) parameter grid."""
    dists = []
    for rho in RHO_GRID:
        for lam in LAM_GRID:
            dists.append(Deterministic(rho / lam))
            dists.append(Exponential(rho / lam))
            dists.append(G1(lam, rho))
            dists.append(G2(lam, rho))
    dists.append(PowerFunction(0.5))
    dists.append(PowerFunction(1.5))
    return dists


def horizon(d):
    """Upper limit that carries all but ~1e-14 of the survival mass."""
    if math.isfinite(d.support_end):
        return d.support_end
    return float(d.quantile(1.0 - 1e-14)) + d.alpha


# ---------------------------------------------------------------- examples

def test_cdf_examples():
    assert Deterministic(1.0).cdf(0.5) == 0.0
    assert G2(1.0, 1.0).cdf(0.0) == 0.0
    # atom at the origin mirrors the busy period's mass e^-rho there
    assert G1(1.0, 1.0).cdf(0.0) == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_integrated_survival_examples():
    assert Deterministic(1.0).integrated_survival(2.0) == 1.0
    p = PowerFunction(0.5)
    assert p.integrated_survival(1.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert p.alpha == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert Exponential(1.0).integrated_survival(1e3) == pytest.approx(1.0, abs=1e-12)


def test_quantile_examples():
    assert Exponential(1.0).quantile(1.0 - math.exp(-1.0)) == pytest.approx(1.0, abs=1e-12)
    assert G1(1.0, 1.0).quantile(0.2) == 0.0  # below the atom mass e^-1
    p = PowerFunction(0.5)
    assert p.quantile(0.25) == pytest.approx(0.0625, abs=1e-15)
    assert p.cdf(0.0625) == pytest.approx(0.25, abs=1e-15)


def test_sampling_deterministic_degenerate():
    for seed in (0, 1, 12345):
        rng = np.random.default_rng(seed)
        assert Deterministic(2.0).sample(rng) == 2.0


@pytest.mark.parametrize("d, mean", [
    (Exponential(1.0), 1.0),
    (PowerFunction(0.5), 1.0 / 3.0),
])
def test_sampling_law_of_large_numbers(d, mean):
    rng = np.random.default_rng(2024)
    x = d.sample(rng, 10**6)
    se = x.std(ddof=1) / math.sqrt(x.size)
    assert abs(x.mean() - mean) <= 4.0 * se


# ------------------------------------------------------------- invariants

@pytest.mark.parametrize("d", catalog(), ids=lambda d: d.spec())
def test_cdf_nondecreasing_and_bounded(d):
    t = np.linspace(0.0, horizon(d), 1000)
    c = d.cdf(t)
    assert np.all(np.diff(c) >= -1e-15)
    assert np.all((c >= 0.0) & (c <= 1.0))
    assert d.cdf(horizon(d) * 1.5 + 1.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("d", catalog(), ids=lambda d: d.spec())
def test_survival_integrates_to_alpha(d):
    # the G1 mean check certifies the sign correction in its CDF: the
    # printed form with e^{+lam t} decreases and cannot be a CDF
    val, err = quad(d.survival, 0.0, horizon(d), limit=300,
                    epsabs=1e-12, epsrel=1e-12)
    assert val == pytest.approx(d.alpha, rel=1e-8)


@pytest.mark.parametrize("d", catalog(), ids=lambda d: d.spec())
def test_integrated_survival_matches_quadrature(d):
    ts = np.linspace(0.0, horizon(d), 21)[1:]
    for t in ts:
        ref, _ = quad(d.survival, 0.0, t, limit=300, epsabs=1e-13, epsrel=1e-13)
        assert d.integrated_survival(t) == pytest.approx(ref, rel=1e-8, abs=1e-13)


@pytest.mark.parametrize("d", catalog(), ids=lambda d: d.spec())
def test_integrated_survival_monotone_to_alpha(d):
    t = np.linspace(0.0, horizon(d) * 2, 400)
    lam_t = d.integrated_survival(t)
    assert np.all(np.diff(lam_t) >= -1e-14)
    assert lam_t[-1] == pytest.approx(d.alpha, rel=1e-9)
    deficit = d.integrated_survival_deficit(t)
    assert np.allclose(lam_t + deficit, d.alpha, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("d", [Exponential(1.0), Exponential(0.25),
                               PowerFunction(0.5), PowerFunction(1.5),
                               G2(1.0, 1.0), G2(2.0, 5.0)],
                         ids=lambda d: d.spec())
@settings(max_examples=60, deadline=None)
@given(u=st.floats(min_value=1e-6, max_value=1.0 - 1e-6))
def test_quantile_cdf_identity_continuous(d, u):
    assert d.cdf(d.quantile(u)) == pytest.approx(u, abs=1e-10)


@pytest.mark.parametrize("rho", RHO_GRID)
def test_g1_atom_exact(rho):
    d = G1(1.0, rho)
    assert d.cdf(0.0) == math.exp(-rho)
    # just above the atom the quantile leaves zero continuously
    eps = 1e-9
    assert d.quantile(math.exp(-rho) + eps) >= 0.0
    assert d.quantile(math.exp(-rho) + 1e-3) > 0.0


def test_g1_quantile_roundtrip_above_atom():
    d = G1(1.0, 1.0)
    for u in np.linspace(math.exp(-1.0) + 1e-3, 0.999, 25):
        assert d.cdf(d.quantile(u)) == pytest.approx(u, abs=1e-10)


def test_sample_matches_cdf_g1():
    d = G1(1.0, 1.0)
    rng = np.random.default_rng(7)
    x = d.sample(rng, 200_000)
    # atom frequency
    frac0 = np.mean(x == 0.0)
    assert frac0 == pytest.approx(math.exp(-1.0), abs=0.005)
    assert x.mean() == pytest.approx(d.alpha, abs=4 * x.std() / math.sqrt(x.size))


# ------------------------------------------------------- types and errors

def test_negative_time_rejected():
    for d in (Deterministic(1.0), Exponential(1.0), PowerFunction(0.5),
              G1(1.0, 1.0), G2(1.0, 1.0)):
        for method in (d.cdf, d.survival, d.integrated_survival, d.quantile):
            pass
        with pytest.raises(ValueError):
            d.cdf(-0.1)
        with pytest.raises(ValueError):
            d.integrated_survival(-1.0)
        with pytest.raises(ValueError):
            d.quantile(1.0)
        with pytest.raises(ValueError):
            d.quantile(-0.01)


def test_bad_parameters_rejected():
    with pytest.raises(ValueError):
        Deterministic(0.0)
    with pytest.raises(ValueError):
        Exponential(-1.0)
    with pytest.raises(ValueError):
        PowerFunction(0.0)
    with pytest.raises(ValueError):
        G1(0.0, 1.0)
    with pytest.raises(ValueError):
        G2(1.0, -2.0)
    with pytest.raises(ValueError):
        QueueConfig(1.0, 0.0)
    # inconsistent alpha override
    with pytest.raises(ValueError):
        G1(1.0, 1.0, alpha=0.5)
    with pytest.raises(ValueError):
        G2(2.0, 1.0, alpha=1.0)
    assert G2(2.0, 1.0, alpha=0.5).alpha == 0.5


def test_spec_string_roundtrip():
    for spec in ("det:alpha=1.0", "exp:alpha=1.0", "pow:c=0.5",
                 "g1:lambda=1.0,rho=1.0", "g2:lambda=2.0,rho=5.0"):
        d = from_spec(spec)
        d2 = from_spec(d.spec())
        assert type(d2) is type(d)
        assert d2.alpha == pytest.approx(d.alpha, rel=1e-12)


def test_spec_string_errors():
    with pytest.raises(ValueError):
        from_spec("gamma:alpha=1.0")
    with pytest.raises(ValueError):
        from_spec("det:beta=1.0")
    with pytest.raises(ValueError):
        from_spec("det:alpha=abc")
    with pytest.raises(ValueError):
        from_spec("g1:lambda=1.0")  # rho missing


def test_require_coherent():
    d = Exponential(1.0)
    require_coherent(d, QueueConfig(2.0, 2.0))
    with pytest.raises(ValueError):
        require_coherent(d, QueueConfig(1.0, 0.5))
    g = G1(1.0, 1.0)
    require_coherent(g, QueueConfig(1.0, 1.0))
    with pytest.raises(ValueError):
        require_coherent(g, QueueConfig(2.0, 2.0))  # same alpha, wrong lam


def test_queue_config_alpha():
    q = QueueConfig(2.0, 5.0)
    assert q.alpha == 2.5
