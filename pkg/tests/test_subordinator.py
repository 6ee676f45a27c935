import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

import subfn.subordinator as sub
from subfn.errors import DiscretizationError, DomainError, QuadratureFailure
from subfn.quadrature import convolve, laplace_transform
from subfn.subordinator import (ContourConfig, DriftKilling, KilledStable, Stable,
                                discretize, mass, stable_density_closed_form,
                                stable_density_contour, tail_cutoff, tail_mass_bound)


def series_density(alpha, t, s, terms=80):
    """Large-s series of the stable density (independent oracle)."""
    k = np.arange(1, terms + 1)
    logc = (np.log(gamma(k * alpha + 1)) - np.cumsum(np.log(k)) + k * math.log(t)
            - (k * alpha + 1) * math.log(s))
    return float(np.sum((-1.0) ** (k + 1) * np.exp(logc) * np.sin(k * math.pi * alpha))
                 / math.pi)


def test_closed_form_values():
    assert abs(stable_density_closed_form(1.0, 1.0)
               - math.exp(-0.25) / (2 * math.sqrt(math.pi))) < 1e-16
    # 2 e^{-1} / (2 sqrt(pi)) = e^{-1} / sqrt(pi)
    assert abs(stable_density_closed_form(2.0, 1.0) - math.exp(-1.0) / math.sqrt(math.pi)) < 1e-16
    assert stable_density_closed_form(1.0, 1e-4) < 1e-300
    with pytest.raises(DomainError):
        stable_density_closed_form(0.0, 1.0)
    with pytest.raises(DomainError):
        stable_density_closed_form(1.0, [1.0, -1.0])


@pytest.mark.parametrize("t,s,expected", [(1.0, 1.0, 0.219695), (2.0, 1.0, 0.207554)])
def test_contour_examples(t, s, expected):
    assert abs(stable_density_contour(0.5, t, s) - expected) < 1e-6


def test_closed_form_is_a_probability_density():
    from scipy.integrate import quad
    for t in (0.5, 2.0):
        total = quad(lambda s: stable_density_closed_form(t, s), 0, np.inf)[0]
        assert abs(total - 1.0) < 1e-8


def test_contour_matches_closed_form_on_grid():
    s = np.geomspace(0.05, 20.0, 60)
    for t in (0.5, 1.0, 2.0):
        err = np.max(np.abs(stable_density_contour(0.5, t, s)
                            - stable_density_closed_form(t, s)))
        assert err <= 1e-12


@pytest.mark.parametrize("alpha", [0.2, 0.3, 0.7])
def test_contour_matches_series_for_large_s(alpha):
    for s in (5.0, 10.0, 50.0):
        assert abs(stable_density_contour(alpha, 1.0, s)
                   - series_density(alpha, 1.0, s)) < 1e-12


@pytest.mark.parametrize("theta", [0.6 * math.pi, 0.7 * math.pi])
def test_contour_angle_is_immaterial(theta):
    s = np.array([0.3, 1.0, 4.0])
    a = stable_density_contour(0.5, 1.0, s, ContourConfig(theta=theta))
    np.testing.assert_allclose(a, stable_density_closed_form(1.0, s), atol=1e-10)


def test_default_angle():
    assert sub.default_theta(0.3) == 0.75 * math.pi
    assert sub.default_theta(0.5) == 0.75 * math.pi
    for alpha in (0.6, 0.8, 0.95):
        th = sub.default_theta(alpha)
        assert math.cos(th) < 0 < math.cos(alpha * th)


def test_laplace_of_contour_density():
    # int e^{-s} g(s) ds = e^{-1} for alpha = 0.7, t = 1
    from subfn.quadrature import panel_edges, panel_rule
    s, w = panel_rule(panel_edges(1e-3, 1e4, 200, "logarithmic"), 16)
    val = np.dot(w, np.exp(-s) * stable_density_contour(0.7, 1.0, s))
    assert abs(val - math.exp(-1.0)) < 1e-6


def test_contour_config_validation():
    for bad in (dict(theta=0.5 * math.pi), dict(theta=math.pi), dict(r_factor=0.0),
                dict(panels=1), dict(nodes=1)):
        with pytest.raises(DomainError):
            ContourConfig(**bad)
    with pytest.raises(DomainError):
        stable_density_contour(0.5, 1.0, 0.0)
    with pytest.raises(DomainError):
        stable_density_contour(1.2, 1.0, 1.0)


def test_negative_density_handling(monkeypatch):
    monkeypatch.setattr(sub, "_contour_one", lambda *a: -1e-9)
    assert stable_density_contour(0.5, 1.0, 1.0) == 0.0
    monkeypatch.setattr(sub, "_contour_one", lambda *a: -1e-6)
    with pytest.raises(QuadratureFailure):
        stable_density_contour(0.5, 1.0, 1.0)


def test_family_validation():
    with pytest.raises(DomainError):
        Stable(1.0)
    with pytest.raises(DomainError):
        KilledStable(-1.0, 0.5)
    with pytest.raises(DomainError):
        DriftKilling(0.0, -1.0)


def test_mass():
    assert mass(Stable(0.4), 3.0) == 1.0
    assert mass(KilledStable(math.log(2.0), 0.5), 1.0) == 0.5
    assert mass(DriftKilling(2.0, 1.0), 0.0) == 1.0
    with pytest.raises(DomainError):
        mass(Stable(0.5), -1.0)


def test_discretize_examples():
    assert discretize(DriftKilling(math.log(2.0), 0.0), 1.0).atoms == [(0.0, 0.5)]
    assert discretize(DriftKilling(0.0, 2.0), 3.0).atoms == [(6.0, 1.0)]
    assert discretize(Stable(0.5), 0.0).atoms == [(0.0, 1.0)]
    m = discretize(Stable(0.5), 1.0, eps_tail=1e-8)
    assert 1 - 2e-8 <= m.mass <= 1 + 1e-6


def test_discretize_validation():
    with pytest.raises(DomainError):
        discretize(Stable(0.5), -1.0)
    with pytest.raises(DomainError):
        discretize(Stable(0.5), 1.0, eps_tail=0.1)
    with pytest.raises(DomainError):
        discretize(Stable(0.5), 1.0, n_atoms=0)


def test_too_few_atoms_is_reported():
    with pytest.raises(DiscretizationError):
        discretize(Stable(0.5), 1.0, n_atoms=20)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_laplace_identity(alpha):
    lam = np.array([0.1, 0.5, 1.0, 2.0, 5.0, 10.0])
    for t in (0.5, 1.0, 2.0):
        m = discretize(Stable(alpha), t)
        assert np.max(np.abs(laplace_transform(m, lam) - np.exp(-t * lam ** alpha))) <= 1e-4


def test_killed_family_laplace():
    fam = KilledStable(0.3, 0.6)
    lam = np.array([0.5, 2.0])
    m = discretize(fam, 1.5)
    np.testing.assert_allclose(laplace_transform(m, lam), np.exp(-1.5 * fam.exponent(lam)),
                               atol=1e-8)


@pytest.mark.parametrize("alpha", [0.3, 0.7])
def test_convolution_law(alpha):
    lam = np.array([0.1, 1.0, 10.0])
    mt = discretize(Stable(alpha), 0.5, n_atoms=600)
    conv = convolve(mt, mt, 1e-6)
    assert np.max(np.abs(laplace_transform(conv, lam)
                         - laplace_transform(discretize(Stable(alpha), 1.0), lam))) <= 5e-4


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_uniform_tightness(alpha):
    eps, t = 1e-6, 2.0
    fam = Stable(alpha)
    S = tail_cutoff(fam, t, eps)
    assert abs(tail_mass_bound(fam, t, S) - eps) < 1e-12
    for tp in (t, 1.0, 0.5, 0.1):
        assert discretize(fam, tp).mass_above(S) <= 2 * eps


def test_drift_tail_helpers():
    fam = DriftKilling(0.5, 2.0)
    assert tail_cutoff(fam, 3.0, 1e-6) == 6.0
    assert tail_mass_bound(fam, 3.0, 6.0) == 0.0
    assert tail_mass_bound(fam, 3.0, 5.0) == mass(fam, 3.0)


def test_weak_continuity_at_zero():
    errs = []
    for t in (1e-1, 1e-2, 1e-3):
        m = discretize(Stable(0.5), t)
        err = abs(laplace_transform(m, 1.0) - 1.0)
        assert err <= t
        errs.append(err)
    assert errs[0] > errs[1] > errs[2]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([0.3, 0.5, 0.7]), st.floats(0.05, 3.0), st.floats(0.0, 2.0))
def test_discretized_mass_is_multiplicative(alpha, t, a):
    fam = KilledStable(a, alpha)
    m = discretize(fam, t)
    assert math.exp(-a * t) * (1 - 2e-10) <= m.mass <= math.exp(-a * t) * (1 + 1e-6)
    # exp(-a t) exp(-a s) = exp(-a (t + s)) at the level of total mass
    assert math.isclose(mass(fam, t) * mass(fam, 1.0), mass(fam, t + 1.0), rel_tol=1e-14)
