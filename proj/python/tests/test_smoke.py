import math

import numpy as np
import pytest

import fraclab


def test_constants():
    assert fraclab.cns_closed(1, 0.5) == pytest.approx(1 / math.pi, rel=1e-14)
    assert fraclab.cns_integral(2, 0.25) == pytest.approx(fraclab.cns_closed(2, 0.25), rel=1e-6)
    assert fraclab.lemma_l1_lhs(0.3) == pytest.approx(1 / 0.3, abs=1e-8)
    with pytest.raises(ValueError):
        fraclab.cns_closed(1, 1.5)


def test_spectral_mode():
    n, period = 256, 1.0
    x = -period / 2 + period * np.arange(n) / n
    u = np.sin(2 * np.pi * 3 * x)
    lu = fraclab.fraclap_spectral(u, period, 0.4)
    np.testing.assert_allclose(lu, (2 * np.pi * 3) ** 0.8 * u, atol=1e-9)


def test_quadrature_callback():
    v = fraclab.fraclap_quadrature(lambda x: math.sqrt(1 - x * x) if abs(x) < 1 else 0.0, 0.0, 0.5,
                                   kinks=[-1.0, 1.0], tail="zero")
    assert v == pytest.approx(1.0, abs=1e-4)


def test_dirichlet_callback():
    x, u = fraclab.dirichlet_solve(0.0, 1.0, 64, 0.5, lambda t: math.sqrt(t) if t > 0 else 0.0)
    assert np.max(np.abs(u - np.sqrt(x))) < 2e-2


def test_dislocations_and_walk():
    r = fraclab.dislocation_evolve([-0.5, 0.5], [1, -1])
    assert r["events"][0][2] == pytest.approx(0.25, abs=1e-6)
    x, rho = fraclab.simulate_density(0.5, 0.05, 0, 100, points=64, period=8.0)
    assert np.count_nonzero(rho) == 1


def test_geometry_and_extension():
    assert fraclab.nmc([(-1.0, 1.0)], 1.0, 0.25) == pytest.approx(-2 * 2 ** -0.5 / 0.5, rel=1e-6)
    assert fraclab.per_s([(0.0, 1.0)], -3.0, 3.0, 0.3) > 0
    p = fraclab.extension_profile(0.5)
    np.testing.assert_allclose(p["g"], np.exp(-p["t"]), atol=1e-8)


def test_ground_state_and_allen_cahn():
    x, w, res = fraclab.ground_state(0.5, 2.0, points=8192)
    assert res < 1e-8
    assert np.max(np.abs(w - 2 / (1 + x * x))) < 1e-3
    with pytest.raises(ValueError):
        fraclab.ground_state(0.25, 5.0)
    x, u, e = fraclab.ac_minimize(5.0, 32, 0.25, lambda t: -1.0 if t < 0 else 1.0)
    assert np.all(np.diff(e) <= 0)
    np.testing.assert_allclose(u, -u[::-1], atol=1e-6)
