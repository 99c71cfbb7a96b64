import math

import pytest

import _ageflow as af


def scalar_root(beta, mu):
    """Bisection on the closed-form kernel beta (1 - e^{-(a+mu)}) / (a+mu) = 1."""

    def kernel(alpha):
        s = alpha + mu
        if abs(s) < 1e-14:
            return beta
        return beta * (1.0 - math.exp(-s)) / s

    lo, hi = -50.0, 50.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kernel(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_eigenvalue_matches_scalar_root():
    p = af.Problem("P0", n_a=100, n_x=24, d=1.0, lambda_adv=0.5)
    r = p.principal_eigenvalue()
    assert abs(r["lambda0"] - scalar_root(3.0, 1.0)) < 5e-3
    assert r["r_residual"] < 1e-7
    assert r["bracket"][0] <= r["lambda0"] <= r["bracket"][1]


def test_limits_quartet():
    p = af.Problem("P1", n_a=100, n_x=50)
    v = p.limit_values()
    assert abs(v["alpha1"] - scalar_root(3.0, 1.0)) < 1e-3
    assert abs(v["alpha0"] - scalar_root(3.0, 2.0)) < 1e-3
    assert abs(v["alpha_bar"] - scalar_root(3.0, 1.5)) < 1e-3
    assert abs(v["alpha_max"] - v["alpha1"]) < 1e-6


def test_gamma_and_profiles():
    p = af.Problem("P1", n_a=100, n_x=50)
    g = p.gamma_threshold()
    assert g["downstream"] and g["peak"] and g["average"]
    assert abs(g["gamma"][-1] - 3.0 * (1.0 - math.exp(-1.0))) < 1e-3
    v = p.v_star()
    gamma1 = 3.0 * (1.0 - math.exp(-1.0))
    assert abs(v["v"][0][-1] - (gamma1 - 1.0) / gamma1) < 1e-3
    u = p.u_star()
    assert u["positive"]


def test_equilibrium_and_dynamics():
    p = af.Problem("P0", n_a=80, n_x=12)
    eq = p.equilibrium()
    assert eq["classification"] == "positive"
    assert eq["residual"] < 1e-6
    k = 3.0 * (1.0 - math.exp(-1.0))
    assert abs(eq["sup"] - (k - 1.0) / k) < 5e-3

    sub = af.Problem("subcritical", n_a=64, n_x=12)
    assert sub.equilibrium()["classification"] == "extinct"


def test_gauge_consistency():
    p = af.Problem("P1", n_a=80, n_x=40, d=0.7, lambda_adv=1.3)
    flux = p.flux_eigenvalue()
    assert abs(flux["lambda0"] - scalar_root(3.0, 1.0)) < 0.5  # sanity scale
    assert flux["r_residual"] < 1e-7


def test_spectral_radius_monotone():
    p = af.Problem("P0", n_a=64, n_x=12)
    rs = [p.spectral_radius(lam) for lam in (0.0, 1.0, 2.0)]
    assert rs[0] > rs[1] > rs[2]


def test_characteristic_root_api():
    n = 200
    da = 1.0 / n
    beta = [3.0] * n
    mu_cum = [j * da for j in range(n + 1)]
    assert abs(af.characteristic_root(beta, mu_cum, da) - scalar_root(3.0, 1.0)) < 1e-4


def test_validation_and_errors():
    p = af.Problem("P0", n_a=32, n_x=16)
    checks = p.validate_assumptions()
    assert all(c["pass"] for c in checks)
    with pytest.raises(Exception):
        af.Problem("not-a-preset")
