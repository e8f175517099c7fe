"""Collision kernel, angular quadrature, geometry, and rhs oracle tests."""

import numpy as np
import pytest

from kinb import (
    AngularQuadrature,
    ConfigError,
    CrossSection,
    GridSpec,
    InitialDatum,
    collision_geometry,
    from_inverse_power,
    init_state,
    kac_pair,
    transform_jacobian,
)
from kinb import collision as col


# ---------------------------------------------------------------------------
# kernel parameters
# ---------------------------------------------------------------------------

def test_from_inverse_power():
    gamma, nu = from_inverse_power(5.0)
    assert gamma == 0.0
    assert nu == 0.25
    gamma3, nu3 = from_inverse_power(3.0)
    assert gamma3 == -1.0
    assert nu3 == 0.5
    # hard-sphere limit: gamma -> 1, nu -> 0
    gbig, nbig = from_inverse_power(1e9)
    assert abs(gbig - 1.0) < 1e-8
    assert nbig < 1e-8
    for bad in (2.0, 1.0, -3.0):
        with pytest.raises(ConfigError):
            from_inverse_power(bad)


def test_cross_section_validation():
    for bad_nu in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(ConfigError):
            CrossSection(nu=bad_nu)
    with pytest.raises(ConfigError):
        CrossSection(nu=0.5, kappa=0.0)
    assert CrossSection.maxwellian().nu == 0.25


def test_collapsed_kernel_power_law():
    cs = CrossSection(nu=0.3, kappa=2.0)
    th = 0.17
    assert np.isclose(cs.collapsed(th), 2.0 * th ** (-1.6), rtol=1e-14)
    # even in theta
    assert cs.collapsed(-th) == cs.collapsed(th)
    # b_value strips the sin^{d-2} factor
    assert np.isclose(cs.b_value(th, 3), cs.collapsed(th) / np.sin(th), rtol=1e-14)
    assert np.isclose(cs.b_value(th, 2), cs.collapsed(th), rtol=1e-14)


# ---------------------------------------------------------------------------
# angular quadrature
# ---------------------------------------------------------------------------

def test_quadrature_validation():
    with pytest.raises(ConfigError):
        AngularQuadrature(theta_min=0.0)
    with pytest.raises(ConfigError):
        AngularQuadrature(theta_min=1.0)  # above pi/4
    with pytest.raises(ConfigError):
        AngularQuadrature(panels=0)
    with pytest.raises(ConfigError):
        AngularQuadrature(nodes_per_panel=1)
    with pytest.raises(ConfigError):
        AngularQuadrature(azimuthal_nodes=0)
    q = AngularQuadrature(theta_min=0.1)
    with pytest.raises(ConfigError):
        q.angles(0.05)  # upper limit below theta_min


def test_quadrature_weights_and_range():
    q = AngularQuadrature(theta_min=1e-3, panels=10, nodes_per_panel=6)
    th, w = q.angles(np.pi / 4)
    assert th.shape == w.shape == (60,)
    assert np.all(np.diff(th) > 0)
    assert th[0] > 1e-3 and th[-1] < np.pi / 4
    # plain weights integrate the constant 1 over [theta_min, theta_max]
    assert np.isclose(w.sum(), np.pi / 4 - 1e-3, rtol=1e-13)
    # theta_min override narrows the window
    th2, w2 = q.angles(np.pi / 4, theta_min=0.1)
    assert th2[0] > 0.1
    assert np.isclose(w2.sum(), np.pi / 4 - 0.1, rtol=1e-13)


def test_quadrature_singular_integral():
    # 2 * int_0^{pi/4} theta^{-3/2} sin^2 cos^2 dtheta, adaptive reference
    q = AngularQuadrature(theta_min=1e-6, panels=40, nodes_per_panel=8)
    th, w = q.angles(np.pi / 4)
    approx = 2.0 * float(np.sum(w * th ** -1.5 * np.sin(th) ** 2 * np.cos(th) ** 2))
    assert abs(approx - 6.612837719046e-01) < 1e-8


# ---------------------------------------------------------------------------
# collision geometry
# ---------------------------------------------------------------------------

def test_geometry_hand_example():
    eta = np.array([1.0, 0.0])
    sigma = np.array([0.0, 1.0])
    minus, plus = collision_geometry(eta, sigma)
    assert np.allclose(plus, [0.5, 0.5], atol=1e-15)
    assert np.allclose(minus, [0.5, -0.5], atol=1e-15)
    assert np.isclose(transform_jacobian(eta, sigma), 0.25, rtol=1e-15)


def test_geometry_identities():
    rng = np.random.default_rng(7)
    for d in (2, 3):
        for _ in range(50):
            eta = rng.normal(size=d) * 3.0
            u = rng.normal(size=d)
            sigma = u / np.linalg.norm(u)
            minus, plus = collision_geometry(eta, sigma)
            r = np.linalg.norm(eta)
            cos_t = float(eta @ sigma) / r
            theta = np.arccos(np.clip(cos_t, -1.0, 1.0))
            assert np.isclose(np.linalg.norm(minus), r * np.sin(theta / 2), atol=1e-12)
            assert np.isclose(
                np.linalg.norm(minus) ** 2 + np.linalg.norm(plus) ** 2, r * r,
                rtol=1e-12)
            assert np.allclose(minus + plus, eta, atol=1e-12)


def test_transform_jacobian_matches_finite_differences():
    rng = np.random.default_rng(11)
    h = 1e-6
    for d in (2, 3):
        for _ in range(10):
            eta = rng.normal(size=d) * 2.0 + 0.5
            u = rng.normal(size=d)
            sigma = u / np.linalg.norm(u)

            def plus_of(e):
                return 0.5 * (e + np.linalg.norm(e) * sigma)

            jac = np.empty((d, d))
            for j in range(d):
                step = np.zeros(d)
                step[j] = h
                jac[:, j] = (plus_of(eta + step) - plus_of(eta - step)) / (2 * h)
            det_fd = np.linalg.det(jac)
            assert np.isclose(det_fd, transform_jacobian(eta, sigma), atol=1e-6)


def test_kac_pair():
    minus, plus = kac_pair(1.5, 0.3)
    assert np.isclose(minus, 1.5 * np.sin(0.3), rtol=1e-15)
    assert np.isclose(plus, 1.5 * np.cos(0.3), rtol=1e-15)
    assert np.isclose(minus ** 2 + plus ** 2, 1.5 ** 2, rtol=1e-14)


# ---------------------------------------------------------------------------
# collision rhs against an adaptive-quadrature reference
# ---------------------------------------------------------------------------

def test_kac_rhs_matches_reference():
    # reference values from adaptive quadrature on the continuum transform
    # of the unit-mass laplace datum (a = 1), nu = 1/4, kappa = 1
    g = GridSpec(dimension=1, mode="full-1d", n=513, eta_max=16.0)
    st = init_state(g, InitialDatum(kind="laplace", dimension=1, a=1.0, mass=1.0))
    cs = CrossSection(nu=0.25, kappa=1.0)
    quad = AngularQuadrature(theta_min=1e-6, panels=40, nodes_per_panel=8)
    r = col.rhs(st, cs, quad)
    nodes = g.axis_nodes()
    frozen = {0.5: -2.820703452665e-01, 1.0: -1.590762400331e-01,
              2.5: -5.260283608478e-02}
    for xi, want in frozen.items():
        i = int(np.argmin(np.abs(nodes - xi)))
        assert abs(nodes[i] - xi) < 1e-12  # on-grid by construction
        assert abs(r[i].real - want) < 1e-5
        assert abs(r[i].imag) < 1e-10


def test_gaussian_is_a_fixed_point():
    cs = CrossSection(nu=0.25, kappa=1.0)
    quad = AngularQuadrature(theta_min=1e-4, panels=12, nodes_per_panel=6)
    g1 = GridSpec(dimension=1, mode="full-1d", n=257, eta_max=16.0)
    s1 = init_state(g1, InitialDatum(kind="gaussian", dimension=1, sigma=1.0))
    assert np.abs(col.rhs(s1, cs, quad)).max() < 1e-5

    q2 = AngularQuadrature(theta_min=1e-3, panels=8, nodes_per_panel=5,
                           azimuthal_nodes=8)
    g2 = GridSpec(dimension=2, mode="full-2d", n=64, eta_max=4.0)
    s2 = init_state(g2, InitialDatum(kind="gaussian", dimension=2, sigma=0.4))
    assert np.abs(col.rhs(s2, cs, q2)).max() < 1e-5

    g3 = GridSpec(dimension=3, mode="radial", n=128, eta_max=8.0)
    s3 = init_state(g3, InitialDatum(kind="gaussian", dimension=3, sigma=0.7))
    assert np.abs(col.rhs(s3, cs, q2)).max() < 1e-5


def test_rhs_vanishes_at_zero_frequency():
    # gain and loss cancel exactly at eta = 0: mass is conserved
    cs = CrossSection(nu=0.5, kappa=1.0)
    quad = AngularQuadrature(theta_min=1e-3, panels=8, nodes_per_panel=5)
    g = GridSpec(dimension=1, mode="full-1d", n=129, eta_max=12.0)
    datum = InitialDatum(kind="gaussian-mixture", dimension=1,
                         components=((0.6, (0.8,), 0.5), (0.4, (-0.5,), 0.7)))
    st = init_state(g, datum)
    r = col.rhs(st, cs, quad)
    assert abs(r[g.shape[0] // 2]) < 1e-12 * st.mass

    g2 = GridSpec(dimension=2, mode="full-2d", n=32, eta_max=4.0)
    d2 = InitialDatum(kind="gaussian", dimension=2, sigma=0.5, center=(0.2, -0.1))
    s2 = init_state(g2, d2)
    r2 = col.rhs(s2, cs, quad)
    assert abs(r2[g2.shape[0] // 2, g2.shape[1] // 2]) < 1e-12 * s2.mass


# ---------------------------------------------------------------------------
# bounds and probes
# ---------------------------------------------------------------------------

def test_stability_limit_identity():
    g = GridSpec(dimension=1, mode="full-1d", n=129, eta_max=12.0)
    st = init_state(g, InitialDatum(kind="laplace", dimension=1, a=1.0, mass=3.0))
    cs = CrossSection(nu=0.25, kappa=1.0)
    quad = AngularQuadrature(theta_min=1e-2, panels=10, nodes_per_panel=6)
    W = col.total_weight(g, cs, quad)
    assert W > 0
    assert np.isclose(col.stability_limit(st, cs, quad), 0.5 / (3.0 * W), rtol=1e-13)
    # smaller cutoff keeps more of the singular kernel
    quad2 = AngularQuadrature(theta_min=1e-3, panels=10, nodes_per_panel=6)
    assert col.total_weight(g, cs, quad2) > W


def test_truncation_bound_dominates_cutoff_change():
    g = GridSpec(dimension=1, mode="full-1d", n=257, eta_max=16.0)
    st = init_state(g, InitialDatum(kind="laplace", dimension=1, a=1.0))
    cs = CrossSection(nu=0.25, kappa=1.0)
    qa = AngularQuadrature(theta_min=1e-5, panels=30, nodes_per_panel=8)
    qb = AngularQuadrature(theta_min=1e-2, panels=18, nodes_per_panel=8)
    diff = np.abs(col.rhs(st, cs, qa) - col.rhs(st, cs, qb))
    bound = col.truncation_error_bound(st, st, cs, qb)
    assert np.all(bound >= 0)
    assert np.all(diff <= bound + 1e-12)
    # theta_min^{2-2nu} scaling, exact because the moment factor is shared
    qc = AngularQuadrature(theta_min=2e-2, panels=18, nodes_per_panel=8)
    b2 = col.truncation_error_bound(st, st, cs, qc)
    assert np.allclose(b2, bound * 2.0 ** (2 - 2 * cs.nu), rtol=1e-13)


def test_coercivity_probe_nonnegative():
    cs = CrossSection(nu=0.25, kappa=1.0)
    quad = AngularQuadrature(theta_min=1e-2, panels=10, nodes_per_panel=6)
    g = GridSpec(dimension=1, mode="full-1d", n=257, eta_max=16.0)
    st = init_state(g, InitialDatum(kind="laplace", dimension=1, a=1.0))
    p = col.coercivity_probe(st, cs, quad)
    c = g.shape[0] // 2
    assert p.min() >= -1e-12
    assert abs(p[c]) < 1e-12
    assert p[c + 40] > 1.0  # strictly dissipative away from eta = 0

    g2 = GridSpec(dimension=2, mode="full-2d", n=48, eta_max=4.0)
    s2 = init_state(g2, InitialDatum(kind="gaussian", dimension=2, sigma=0.5))
    q2 = AngularQuadrature(theta_min=1e-2, panels=8, nodes_per_panel=5,
                           azimuthal_nodes=8)
    assert col.coercivity_probe(s2, cs, q2).min() >= -1e-10
