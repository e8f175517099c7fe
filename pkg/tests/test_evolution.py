"""Time integrator tests: order, conservation, entropy decay, bookkeeping."""

import numpy as np
import pytest

from kinb import (
    AngularQuadrature,
    ConfigError,
    CrossSection,
    GridSpec,
    InitialDatum,
    NumericalFailure,
    RunConfig,
    entropy,
    init_state,
    moments,
    run,
    simulate,
    step,
)

CS = CrossSection(nu=0.25, kappa=1.0)
QUAD = AngularQuadrature(theta_min=0.05, panels=8, nodes_per_panel=6)


def _kac_state(n=129, eta_max=12.0, kind="laplace"):
    g = GridSpec(dimension=1, mode="full-1d", n=n, eta_max=eta_max)
    return init_state(g, InitialDatum(kind=kind, dimension=1, a=1.0, sigma=1.0))


def test_local_error_is_fifth_order():
    # Richardson: one step of dt vs two of dt/2 differ by O(dt^5) for RK4
    st = _kac_state()

    def local_err(dt):
        one = step(st, CS, QUAD, dt)
        half = step(step(st, CS, QUAD, dt / 2), CS, QUAD, dt / 2)
        return np.abs(one.values - half.values).max()

    rate = np.log2(local_err(0.02) / local_err(0.01))
    assert 4.5 < rate < 5.5


def test_step_halving_agreement():
    st = _kac_state()
    r1 = run(st, CS, QUAD, dt=0.02, t_end=0.04)
    r2 = run(st, CS, QUAD, dt=0.01, t_end=0.04)
    assert np.abs(r1.final.values - r2.final.values).max() < 1e-7
    assert r1.final.t == r2.final.t == 0.04


def test_mass_energy_supremum_invariants():
    st = _kac_state(n=257, eta_max=16.0)
    quad = AngularQuadrature(theta_min=5e-3, panels=8, nodes_per_panel=5)
    traj = run(st, CS, quad, dt=2e-3, t_end=0.05)
    m0 = traj.rows[0].mass
    e0 = traj.rows[0].energy
    assert all(abs(r.mass - m0) <= 1e-12 * m0 for r in traj.rows)
    assert all(abs(r.energy - e0) <= 1e-4 * e0 for r in traj.rows)
    # |fhat| <= fhat(0) along the whole run
    assert all(r.sup_ratio <= 1.0 + 1e-8 for r in traj.rows)


def test_entropy_decays():
    st = _kac_state(n=257, eta_max=16.0)
    quad = AngularQuadrature(theta_min=5e-3, panels=8, nodes_per_panel=5)
    traj = run(st, CS, quad, dt=2e-3, t_end=0.05)
    H = traj.column("entropy")
    assert np.all(np.diff(H) <= 1e-12)
    assert H[-1] < H[0]


def test_fourth_moment_decay_rate():
    # laplace datum, d = 1: m4' = J (6 m2^2 - 2 m4) with
    # J = 2 int_0^{pi/4} sin^2 cos^2 theta^{-3/2}; reference value below
    # comes from adaptive quadrature with m0 = 1, m2 = 2, m4 = 24
    g = GridSpec(dimension=1, mode="full-1d", n=512, eta_max=16.0)
    st = init_state(g, InitialDatum(kind="laplace", dimension=1, a=1.0))
    quad = AngularQuadrature(theta_min=1e-4, panels=12, nodes_per_panel=6)
    h = 5e-4
    s2 = step(step(st, CS, quad, h), CS, quad, h)
    m_before = moments(st, 4)
    m_after = moments(s2, 4)
    assert abs(m_before[4] - 24.0) < 0.02
    rate = (m_after[4] - m_before[4]) / (2 * h)
    assert abs(rate - (-1.587081052571e+01)) < 0.02 * 1.587081052571e+01


def test_stability_guard():
    st = _kac_state()
    with pytest.raises(NumericalFailure):
        run(st, CS, QUAD, dt=10.0, t_end=20.0)
    # explicit opt-out skips the check; RK4 still integrates a mild overrun
    lim = run(st, CS, QUAD, dt=1e-3, t_end=1e-3).dt_limit
    traj = run(st, CS, QUAD, dt=1.2 * lim, t_end=4.8 * lim,
               stability_guard=False)
    assert traj.dt_limit == lim
    assert abs(traj.rows[-1].mass - st.mass) < 1e-12


def test_run_validation():
    st = _kac_state()
    with pytest.raises(ConfigError):
        run(st, CS, QUAD, dt=-0.01, t_end=1.0)
    with pytest.raises(ConfigError):
        run(st, CS, QUAD, dt=0.01, t_end=0.0)
    with pytest.raises(ConfigError):
        run(st, CS, QUAD, dt=0.01, t_end=0.1, monitor_every=0)
    with pytest.raises(ConfigError):
        run(st, CS, QUAD, dt=0.01, t_end=0.1, snapshot_times=(0.2,))


def test_snapshot_bookkeeping():
    st = _kac_state()
    traj = run(st, CS, QUAD, dt=0.002, t_end=0.05,
               snapshot_times=(0.0, 0.025, 0.05))
    times = [t for t, _ in traj.snapshots]
    # 0.025 is not a step boundary; it rounds to the nearest one
    assert times == [0.0, 0.024, 0.05]
    for t, s in traj.snapshots:
        assert s.t == t
    assert traj.snapshots[0][1] is st
    assert traj.times[0] == 0.0
    assert traj.times[-1] == 0.05


def test_monitor_every_thins_rows():
    st = _kac_state()
    t1 = run(st, CS, QUAD, dt=0.01, t_end=0.05)
    t5 = run(st, CS, QUAD, dt=0.01, t_end=0.05, monitor_every=5)
    assert len(t1.rows) == 6
    assert len(t5.rows) == 2  # t = 0 and the final row
    assert t5.rows[-1].t == 0.05


def test_radial_runs_skip_entropy():
    g = GridSpec(dimension=2, mode="radial", n=96, eta_max=8.0)
    st = init_state(g, InitialDatum(kind="gaussian", dimension=2, sigma=0.6))
    quad = AngularQuadrature(theta_min=5e-3, panels=8, nodes_per_panel=5,
                             azimuthal_nodes=8)
    traj = run(st, CS, quad, dt=5e-3, t_end=0.02)
    with pytest.raises(ValueError):
        traj.column("entropy")
    assert np.isclose(traj.column("mass")[-1], st.mass, rtol=1e-12)


def test_full2d_keeps_unpaired_edge_empty():
    # the -eta_max row/column of the even lattice has no conjugate partner;
    # the stepper must keep it at zero or the density turns complex
    g = GridSpec(dimension=2, mode="full-2d", n=32, eta_max=4.0)
    datum = InitialDatum(kind="gaussian", dimension=2, sigma=0.5, center=(0.2, 0.0))
    st = init_state(g, datum)
    quad = AngularQuadrature(theta_min=5e-3, panels=8, nodes_per_panel=5,
                             azimuthal_nodes=8)
    traj = run(st, CS, quad, dt=5e-3, t_end=0.02)
    assert np.all(traj.final.values[0, :] == 0.0)
    assert np.all(traj.final.values[:, 0] == 0.0)
    H = traj.column("entropy")
    assert H[-1] <= H[0] + 1e-10


def test_entropy_closed_form():
    # gaussian: H = m (log m - log(2 pi sigma^2)^{d/2} - d/2) with m = 1
    g = GridSpec(dimension=1, mode="full-1d", n=257, eta_max=16.0)
    st = init_state(g, InitialDatum(kind="gaussian", dimension=1, sigma=1.0))
    want = -0.5 * (1.0 + np.log(2 * np.pi))
    assert abs(entropy(st) - want) < 1e-10
    sl = init_state(g, InitialDatum(kind="laplace", dimension=1, a=1.0))
    # exact value -(1 + log 2); the density kink at v = 0 costs ~1e-3
    assert abs(entropy(sl) - (-1.0 - np.log(2.0))) < 5e-3


def test_runconfig_and_simulate():
    g = GridSpec(dimension=1, mode="full-1d", n=129, eta_max=12.0)
    datum = InitialDatum(kind="laplace", dimension=1, a=1.0)
    with pytest.raises(ConfigError):
        RunConfig(grid=g, cross_section=CS, quadrature=QUAD, datum=datum,
                  dt=0.0, t_end=1.0)
    with pytest.raises(ConfigError):
        RunConfig(grid=g, cross_section=CS, quadrature=QUAD,
                  datum=InitialDatum(kind="laplace", dimension=2, a=1.0),
                  dt=0.01, t_end=1.0)
    cfg = RunConfig(grid=g, cross_section=CS, quadrature=QUAD, datum=datum,
                    dt=0.01, t_end=0.03, snapshots=3)
    assert cfg.snapshot_times() == (0.01, 0.02, 0.03)
    traj = simulate(cfg)
    assert [t for t, _ in traj.snapshots] == [0.01, 0.02, 0.03]
    assert traj.final.t == 0.03
