import numpy as np
import pytest

import spinll.semiclassical as sc
from spinll.chain import ChainConfig
from spinll.errors import ConfigError, GuardError
from spinll.exact import build_matrix, evolve, product_state, site_operator


def field(values, boundary="free", spacing=1.0):
    return sc.SpinField(np.asarray(values, dtype=float), spacing, boundary)


def exchange_part(rhs_fn, f, cfg):
    # the rhs minus its J = 0 part
    return rhs_fn(f, 0.0, cfg) - rhs_fn(f, 0.0, cfg.with_(J_eff=0.0))


# --- right-hand sides ---------------------------------------------------------------

def test_aligned_with_static_field_is_fixed_point():
    f = sc.uniform_field(5)
    assert np.array_equal(sc.lattice_rhs(f, 0.0, ChainConfig(omega0=1.3)), np.zeros((5, 3)))


def test_transverse_vector_precesses_counterclockwise():
    rhs = sc.lattice_rhs(field([[1, 0, 0]]), 0.0, ChainConfig(omega0=1.7))
    # x cross (-omega0 z) = omega0 y
    assert np.allclose(rhs, [[0, 1.7, 0]])


@pytest.mark.parametrize("boundary", ["free", "periodic", "pinned"])
def test_uniform_field_has_no_exchange_torque(boundary):
    f = sc.uniform_field(6, 0.7, 0.3, boundary=boundary)
    cfg = ChainConfig(omega0=0.0, J_eff=2.0)
    assert np.allclose(sc.lattice_rhs(f, 0.0, cfg), 0, atol=1e-15)
    assert np.allclose(sc.continuum_rhs(f, 0.0, cfg), 0, atol=1e-15)


def test_lattice_exchange_closed_form():
    rng = np.random.default_rng(0)
    v = rng.normal(size=(5, 3))
    cfg = ChainConfig(omega0=0.0, J_eff=0.8)
    got = sc.lattice_rhs(field(v), 0.0, cfg)
    for k in range(5):
        nb = sum(v[j] for j in (k - 1, k + 1) if 0 <= j < 5)
        assert np.allclose(got[k], np.cross(v[k], -2 * cfg.J_eff * nb), atol=1e-14)


def test_continuum_closed_form_periodic():
    rng = np.random.default_rng(1)
    v = rng.normal(size=(8, 3))
    dz, cfg = 0.5, ChainConfig(omega0=1.1, J_eff=0.6, a=1.3)
    lap = (np.roll(v, 1, 0) + np.roll(v, -1, 0) - 2 * v) / dz ** 2
    expected = np.cross(v, [0, 0, -1.1]) - 2 * cfg.a ** 2 * cfg.J_eff * np.cross(v, lap)
    assert np.allclose(sc.continuum_rhs(field(v, "periodic", dz), 0.0, cfg), expected, atol=1e-13)


def test_pinned_ends_do_not_move():
    f = sc.kicked_pinned_chain(10, 0.2)
    d = sc.continuum_rhs(f, 0.0, ChainConfig(omega0=1.0, J_eff=0.5, rabi=0.3))
    assert np.array_equal(d[[0, -1]], np.zeros((2, 3)))
    assert np.any(d[1:-1] != 0)


def test_continuum_without_exchange_equals_lattice():
    rng = np.random.default_rng(2)
    v = rng.normal(size=(6, 3))
    cfg = ChainConfig(omega0=1.2, rabi=0.4, omega=0.9)
    assert np.allclose(sc.continuum_rhs(field(v), 0.7, cfg), sc.lattice_rhs(field(v), 0.7, cfg))


def test_drive_field_components():
    cfg = ChainConfig(omega0=1.1, omega=0.8, rabi=0.3)
    t = 1.9
    assert np.allclose(sc.DriveField.from_config(cfg).cartesian(t),
                       [0.6 * np.cos(0.8 * t), 0.6 * np.sin(0.8 * t), -1.1])
    rot = sc.DriveField.from_config(cfg.with_(frame="rotating")).cartesian(t)
    assert np.allclose(rot, [0.6, 0.0, -(1.1 - 0.8)])


def test_rotating_components_round_trip():
    v = np.array([[0.3, -1.2, 0.5]])
    c = sc.to_rotating_components(v)[0]
    back = c[0] * np.array([1, 1j, 0]) + c[1] * np.array([1, -1j, 0]) + c[2] * np.array([0, 0, 1])
    assert np.allclose(back, v[0])


def test_spin_scale_form_is_same_dynamics():
    rng = np.random.default_rng(3)
    v = rng.normal(size=(7, 3))
    cfg = ChainConfig(omega0=1.0, J_eff=0.7, rabi=0.2)
    sigma_rate = sc.continuum_rhs(field(v, "periodic"), 0.4, cfg)
    spin_rate = sc.spin_rhs(field(v / 2, "periodic"), 0.4, cfg)
    assert np.allclose(spin_rate, sigma_rate / 2, atol=1e-14)


def test_mean_field_matches_exact_derivative_for_product_states():
    # quantum exchange J (written once per bond) = lattice constant 2 * J_sc
    J_sc = 0.35
    thetas, phis = [0.3, 1.2, 2.0, 2.6], [0.1, -0.7, 1.4, 2.2]
    N = 4
    quantum = ChainConfig(N=N, omega0=1.1, omega=0.9, rabi=0.25, J_eff=2 * J_sc)
    t = 0.6
    psi = product_state(thetas, phis)
    H = build_matrix(quantum, t)
    exact_rate = np.empty((N, 3))
    for k in range(1, N + 1):
        for a, name in enumerate("xyz"):
            S = site_operator(name, k, N).toarray()
            exact_rate[k - 1, a] = np.real(np.vdot(psi, 1j * (H @ S - S @ H) @ psi))
    vectors = sc.bloch_vectors(thetas, phis)
    mf = sc.lattice_rhs(field(vectors), t, quantum.with_(J_eff=J_sc))
    assert np.max(np.abs(mf - exact_rate)) <= 1e-14


def test_lattice_rhs_rejects_empty():
    with pytest.raises(ConfigError):
        sc.SpinField(np.zeros((3, 2)))
    with pytest.raises(ConfigError):
        sc.continuum_rhs(field([[0, 0, 1], [0, 0, 1]]), 0.0, ChainConfig())


# --- two-component system ---------------------------------------------------------------

def test_raman_uniform_partner_reduces_to_single():
    rng = np.random.default_rng(4)
    s2 = field(rng.normal(size=(8, 3)), "periodic")
    s1 = sc.uniform_field(8, 0.4, 0.2, boundary="periodic")
    cfg = ChainConfig(omega0=1.0, J_eff=0.6)
    _, d2 = sc.raman_rhs(sc.RamanState(s1, s2), 0.0, cfg)
    assert np.allclose(d2, sc.continuum_rhs(s2, 0.0, cfg), atol=1e-14)


@pytest.mark.parametrize("mode", ["single", "mutual", "frozen"])
def test_raman_equal_profiles_double_exchange(mode):
    rng = np.random.default_rng(5)
    s = field(rng.normal(size=(8, 3)), "periodic")
    cfg = ChainConfig(omega0=1.0, J_eff=0.6)
    drive = sc.continuum_rhs(s, 0.0, cfg.with_(J_eff=0.0))
    _, d2 = sc.raman_rhs(sc.RamanState(s, s), 0.0, cfg, mode=mode)
    assert np.allclose(d2 - drive, 2 * exchange_part(sc.continuum_rhs, s, cfg), atol=1e-13)


def test_raman_partner_modes():
    rng = np.random.default_rng(6)
    s1, s2 = (field(rng.normal(size=(8, 3)), "periodic") for _ in range(2))
    cfg = ChainConfig(omega0=1.0, J_eff=0.6)
    state = sc.RamanState(s1, s2)
    d1, _ = sc.raman_rhs(state, 0.0, cfg, mode="single")
    assert np.allclose(d1, sc.continuum_rhs(s1, 0.0, cfg))
    d1, d2 = sc.raman_rhs(state, 0.0, cfg, mode="mutual")
    m1, m2 = sc.raman_rhs(sc.RamanState(s2, s1), 0.0, cfg, mode="mutual")
    assert np.allclose(d1, m2) and np.allclose(d2, m1)
    d1, _ = sc.raman_rhs(state, 0.0, cfg, mode="frozen")
    assert np.array_equal(d1, np.zeros_like(d1))


def test_raman_without_cross_term():
    rng = np.random.default_rng(7)
    s1, s2 = (field(rng.normal(size=(8, 3)), "periodic") for _ in range(2))
    cfg = ChainConfig(omega0=1.0, J_eff=0.6)
    d1, d2 = sc.raman_rhs(sc.RamanState(s1, s2), 0.0, cfg, cross_term=False)
    assert np.allclose(d1, sc.continuum_rhs(s1, 0.0, cfg))
    assert np.allclose(d2, sc.continuum_rhs(s2, 0.0, cfg))


def test_raman_grids_must_match():
    with pytest.raises(ConfigError):
        sc.RamanState(sc.uniform_field(5), sc.uniform_field(6))
    with pytest.raises(ConfigError):
        sc.RamanState(sc.uniform_field(5, spacing=1.0), sc.uniform_field(5, spacing=0.5))


# --- integration -----------------------------------------------------------------

def test_free_precession_phase():
    w0 = 1.0
    cfg = ChainConfig(omega0=w0)
    T = 100 * 2 * np.pi / w0
    dt = 0.05
    steps = int(round(T / dt))
    traj = sc.integrate(field([[1, 0, 0]]), cfg, dt, steps, sample_every=10, model="lattice")
    phase = np.unwrap(np.angle(traj.sigma[:, 0, 0] + 1j * traj.sigma[:, 0, 1]))
    assert np.max(np.abs(phase - w0 * traj.times)) <= 1e-6 * w0 * traj.times[-1]


def test_zero_field_is_constant():
    v = sc.bloch_vectors([0.3, 1.0, 2.0], [0.0, 1.0, 2.0])
    traj = sc.integrate(field(v), ChainConfig(omega0=0.0), 0.1, 100, model="lattice")
    assert np.array_equal(traj.sigma[-1], v)


def test_norm_and_total_sz_conserved():
    rng = np.random.default_rng(8)
    v = sc.bloch_vectors(rng.uniform(0, 0.4, 32), rng.uniform(0, 2 * np.pi, 32))
    cfg = ChainConfig(omega0=1.0, J_eff=0.5)
    # RK4 amplitude error grows like (rate * dt)^6; the bound needs a step well inside the guard
    dt = 0.03 / (1 + 8 * 0.5)
    traj = sc.integrate(field(v, "periodic"), cfg, dt, 10_000, sample_every=500)
    assert np.max(np.abs(traj.norm - 1)) <= 1e-8
    total = traj.sigma[..., 2].sum(axis=1)
    assert np.max(np.abs(total - total[0])) <= 1e-8


def test_mean_field_exact_without_exchange():
    N = 4
    thetas, phis = [0.2, 1.0, 2.1, 2.9], [0.0, 0.8, -1.1, 2.5]
    cfg = ChainConfig(N=N, omega0=1.0, omega=0.95, rabi=0.2)
    dt, steps = 0.01, int(round(10 * 2 * np.pi / 0.01))
    quantum = evolve(product_state(thetas, phis), cfg, dt, steps, sample_every=10)
    classical = sc.integrate(field(sc.bloch_vectors(thetas, phis)), cfg, dt, steps,
                             sample_every=10, model="lattice")
    assert np.max(np.abs(quantum.sigma - classical.sigma)) <= 1e-6


def test_linearized_dispersion_values():
    cfg = ChainConfig(omega0=1.0, J_eff=0.5, a=2.0)
    assert sc.linearized_dispersion(cfg, 0.0) == 1.0
    assert sc.linearized_dispersion(cfg.with_(J_eff=0.0), 3.0) == 1.0
    k = np.array([0.1, 0.4])
    shift = sc.linearized_dispersion(cfg, k) - 1.0
    assert np.allclose(sc.linearized_dispersion(cfg.with_(J_eff=1.0), k) - 1.0, 2 * shift)


def test_small_wave_oscillates_at_linearized_frequency():
    M, m, amp = 64, 3, 0.05
    z = np.arange(M)
    k = 2 * np.pi * m / M
    values = np.column_stack([amp * np.cos(k * z), amp * np.sin(k * z), np.full(M, np.sqrt(1 - amp ** 2))])
    cfg = ChainConfig(omega0=1.0, J_eff=0.5)
    dt = 0.1 / (1 + 8 * 0.5)
    traj = sc.integrate(field(values, "periodic"), cfg, dt, 20_000, sample_every=10)
    p = traj.sigma[:, 0, 0] + 1j * traj.sigma[:, 0, 1]
    omega = np.polyfit(traj.times, np.unwrap(np.angle(p)), 1)[0]
    predicted = sc.linearized_dispersion(cfg, k)
    assert abs(omega - predicted) <= 0.01 * predicted
    assert abs((omega - 1) - (predicted - 1)) <= 0.02 * (predicted - 1)


def test_stability_guard():
    cfg = ChainConfig(omega0=1.0, J_eff=1.0)
    with pytest.raises(GuardError, match="stability"):
        sc.integrate(sc.kicked_pinned_chain(8, 0.1), cfg, 0.05, 10)
    sc.integrate(sc.kicked_pinned_chain(8, 0.1), cfg, 0.1 / 9, 10)


def test_raman_integration_conserves_norms():
    chain = sc.kicked_pinned_chain(16, 0.05)
    cfg = ChainConfig(omega0=1.0, J_eff=0.5)
    traj = sc.integrate(sc.RamanState(chain, chain), cfg, 0.02, 2000, sample_every=100)
    assert np.max(np.abs(traj.sigma2.norm - 1)) <= 1e-8
    assert np.array_equal(traj.sigma1.times, traj.sigma2.times)


def test_kicked_chain_and_mode_wavenumbers():
    f = sc.kicked_pinned_chain(11, 0.1, spacing=0.5)
    assert f.boundary == "pinned" and f.length == 5.0
    assert np.allclose(f.values[[0, -1]], [[0, 0, 1], [0, 0, 1]])
    assert np.allclose(f.norms(), 1)
    assert np.allclose(sc.mode_wavenumbers(f, [1, 2]), [np.pi / 5, 2 * np.pi / 5])
