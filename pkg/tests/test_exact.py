import numpy as np
import pytest

from spinll.chain import ChainConfig
from spinll.errors import ConfigError, GuardError
from spinll.exact import (
    basis_state, build_matrix, evolve, expect_energy, expect_sigma, frame_consistency,
    product_state, site_operator,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def dense(op, k, N):
    out = np.ones((1, 1), dtype=complex)
    for n in range(1, N + 1):
        out = np.kron(out, op if n == k else np.eye(2))
    return out


# --- matrices -------------------------------------------------------------------

def test_rotating_resonant_drive_is_minus_sigma_x():
    H = build_matrix(ChainConfig(N=1, rabi=1.0, frame="rotating"))
    assert np.array_equal(H, -SX)


def test_lab_single_site_undriven():
    assert np.array_equal(build_matrix(ChainConfig(N=1, omega0=1.5)), 0.75 * SZ)


@pytest.mark.parametrize("frame", ["lab", "rotating"])
def test_matrix_hermitian(frame):
    cfg = ChainConfig(N=4, omega0=1.1, omega=0.9, rabi=0.3, J_eff=0.7, boundary="periodic", frame=frame)
    H = build_matrix(cfg, 2.3)
    assert np.max(np.abs(H - H.conj().T)) <= 1e-13


def test_size_guard():
    with pytest.raises(GuardError):
        build_matrix(ChainConfig(N=13))


def test_site_operator_matches_kron():
    assert np.array_equal(site_operator("x", 2, 3).toarray(), dense(SX, 2, 3))


# --- states ---------------------------------------------------------------------

def test_product_state_ordering():
    assert np.allclose(product_state([0.0, np.pi]), basis_state("ab"), atol=1e-15)
    assert np.argmax(np.abs(basis_state("ab"))) == 0b01


def test_basis_state_rejects_labels():
    with pytest.raises(ConfigError):
        basis_state("ax")


def test_expect_sigma_simple_states():
    assert np.allclose(expect_sigma(basis_state("a"), 1), [0, 0, 1])
    assert np.allclose(expect_sigma(np.array([1, 1]) / np.sqrt(2), 1), [1, 0, 0])
    assert np.allclose(expect_sigma(product_state(np.pi / 2, np.pi / 2, N=1), 1), [0, 1, 0])


def test_expect_sigma_matches_dense_oracle():
    rng = np.random.default_rng(0)
    for _ in range(20):
        N = int(rng.integers(1, 5))
        psi = rng.normal(size=2 ** N) + 1j * rng.normal(size=2 ** N)
        psi /= np.linalg.norm(psi)
        for k in range(1, N + 1):
            oracle = [np.vdot(psi, dense(P, k, N) @ psi) for P in (SX, SY, SZ)]
            assert max(abs(np.imag(oracle))) <= 1e-12
            assert np.allclose(expect_sigma(psi, k), np.real(oracle), atol=1e-12, rtol=0)


def test_expect_sigma_site_range():
    with pytest.raises(ConfigError):
        expect_sigma(basis_state("ab"), 3)


# --- evolution ------------------------------------------------------------------

def test_rabi_oscillation_rotating_frame():
    rabi = 0.25
    cfg = ChainConfig(N=1, rabi=rabi, frame="rotating")
    T = 20 * np.pi / rabi   # 20 Rabi periods of <sz>
    dt = 0.05
    traj = evolve(basis_state("a"), cfg, dt, int(round(T / dt)), sample_every=10)
    err = np.max(np.abs(traj.sigma[:, 0, 2] - np.cos(2 * rabi * traj.times)))
    assert err <= 1e-8


def test_undriven_eigenstate_is_stationary():
    cfg = ChainConfig(N=3, omega0=1.3, J_eff=0.4, frame="rotating")
    traj = evolve(basis_state("aaa"), cfg, 0.02, 2000, sample_every=50)
    assert np.max(np.abs(traj.sigma[..., 2] - 1.0)) <= 1e-10
    overlap = abs(np.vdot(basis_state("aaa"), traj.final_state))
    assert overlap == pytest.approx(1.0, abs=1e-10)


def test_two_site_flip_flop():
    # in the {|ab>, |ba>} block H = -J/2 + J sigma_x, so <sz_1> = cos(2 J t)
    J = 0.7
    cfg = ChainConfig(N=2, omega0=1.0, J_eff=J, frame="rotating")
    traj = evolve(basis_state("ab"), cfg, 0.01, 2000, sample_every=10)
    assert np.max(np.abs(traj.sigma[:, 0, 2] - np.cos(2 * J * traj.times))) <= 1e-10
    assert np.max(np.abs(traj.sigma[:, 1, 2] + np.cos(2 * J * traj.times))) <= 1e-10


def test_norm_drift_rotating_frame():
    cfg = ChainConfig(N=4, omega0=1.0, omega=0.9, rabi=0.3, J_eff=0.45, frame="rotating")
    traj = evolve(product_state(np.pi, N=4), cfg, 0.05, 10_000, sample_every=1000)
    assert np.max(np.abs(traj.norm - 1)) <= 1e-9


def test_norm_drift_lab_frame():
    cfg = ChainConfig(N=3, omega0=1.0, omega=1.0, rabi=0.2, J_eff=0.3)
    traj = evolve(product_state(np.pi, N=3), cfg, 0.01, 10_000, sample_every=1000)
    assert np.max(np.abs(traj.norm - 1)) <= 1e-7


def test_energy_conserved_rotating_frame():
    cfg = ChainConfig(N=4, omega0=1.0, omega=0.8, rabi=0.4, J_eff=0.6, frame="rotating")
    psi = product_state([0.3, 1.2, 2.0, 2.9], [0.0, 0.5, 1.0, 1.5])
    e0 = expect_energy(psi, cfg)
    traj = evolve(psi, cfg, 0.04, 10_000, sample_every=10_000)
    assert abs(expect_energy(traj.final_state, cfg) - e0) <= 1e-9 * max(1.0, abs(e0))


def test_total_sz_conserved_without_drive():
    cfg = ChainConfig(N=4, omega0=1.0, J_eff=0.8, frame="rotating")
    psi = product_state([0.3, 1.2, 2.0, 2.9], [0.0, 0.5, 1.0, 1.5])
    traj = evolve(psi, cfg, 0.03, 4000, sample_every=20)
    total = traj.sigma[..., 2].sum(axis=1)
    assert np.max(np.abs(total - total[0])) <= 1e-10


def test_factorizes_without_exchange():
    thetas, phis = [0.2, 1.4, 2.7], [0.0, 1.0, -0.6]
    cfg = ChainConfig(N=3, omega0=1.0, omega=0.9, rabi=0.3, frame="rotating")
    joint = evolve(product_state(thetas, phis), cfg, 0.05, 2000, sample_every=20)
    for k, (th, ph) in enumerate(zip(thetas, phis)):
        single = evolve(product_state(th, ph, N=1), cfg.with_(N=1), 0.05, 2000, sample_every=20)
        assert np.max(np.abs(joint.sigma[:, k] - single.sigma[:, 0])) <= 1e-9


def test_sigma_bounded():
    cfg = ChainConfig(N=3, omega0=1.0, omega=1.1, rabi=0.5, J_eff=0.9)
    traj = evolve(product_state([0.5, 1.0, 2.0]), cfg, 0.01, 3000, sample_every=30)
    assert np.max(np.linalg.norm(traj.sigma, axis=-1)) <= 1 + 1e-9


def test_step_guard():
    cfg = ChainConfig(N=2, J_eff=1.0)
    with pytest.raises(GuardError, match="0.1"):
        evolve(basis_state("ab"), cfg, 0.05, 10)


def test_state_size_must_match():
    with pytest.raises(ConfigError):
        evolve(basis_state("ab"), ChainConfig(N=3), 0.01, 1)


# --- frames ---------------------------------------------------------------------

def test_frame_consistency_resonance():
    cfg = ChainConfig(N=1, omega0=1.0, omega=1.0, rabi=0.2)
    assert frame_consistency(cfg, product_state(0.4, 0.3, N=1), 20.0) < 1e-6


def test_frame_consistency_undriven():
    cfg = ChainConfig(N=2, omega0=1.0, omega=0.7, J_eff=0.3)
    # the lab side is RK4, so a fine step keeps its truncation error below the bound
    assert frame_consistency(cfg, product_state([0.4, 2.0], [0.1, 0.9]), 10.0, dt=0.004) < 1e-10


def test_frame_consistency_exchange():
    cfg = ChainConfig(N=3, omega0=1.0, omega=0.9, rabi=0.25, J_eff=0.4)
    assert frame_consistency(cfg, product_state([0.4, 1.5, 2.6]), 10.0) < 1e-6
