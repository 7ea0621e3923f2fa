import numpy as np
import pytest

import spinll.semiclassical as sc
from spinll.chain import ChainConfig
from spinll.errors import ConfigError
from spinll.spectroscopy import (
    FitError, RingdownProtocol, Spectrum, detect_peaks, fit_mode_law, pinned_chain_ringdown,
    predicted_splitting, raman_doubling, ringdown_spectrum, spectrum_of_signal,
)


def tones(freqs, amps=None, n=2048, dt=0.05, noise=0.0, seed=0):
    t = np.arange(n) * dt
    amps = np.ones(len(freqs)) if amps is None else amps
    x = sum(a * np.exp(1j * w * t) for w, a in zip(freqs, amps))
    if noise:
        rng = np.random.default_rng(seed)
        x = x + noise * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)
    return t, x


# --- transform ------------------------------------------------------------------

def test_single_site_precession_peak():
    w0 = 1.3
    traj = sc.integrate(sc.SpinField(np.array([[1.0, 0, 0]])), ChainConfig(omega0=w0),
                        0.02, 20_000, sample_every=5, model="lattice")
    spec = ringdown_spectrum(traj)
    assert spec.resolution == pytest.approx(2 * np.pi / (traj.times.size * 0.1))
    assert abs(spec.freqs[np.argmax(spec.amps)] - w0) <= spec.resolution


def test_two_tones():
    t, x = tones([0.7, 1.9], [1.0, 0.6])
    peaks = detect_peaks(spectrum_of_signal(t, x, pad_factor=4), 0.2)
    assert len(peaks) == 2
    res = 2 * np.pi / (t.size * 0.05)
    assert abs(peaks[0][0] - 0.7) < res and abs(peaks[1][0] - 1.9) < res


def test_parseval():
    rng = np.random.default_rng(0)
    t = np.arange(1000) * 0.1
    x = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    spec = spectrum_of_signal(t, x)
    power = np.mean(np.abs(x) ** 2)
    assert abs(np.sum(spec.amps ** 2) - power) <= 1e-6 * power


def test_hann_keeps_tone_height():
    t, x = tones([2 * np.pi * 40 / (2048 * 0.05)])
    spec = spectrum_of_signal(t, x, window="hann")
    assert spec.amps.max() == pytest.approx(1.0, rel=1e-12)


def test_trim_to_whole_periods():
    t, x = tones([1.0], n=1000, dt=0.1)
    spec = spectrum_of_signal(t, x, trim_period=1.0)
    # 15 whole periods fit into 100 time units
    assert spec.resolution == pytest.approx(2 * np.pi / (15 * 2 * np.pi), rel=1e-3)


def test_non_uniform_sampling_rejected():
    t = np.array([0.0, 0.1, 0.2, 0.35, 0.4])
    with pytest.raises(ConfigError, match="uniform"):
        spectrum_of_signal(t, np.ones(5))


def test_site_weighting():
    sigma = np.zeros((8, 3, 3))
    sigma[:, 1, 0] = 1.0
    traj = sc.FieldTrajectory(np.arange(8) * 0.5, sigma)
    assert ringdown_spectrum(traj, 1).amps.max() == pytest.approx(1.0)
    assert ringdown_spectrum(traj, 0).amps.max() == 0
    with pytest.raises(ConfigError):
        ringdown_spectrum(traj, np.ones(2))


def test_spectrum_validation():
    with pytest.raises(ConfigError):
        Spectrum(np.array([0.0, 0.0]), np.array([1.0, 1.0]), 1.0)
    with pytest.raises(ConfigError):
        Spectrum(np.array([0.0, 1.0]), np.array([1.0]), 1.0)


# --- peaks ----------------------------------------------------------------------

def test_peak_bias_below_tenth_of_bin():
    rng = np.random.default_rng(1)
    n, dt = 2048, 0.05
    res = 2 * np.pi / (n * dt)
    for seed in range(50):
        w = rng.uniform(0.5, 3.0)
        t, x = tones([w], n=n, dt=dt, noise=0.01, seed=seed)   # SNR 100
        peaks = detect_peaks(spectrum_of_signal(t, x, pad_factor=4), 0.5)
        assert len(peaks) == 1
        assert abs(peaks[0][0] - w) < res / 10


def test_tones_three_bins_apart():
    n, dt = 2048, 0.05
    res = 2 * np.pi / (n * dt)
    w1 = 1.0 + 0.3 * res
    t, x = tones([w1, w1 + 3 * res], n=n, dt=dt)
    # rectangular-window sidelobes reach about 0.3 of the main lobe here
    peaks = detect_peaks(spectrum_of_signal(t, x, pad_factor=4), 0.5)
    assert len(peaks) == 2
    assert abs(peaks[0][0] - w1) < res / 2 and abs(peaks[1][0] - w1 - 3 * res) < res / 2


def test_flat_spectrum_has_no_peaks():
    flat = Spectrum(np.linspace(0, 1, 50), np.ones(50), 0.02)
    assert detect_peaks(flat, 0.1) == []
    assert detect_peaks(Spectrum(np.linspace(0, 1, 50), np.zeros(50), 0.02), 0.1) == []


def test_detect_peaks_arguments():
    with pytest.raises(ConfigError):
        detect_peaks(Spectrum(np.array([]), np.array([]), 1.0))
    t, x = tones([1.0])
    spec = spectrum_of_signal(t, x)
    for bad in (0.0, 1.0):
        with pytest.raises(ConfigError):
            detect_peaks(spec, bad)
    assert detect_peaks(spec, 0.5, fmin=1.5) == []


# --- mode law -------------------------------------------------------------------

def test_exact_quadratic_fit():
    peaks = [(5 + 0.1 * n * n, 1.0) for n in range(1, 6)]
    fit = fit_mode_law(peaks, assignment="all")
    assert fit.omega0_fit == pytest.approx(5, abs=1e-12)
    assert fit.C == pytest.approx(0.1, abs=1e-12)
    assert fit.residual < 1e-12
    assert [n for n, _ in fit.modes] == [1, 2, 3, 4, 5]


def test_auto_assignment_picks_odd_modes():
    peaks = [(2 + 0.05 * n * n, 1.0) for n in (1, 3, 5, 7)]
    fit = fit_mode_law(peaks)
    assert fit.assignment == "odd" and fit.C == pytest.approx(0.05) and fit.residual < 1e-12
    assert fit_mode_law([(2 + 0.05 * n * n, 1.0) for n in (1, 2, 3, 4)]).assignment == "all"


def test_fit_needs_three_peaks():
    with pytest.raises(FitError):
        fit_mode_law([(1.0, 1.0), (1.2, 1.0)])


def test_degenerate_fit_rejected():
    with pytest.raises(FitError):
        fit_mode_law([(1.0, 1.0)] * 3)


def test_mode_fit_serialises():
    d = fit_mode_law([(5 + 0.1 * n * n, 1.0) for n in (1, 3, 5)]).to_dict()
    assert d["assignment"] == "odd" and d["modes"][1] == [3, pytest.approx(5.9)]


# --- ring-down protocols --------------------------------------------------------

def test_predicted_splitting():
    assert predicted_splitting(ChainConfig(J_eff=0.5, a=2.0), np.pi) == pytest.approx(4.0)


def test_zero_exchange_rejected():
    cfg = ChainConfig(omega0=1.0, J_eff=0.0)
    with pytest.raises(FitError):
        pinned_chain_ringdown(cfg)
    with pytest.raises(FitError):
        raman_doubling(cfg)


def test_small_chain_ringdown_peaks_near_law():
    cfg = ChainConfig(omega0=1.0, J_eff=1.0)
    result = pinned_chain_ringdown(cfg, RingdownProtocol(n_points=24, n_modes=3))
    L = 23.0
    # discrete pinned-chain modes from the linearized equation
    for n, w in result.fit.modes:
        k_eff2 = 4 * np.sin(n * np.pi / (2 * L)) ** 2
        assert abs(w - (1.0 + 2 * cfg.J_eff * k_eff2)) < result.spectrum.resolution
    assert result.fit.assignment == "odd"
    assert abs(result.fit.C / result.predicted_C - 1) < 0.1
