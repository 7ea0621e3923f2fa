"""Ring-down spectra of spin-wave resonance and quadratic mode-law fits.

Pipeline: kick a pinned chain, let it ring down without drive, Fourier
transform the weighted transverse moment ``sum_k w_k (sx_k + i sy_k)``, locate
the peaks and fit ``omega_n = omega0 + C n^2``.

Frequencies are angular.  Positive frequencies correspond to counter-clockwise
precession about +z, which is the sense of small oscillations around the
+z-aligned state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.signal

from . import semiclassical as sc
from .chain import ChainConfig
from .errors import ConfigError, PipelineError


class FitError(PipelineError):
    """Mode-law fit impossible or ill-conditioned."""


@dataclass(frozen=True)
class Spectrum:
    freqs: np.ndarray
    amps: np.ndarray
    resolution: float

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        amps = np.asarray(self.amps, dtype=float)
        if freqs.shape != amps.shape:
            raise ConfigError("freqs and amps must have equal length")
        if freqs.size > 1 and np.any(np.diff(freqs) <= 0):
            raise ConfigError("freqs must be strictly increasing")
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "amps", amps)

    def __len__(self):
        return self.freqs.size


@dataclass(frozen=True)
class ModeFit:
    """Least-squares fit of ``omega_n = omega0_fit + C n^2``.

    ``residual`` is the RMS misfit divided by the spread (max - min) of the
    fitted frequencies; ``assignment`` is ``"odd"`` or ``"all"``.
    """

    omega0_fit: float
    C: float
    residual: float
    modes: list
    assignment: str = "odd"

    def to_dict(self) -> dict:
        return {"omega0_fit": self.omega0_fit, "C": self.C, "residual": self.residual,
                "assignment": self.assignment, "modes": [[n, w] for n, w in self.modes]}


def transverse_signal(trajectory, site_weighting=None) -> tuple[np.ndarray, np.ndarray]:
    """Times and the complex moment ``sum_k w_k (sx_k + i sy_k)``.

    ``site_weighting`` may be None (all ones), an integer site index
    (0-based, a single probe) or an array of per-site weights.
    """
    sigma = np.asarray(trajectory.sigma)
    n_sites = sigma.shape[1]
    if site_weighting is None:
        w = np.ones(n_sites)
    elif np.isscalar(site_weighting):
        w = np.zeros(n_sites)
        w[int(site_weighting)] = 1.0
    else:
        w = np.asarray(site_weighting, dtype=float)
        if w.shape != (n_sites,):
            raise ConfigError(f"site_weighting needs {n_sites} entries, got {w.shape}")
    p = sigma[..., 0] + 1j * sigma[..., 1]
    return np.asarray(trajectory.times, dtype=float), p @ w


def spectrum_of_signal(times, signal, trim_period: float | None = None, pad_factor: int = 1,
                       window: str = "rect") -> Spectrum:
    """Amplitude spectrum ``|DFT| / n`` of a uniformly sampled complex signal.

    ``trim_period`` (a frequency) shortens the window to an integer number of
    its periods.  ``pad_factor`` > 1 zero-pads to interpolate the transform;
    the resolution stays ``2 pi / window``.  ``window="hann"`` applies a
    Hann taper (amplitudes divided by its mean so a pure tone keeps unit
    height).
    """
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=complex)
    if times.size < 4:
        raise ConfigError("need at least 4 samples")
    steps = np.diff(times)
    dt = steps.mean()
    if np.max(np.abs(steps - dt)) > 1e-9 * max(dt, 1e-300):
        raise ConfigError("ring-down analysis needs uniformly sampled data")
    n = times.size
    if trim_period:
        periods = math.floor(n * dt * trim_period / (2 * math.pi))
        if periods >= 1:
            n = max(4, min(n, int(round(periods * 2 * math.pi / trim_period / dt))))
    x = signal[:n]
    if window == "hann":
        taper = scipy.signal.get_window("hann", n, fftbins=True)
        x = x * taper / taper.mean()
    elif window != "rect":
        raise ConfigError(f"unknown window {window!r}")
    n_fft = n * int(pad_factor)
    X = np.fft.fftshift(np.fft.fft(x, n_fft))
    freqs = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n_fft, dt))
    return Spectrum(freqs, np.abs(X) / n, 2 * np.pi / (n * dt))


def ringdown_spectrum(trajectory, site_weighting=None, start_time: float = 0.0,
                      trim_period: float | None = None, pad_factor: int = 1,
                      window: str = "rect") -> Spectrum:
    """Spectrum of the weighted transverse moment from ``start_time`` onwards."""
    times, signal = transverse_signal(trajectory, site_weighting)
    keep = times >= start_time - 1e-12
    return spectrum_of_signal(times[keep], signal[keep], trim_period, pad_factor, window)


def detect_peaks(spectrum: Spectrum, min_prominence: float = 0.1,
                 fmin: float | None = None, fmax: float | None = None) -> list[tuple[float, float]]:
    """Local maxima with prominence above ``min_prominence * max(amps)``.

    Each peak is refined by a parabola through the three bins around it.
    Returns ``[(omega, amplitude), ...]`` sorted by frequency.
    """
    if len(spectrum) == 0:
        raise ConfigError("empty spectrum")
    if not 0 < min_prominence < 1:
        raise ConfigError("min_prominence must lie in (0, 1)")
    amps, freqs = spectrum.amps, spectrum.freqs
    top = amps.max()
    if top <= 0:
        return []
    idx, _ = scipy.signal.find_peaks(amps, prominence=min_prominence * top)
    step = freqs[1] - freqs[0] if freqs.size > 1 else 0.0
    peaks = []
    for i in idx:
        a, b, c = amps[i - 1], amps[i], amps[i + 1]
        denom = a - 2 * b + c
        delta = 0.5 * (a - c) / denom if denom != 0 else 0.0
        w = freqs[i] + delta * step
        if (fmin is not None and w < fmin) or (fmax is not None and w > fmax):
            continue
        peaks.append((float(w), float(b - 0.25 * (a - c) * delta)))
    return sorted(peaks)


def _fit(omegas, ns):
    A = np.column_stack([np.ones_like(ns), ns ** 2])
    (w0, C), *_ = np.linalg.lstsq(A, omegas, rcond=None)
    resid = A @ np.array([w0, C]) - omegas
    spread = omegas.max() - omegas.min()
    return w0, C, float(np.sqrt(np.mean(resid ** 2)) / spread)


def fit_mode_law(peaks, assignment: str = "auto") -> ModeFit:
    """Fit ``omega_n = omega0 + C n^2`` to peaks ordered by frequency.

    The lowest peak is mode 1.  ``assignment`` ``"odd"`` numbers the peaks
    1, 3, 5, ... (uniform excitation of a pinned chain), ``"all"`` numbers
    them 1, 2, 3, ...; ``"auto"`` keeps whichever fits better.
    """
    if len(peaks) < 3:
        raise FitError(f"need at least 3 peaks for a mode-law fit, got {len(peaks)}")
    omegas = np.sort(np.array([p[0] for p in peaks], dtype=float))
    if omegas.max() - omegas.min() <= 0:
        raise FitError("degenerate fit: all peaks at the same frequency")
    choices = ("odd", "all") if assignment == "auto" else (assignment,)
    best = None
    for choice in choices:
        if choice not in ("odd", "all"):
            raise ConfigError(f"unknown assignment {choice!r}")
        ns = np.arange(1, omegas.size + 1, dtype=float)
        if choice == "odd":
            ns = 2 * ns - 1
        w0, C, res = _fit(omegas, ns)
        if best is None or res < best.residual:
            best = ModeFit(float(w0), float(C), res,
                           [(int(n), float(w)) for n, w in zip(ns, omegas)], choice)
    if not best.C > 0:
        raise FitError(f"degenerate fit: splitting constant {best.C:.3g} is not positive")
    return best


# ---------------------------------------------------------------------------
# spin-wave resonance protocols

@dataclass(frozen=True)
class RingdownProtocol:
    """Settings of the pinned-chain ring-down experiment.

    The window lasts ``bins_per_c * 2 pi / C_pred``, trimmed to whole periods
    of ``omega0``, so that modes n and n+2 are about ``(4n + 4) * bins_per_c``
    resolution bins apart.  The probe is the
    first free site next to a pinned end; with a uniform kick its spectrum
    gives the low odd modes comparable weight.
    """

    n_points: int = 64
    spacing: float = 1.0
    kick_angle: float = 0.05
    n_modes: int = 4
    bins_per_c: float = 0.6
    guard_fraction: float = 1.0
    sample_every: int = 10
    probe_site: int | None = 1
    min_prominence: float = 0.35
    pad_factor: int = 4
    window: str = "rect"

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def predicted_splitting(config: ChainConfig, length: float) -> float:
    """``2 a^2 J_eff (pi / L)^2``: the n^2 coefficient of the continuum law."""
    return 2 * config.a ** 2 * config.J_eff * (math.pi / length) ** 2


@dataclass
class RingdownResult:
    spectrum: Spectrum
    peaks: list
    fit: ModeFit
    predicted_C: float
    trajectory: object = field(repr=False, default=None)


def _ringdown_plan(config: ChainConfig, protocol: RingdownProtocol):
    if config.J_eff == 0:
        raise FitError("no exchange: all modes are degenerate at omega0")
    chain = sc.kicked_pinned_chain(protocol.n_points, protocol.kick_angle, protocol.spacing)
    C_pred = predicted_splitting(config, chain.length)
    # guard number must stay within the limit; round the step down
    rate = abs(config.omega0) + config.rabi + 8 * config.a ** 2 * abs(config.J_eff) / protocol.spacing ** 2
    dt = protocol.guard_fraction * sc.STABILITY_GUARD / rate * (1 - 1e-12)
    window = protocol.bins_per_c * 2 * math.pi / abs(C_pred)
    steps = protocol.sample_every * int(math.ceil(window / dt / protocol.sample_every))
    return chain, C_pred, dt, steps


def _analyse(traj, config, protocol, C_pred) -> RingdownResult:
    spec = ringdown_spectrum(traj, protocol.probe_site, trim_period=config.omega0,
                             pad_factor=protocol.pad_factor, window=protocol.window)
    peaks = detect_peaks(spec, protocol.min_prominence, fmin=config.omega0)
    fit = fit_mode_law(peaks[:protocol.n_modes])
    return RingdownResult(spec, peaks, fit, C_pred, traj)


def pinned_chain_ringdown(config: ChainConfig, protocol: RingdownProtocol = RingdownProtocol()) -> RingdownResult:
    """Kick, ring down and fit a single-component pinned chain.

    The drive is off (``rabi`` is ignored); the kick is an instantaneous
    uniform tilt of all free points.
    """
    config = config.with_(rabi=0.0, frame="lab")
    chain, C_pred, dt, steps = _ringdown_plan(config, protocol)
    traj = sc.integrate(chain, config, dt, steps, protocol.sample_every, model="continuum")
    return _analyse(traj, config, protocol, C_pred)


@dataclass
class RamanComparison:
    c_single: float
    c_raman: float
    ratio: float
    residuals: dict
    single: RingdownResult = field(repr=False, default=None)
    raman: RingdownResult = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {"c_single": self.c_single, "c_raman": self.c_raman, "ratio": self.ratio,
                "residuals": self.residuals}


def raman_doubling(config: ChainConfig, protocol: RingdownProtocol = RingdownProtocol(),
                   cross_term: bool = True, raman_mode: str = "mutual") -> RamanComparison:
    """Ratio of splitting constants, two-component versus single-component.

    Both runs share grid, kick, step and window.  The two-component run starts
    with identical profiles ``sigma1 = sigma2`` and the spectrum is taken from
    ``sigma2``.  ``raman_mode`` chooses how ``sigma1`` evolves (see
    :func:`spinll.semiclassical.raman_rhs`); ``cross_term=False`` is the
    diagnostic run whose ratio must be 1.
    """
    config = config.with_(rabi=0.0, frame="lab")
    chain, C_pred, dt, steps = _ringdown_plan(config, protocol)
    single_traj = sc.integrate(chain, config, dt, steps, protocol.sample_every, model="continuum")
    single = _analyse(single_traj, config, protocol, C_pred)
    state = sc.RamanState(chain, chain)
    raman_traj = sc.integrate(state, config, dt, steps, protocol.sample_every,
                              raman_mode=raman_mode, cross_term=cross_term)
    raman = _analyse(raman_traj.sigma2, config, protocol, C_pred)
    ratio = raman.fit.C / single.fit.C
    return RamanComparison(single.fit.C, raman.fit.C, ratio,
                           {"single": single.fit.residual, "raman": raman.fit.residual},
                           single, raman)
