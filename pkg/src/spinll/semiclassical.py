"""Classical-vector (mean-field) Landau-Lifshitz dynamics of the chain.

Replacing symmetrised operator products by products of expectation values
turns the operator equation of motion into ``d sigma_k / dt = sigma_k x G_k``
with the effective field::

    G_k = gamma E - 2 J_eff (sigma_{k+1} + sigma_{k-1})
    gamma E = (2 rabi cos(omega t), 2 rabi sin(omega t), -omega0)

On a grid of spacing ``dz`` the neighbour sum becomes the Laplacian, giving
``d sigma / dt = sigma x gamma E - 2 a^2 J_eff sigma x lap(sigma)``.

Exchange convention: here ``J_eff`` is the constant that multiplies the
anticommutator form of the equations of motion.  The mean field of the
quantum Hamiltonian in :mod:`spinll.exact` (exchange written once per bond)
is this lattice equation with ``J_eff`` halved.

Vectors are Cartesian, shape (points, 3).  The rotating basis
``e+- = ex +- i ey`` only enters through :func:`to_rotating_components`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .chain import ChainConfig
from .errors import ConfigError, GuardError

BOUNDARIES = ("pinned", "free", "periodic")
RAMAN_MODES = ("single", "mutual", "frozen")
STABILITY_GUARD = 0.1


@dataclass(frozen=True)
class SpinField:
    """Classical 3-vectors on a lattice or grid.

    With ``boundary="pinned"`` the first and last points are held fixed; they
    act as neighbours but never evolve.
    """

    values: np.ndarray
    spacing: float = 1.0
    boundary: str = "free"

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ConfigError(f"spin field must have shape (points, 3), got {v.shape}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.spacing <= 0:
            raise ConfigError("spacing must be > 0")
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> float:
        """Distance between the pinned ends (or the period for periodic grids)."""
        if self.boundary == "periodic":
            return self.size * self.spacing
        return (self.size - 1) * self.spacing

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.values, axis=1)

    def with_values(self, values) -> "SpinField":
        return replace(self, values=values)


@dataclass(frozen=True)
class RamanState:
    """Two transition components sharing one grid."""

    sigma1: SpinField
    sigma2: SpinField

    def __post_init__(self):
        a, b = self.sigma1, self.sigma2
        if a.values.shape != b.values.shape or a.spacing != b.spacing or a.boundary != b.boundary:
            raise ConfigError("Raman components must share grid size, spacing and boundary")


@dataclass(frozen=True)
class DriveField:
    """Effective field ``gamma E`` in the rotating basis, folded into rad/time.

    ``E_plus`` multiplies ``exp(-i omega t) e+``, ``E_minus`` multiplies
    ``exp(+i omega t) e-`` and ``E_z`` is the static longitudinal part.
    """

    E_plus: complex
    E_minus: complex
    E_z: float
    omega: float = 0.0

    @classmethod
    def from_config(cls, config: ChainConfig) -> "DriveField":
        if config.frame == "rotating":
            return cls(config.rabi, config.rabi, -config.detuning, 0.0)
        return cls(config.rabi, config.rabi, -config.omega0, config.omega)

    def cartesian(self, t: float) -> np.ndarray:
        ep = self.E_plus * np.exp(-1j * self.omega * t)
        em = self.E_minus * np.exp(1j * self.omega * t)
        return np.array([(ep + em).real, (1j * (ep - em)).real, self.E_z])


def to_rotating_components(values: np.ndarray) -> np.ndarray:
    """Coefficients ``(c+, c-, cz)`` of ``v = c+ e+ + c- e- + cz ez``."""
    v = np.asarray(values, dtype=float)
    return np.stack([(v[..., 0] - 1j * v[..., 1]) / 2, (v[..., 0] + 1j * v[..., 1]) / 2,
                     v[..., 2] + 0j], axis=-1)


# ---------------------------------------------------------------------------
# kernels on component-major arrays (3, points)

def _cross(a, b):
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        np.multiply(a[j], b[k], out=out[i])
        out[i] -= a[k] * b[j]
    return out


def _neighbours(s, boundary):
    if boundary == "periodic":
        return np.roll(s, 1, axis=-1) + np.roll(s, -1, axis=-1)
    nb = np.zeros_like(s)
    nb[..., 1:] += s[..., :-1]
    nb[..., :-1] += s[..., 1:]
    return nb


def _second_difference(s, boundary):
    """``s[k+1] + s[k-1] - 2 s[k]`` along the last axis (not divided by dz^2)."""
    if boundary == "periodic":
        return np.roll(s, 1, axis=-1) + np.roll(s, -1, axis=-1) - 2 * s
    d = np.empty_like(s)
    inner = d[..., 1:-1]
    np.add(s[..., 2:], s[..., :-2], out=inner)
    inner -= s[..., 1:-1]
    inner -= s[..., 1:-1]
    if boundary == "free":
        np.subtract(s[..., 1], s[..., 0], out=d[..., 0])
        np.subtract(s[..., -2], s[..., -1], out=d[..., -1])
    else:
        d[..., 0] = 0.0
        d[..., -1] = 0.0
    return d


def _laplacian(s, boundary, dz):
    return _second_difference(s, boundary) / dz ** 2


def _pin(out, boundary):
    if boundary == "pinned":
        out[..., 0] = 0.0
        out[..., -1] = 0.0
    return out


def laplacian(field: SpinField) -> np.ndarray:
    """Second-difference Laplacian, shape (points, 3)."""
    return _laplacian(field.values.T, field.boundary, field.spacing).T


def _drive_vector(config: ChainConfig):
    """Fast ``t -> gamma E`` column vector (3, 1)."""
    if config.frame == "rotating":
        static = np.array([[2 * config.rabi], [0.0], [-config.detuning]])
        return lambda t: static
    r, w, w0 = config.rabi, config.omega, config.omega0
    if r == 0:
        static = np.array([[0.0], [0.0], [-w0]])
        return lambda t: static
    return lambda t: np.array([[2 * r * math.cos(w * t)], [2 * r * math.sin(w * t)], [-w0]])


def _lattice_kernel(config, boundary):
    drive = _drive_vector(config)
    coupling = 2 * config.J_eff

    def f(t, s):
        B = drive(t) - coupling * _neighbours(s, boundary) if coupling else drive(t)
        return _pin(_cross(s, B), boundary)
    return f


def _continuum_kernel(config, boundary, dz, scale=2.0):
    drive = _drive_vector(config)
    coupling = scale * config.a ** 2 * config.J_eff / dz ** 2

    def f(t, s):
        B = drive(t) - coupling * _second_difference(s, boundary) if coupling else drive(t)
        return _pin(_cross(s, B), boundary)
    return f


def _raman_kernel(config, boundary, dz, mode="mutual", cross_term=True):
    if mode not in RAMAN_MODES:
        raise ConfigError(f"raman mode must be one of {RAMAN_MODES}")
    drive = _drive_vector(config)
    coupling = 2 * config.a ** 2 * config.J_eff / dz ** 2

    def f(t, y):
        s1, s2 = y[0], y[1]
        E = drive(t)
        lap1 = _second_difference(s1, boundary)
        lap2 = _second_difference(s2, boundary)
        B2 = E - coupling * (lap2 + lap1) if cross_term else E - coupling * lap2
        d2 = _cross(s2, B2)
        if mode == "frozen":
            d1 = np.zeros_like(s1)
        elif mode == "mutual" and cross_term:
            d1 = _cross(s1, E - coupling * (lap1 + lap2))
        else:
            d1 = _cross(s1, E - coupling * lap1)
        return _pin(np.stack((d1, d2)), boundary)
    return f


def _check_lengths(field: SpinField, minimum: int):
    if field.size < minimum:
        raise ConfigError(f"need at least {minimum} points, got {field.size}")


def lattice_rhs(field: SpinField, t: float, config: ChainConfig) -> np.ndarray:
    """Mean-field lattice equation ``sigma_k x (gamma E - 2 J_eff sum_nb sigma)``."""
    _check_lengths(field, 1)
    return _lattice_kernel(config, field.boundary)(t, field.values.T).T


def continuum_rhs(field: SpinField, t: float, config: ChainConfig) -> np.ndarray:
    """``sigma x gamma E - 2 a^2 J_eff sigma x lap(sigma)`` on a grid."""
    _check_lengths(field, 3)
    return _continuum_kernel(config, field.boundary, field.spacing)(t, field.values.T).T


def spin_rhs(field: SpinField, t: float, config: ChainConfig) -> np.ndarray:
    """Same dynamics written for spin moments ``S = sigma / 2`` (hbar = 1).

    ``dS/dt = S x gamma E - 4 a^2 J_eff S x lap(S)``; the doubled exchange
    coefficient compensates the factor 1/2 in ``S``.
    """
    _check_lengths(field, 3)
    return _continuum_kernel(config, field.boundary, field.spacing, scale=4.0)(t, field.values.T).T


def raman_rhs(state: RamanState, t: float, config: ChainConfig, mode: str = "mutual",
              cross_term: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Two-component dynamics.

    ``sigma2`` obeys ``s2 x gamma E - 2a^2 J s2 x lap(s2) - 2a^2 J s2 x lap(s1)``.
    ``mode`` selects the partner equation: ``"single"`` evolves ``sigma1``
    with :func:`continuum_rhs`, ``"mutual"`` with the mirror image of the
    ``sigma2`` equation, ``"frozen"`` keeps it fixed.  ``cross_term=False``
    drops the coupling (both components then obey :func:`continuum_rhs`).
    """
    _check_lengths(state.sigma1, 3)
    f = _raman_kernel(config, state.sigma1.boundary, state.sigma1.spacing, mode, cross_term)
    d = f(t, np.stack((state.sigma1.values.T, state.sigma2.values.T)))
    return d[0].T, d[1].T


def linearized_dispersion(config: ChainConfig, k) -> np.ndarray:
    """Small-amplitude precession frequency ``omega0 + 2 a^2 J_eff k^2`` about +z."""
    return config.omega0 + 2 * config.a ** 2 * config.J_eff * np.asarray(k, dtype=float) ** 2


@dataclass
class FieldTrajectory:
    """Samples of a spin field; ``sigma`` has shape (samples, points, 3)."""

    times: np.ndarray
    sigma: np.ndarray
    spacing: float = 1.0
    boundary: str = "free"

    @property
    def norm(self) -> np.ndarray:
        return np.linalg.norm(self.sigma, axis=-1)

    def final(self) -> SpinField:
        return SpinField(self.sigma[-1], self.spacing, self.boundary)


@dataclass
class RamanTrajectory:
    sigma1: FieldTrajectory
    sigma2: FieldTrajectory

    @property
    def times(self):
        return self.sigma2.times


def stability_number(config: ChainConfig, dt: float, spacing: float | None = None) -> float:
    """``dt (|omega0| + rabi + 8 a^2 |J_eff| / dz^2)``; lattice runs use dz = a."""
    dz = config.a if spacing is None else spacing
    return dt * (abs(config.omega0) + config.rabi + 8 * config.a ** 2 * abs(config.J_eff) / dz ** 2)


def _rk4(f, y, dt, steps, sample_every, t0=0.0):
    n_samples = steps // sample_every + 1
    out = np.empty((n_samples,) + y.shape)
    times = np.empty(n_samples)
    out[0], times[0] = y, t0
    h2, h6 = dt / 2, dt / 6
    j = 1
    for step in range(1, steps + 1):
        t = t0 + (step - 1) * dt
        k1 = f(t, y)
        k2 = f(t + h2, y + h2 * k1)
        k3 = f(t + h2, y + h2 * k2)
        k4 = f(t + dt, y + dt * k3)
        y = y + h6 * (k1 + 2 * (k2 + k3) + k4)
        if step % sample_every == 0:
            out[j], times[j] = y, t0 + step * dt
            j += 1
    return times, out


def integrate(state, config: ChainConfig, dt: float, steps: int, sample_every: int = 1,
              model: str = "continuum", raman_mode: str = "mutual", cross_term: bool = True,
              t0: float = 0.0):
    """Fixed-step RK4 integration without renormalisation.

    ``state`` is a :class:`SpinField` (``model`` = ``"lattice"`` or
    ``"continuum"``) or a :class:`RamanState`.  Returns a
    :class:`FieldTrajectory` or :class:`RamanTrajectory`.
    """
    if steps < 0 or sample_every < 1:
        raise ConfigError("steps must be >= 0 and sample_every >= 1")
    grid = state.sigma1 if isinstance(state, RamanState) else state
    spacing = None if model == "lattice" else grid.spacing
    number = stability_number(config, dt, spacing)
    if number > STABILITY_GUARD:
        raise GuardError(
            f"explicit stability guard violated: dt*(|omega0| + rabi + 8 a^2 |J| / dz^2) = "
            f"{number:.4g} > {STABILITY_GUARD}")
    if isinstance(state, RamanState):
        _check_lengths(grid, 3)
        f = _raman_kernel(config, grid.boundary, grid.spacing, raman_mode, cross_term)
        y0 = np.stack((state.sigma1.values.T, state.sigma2.values.T))
        times, ys = _rk4(f, y0, dt, steps, sample_every, t0)
        traj = [FieldTrajectory(times, np.ascontiguousarray(ys[:, i].transpose(0, 2, 1)),
                                grid.spacing, grid.boundary) for i in (0, 1)]
        return RamanTrajectory(*traj)
    if model == "lattice":
        f = _lattice_kernel(config, grid.boundary)
    elif model == "continuum":
        _check_lengths(grid, 3)
        f = _continuum_kernel(config, grid.boundary, grid.spacing)
    else:
        raise ConfigError(f"unknown model {model!r}")
    times, ys = _rk4(f, state.values.T.copy(), dt, steps, sample_every, t0)
    return FieldTrajectory(times, np.ascontiguousarray(ys.transpose(0, 2, 1)), grid.spacing, grid.boundary)


def uniform_field(n_points: int, theta: float = 0.0, phi: float = 0.0, spacing: float = 1.0,
                  boundary: str = "free") -> SpinField:
    v = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    return SpinField(np.tile(v, (n_points, 1)), spacing, boundary)


def bloch_vectors(theta, phi=0.0) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.broadcast_to(np.asarray(phi, dtype=float), theta.shape)
    return np.column_stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def kicked_pinned_chain(n_points: int, kick_angle: float, spacing: float = 1.0) -> SpinField:
    """All points along +z, interior points tilted by ``kick_angle`` towards +x.

    A spatially uniform small kick of a pinned chain: it excites only the odd
    standing-wave modes ``sin(n pi z / L)``.
    """
    values = np.tile([0.0, 0.0, 1.0], (n_points, 1))
    values[1:-1] = [math.sin(kick_angle), 0.0, math.cos(kick_angle)]
    return SpinField(values, spacing, "pinned")


def mode_wavenumbers(field: SpinField, n) -> np.ndarray:
    """``k_n = n pi / L`` for a pinned chain."""
    return np.pi * np.asarray(n, dtype=float) / field.length
