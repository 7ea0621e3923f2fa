"""Physical parameters of the driven spin chain.

Units: hbar = 1, so energies and exchange constants are angular frequencies.
By convention omega0 = 1 sets the frequency scale, times are in 1/omega0 and
lengths in lattice constants.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

from .errors import ConfigError

BOUNDARIES = ("open", "periodic")
FRAMES = ("lab", "rotating")


@dataclass(frozen=True)
class ChainConfig:
    """Parameters of the chain and of the homogeneous drive.

    Attributes
    ----------
    N : int
        Number of sites.
    omega0 : float
        Transition angular frequency.
    omega : float
        Drive angular frequency.
    rabi : float
        Rabi frequency of the drive (gyroelectric ratio times field amplitude).
    J_eff : float
        Exchange prefactor of the XXX coupling, written once per bond.
    a : float
        Lattice constant.
    boundary : {"open", "periodic"}
        Neighbour sums of the quantum Hamiltonian.
    frame : {"lab", "rotating"}
        ``"rotating"`` removes the drive's time dependence (detuning
        ``omega0 - omega``).
    """

    N: int = 1
    omega0: float = 1.0
    omega: float = 1.0
    rabi: float = 0.0
    J_eff: float = 0.0
    a: float = 1.0
    boundary: str = "open"
    frame: str = "lab"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError(f"N must be an integer >= 1, got {self.N!r}")
        if self.rabi < 0:
            raise ConfigError(f"rabi must be >= 0, got {self.rabi!r}")
        if self.a <= 0:
            raise ConfigError(f"a must be > 0, got {self.a!r}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.frame not in FRAMES:
            raise ConfigError(f"frame must be one of {FRAMES}, got {self.frame!r}")

    @property
    def detuning(self) -> float:
        return self.omega0 - self.omega

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbour bonds as 1-based site pairs."""
        pairs = [(n, n + 1) for n in range(1, self.N)]
        if self.boundary == "periodic" and self.N >= 3:
            pairs.append((self.N, 1))
        return pairs

    def with_(self, **changes) -> "ChainConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)
