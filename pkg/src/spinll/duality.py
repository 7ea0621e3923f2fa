"""Electromagnetic field tensors, their Levi-Civita duals and invariants.

Conventions: metric ``diag(+1, -1, -1, -1)``, ``eps_{0123} = +1`` (so the
contravariant ``eps^{0123} = -1``), units with c = 1 so E and H share units.
The contravariant tensor is laid out as::

    F^{mu nu} = [[ 0,  -E1, -E2, -E3],
                 [ E1,  0,  -H3,  H2],
                 [ E2,  H3,  0,  -H1],
                 [ E3, -H2,  H1,  0 ]]

With these conventions the dual of ``F(E, H)`` is ``F(-H, E)`` and the
invariants are ``H^2 - E^2`` and ``-E . H``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
ANTISYMMETRY_TOL = 1e-12


def _levi_civita(n: int = 4) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


LEVI_CIVITA = _levi_civita()       # permutation symbol, [0, 1, 2, 3] = +1
EPS_UPPER = -LEVI_CIVITA           # eps^{mu nu alpha beta}, lowered by a metric of determinant -1


@dataclass(frozen=True)
class EMFieldVectors:
    E: tuple[float, float, float]
    H: tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class FieldTensor:
    entries: np.ndarray
    variance: str = "contravariant"

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.shape != (4, 4):
            raise ConfigError(f"field tensor must be 4x4, got shape {arr.shape}")
        if self.variance not in ("contravariant", "covariant"):
            raise ConfigError(f"unknown variance {self.variance!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    def lowered(self) -> "FieldTensor":
        if self.variance == "covariant":
            return self
        return FieldTensor(METRIC @ self.entries @ METRIC, "covariant")

    def raised(self) -> "FieldTensor":
        if self.variance == "contravariant":
            return self
        return FieldTensor(METRIC @ self.entries @ METRIC, "contravariant")

    def __add__(self, other: "FieldTensor") -> "FieldTensor":
        return FieldTensor(self.raised().entries + other.raised().entries)

    def __mul__(self, scalar: float) -> "FieldTensor":
        return FieldTensor(self.entries * scalar, self.variance)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def from_fields(f: EMFieldVectors) -> FieldTensor:
    """Contravariant tensor of the field pair ``(E, H)``."""
    E1, E2, E3 = (float(x) for x in f.E)
    H1, H2, H3 = (float(x) for x in f.H)
    return FieldTensor(np.array([
        [0.0, -E1, -E2, -E3],
        [E1, 0.0, -H3, H2],
        [E2, H3, 0.0, -H1],
        [E3, -H2, H1, 0.0],
    ]))


def extract(F: FieldTensor) -> EMFieldVectors:
    """Inverse of :func:`from_fields`."""
    M = F.raised().entries
    E = (-M[0, 1], -M[0, 2], -M[0, 3])
    H = (-M[2, 3], M[1, 3], -M[1, 2])
    return EMFieldVectors(tuple(float(x) + 0.0 for x in E), tuple(float(x) + 0.0 for x in H))


def _check_antisymmetric(F: FieldTensor):
    M = F.entries
    if np.max(np.abs(M + M.T)) > ANTISYMMETRY_TOL * max(1.0, np.max(np.abs(M))):
        raise ConfigError("field tensor is not antisymmetric")


def dual(F: FieldTensor) -> FieldTensor:
    """``Fdual^{mu nu} = 1/2 eps^{mu nu alpha beta} F_{alpha beta}``, ``eps^{0123} = -1``.

    The result has the same variance as the input.  ``dual(dual(F)) == -F``.
    """
    _check_antisymmetric(F)
    lower = F.lowered().entries
    upper = 0.5 * np.einsum("mnab,ab->mn", EPS_UPPER, lower)
    out = FieldTensor(upper)
    return out if F.variance == "contravariant" else out.lowered()


def invariants(F: FieldTensor) -> tuple[float, float]:
    """Return ``(1/2 F_{mn} F^{mn}, -1/4 Fdual^{mn} F_{mn})``.

    Equal to ``(H^2 - E^2, -E . H)`` for ``F = from_fields(E, H)``.
    """
    _check_antisymmetric(F)
    upper = F.raised().entries
    lower = F.lowered().entries
    scalar = 0.5 * np.sum(lower * upper)
    pseudo = -0.25 * np.sum(dual(F.raised()).entries * lower)
    return float(scalar), float(pseudo)


def boost(F: FieldTensor, velocity: float, axis: int = 3) -> FieldTensor:
    """Lorentz boost of a contravariant tensor along a spatial axis (1, 2 or 3)."""
    if not abs(velocity) < 1:
        raise ConfigError("boost velocity must satisfy |v| < 1")
    gamma = 1.0 / np.sqrt(1.0 - velocity ** 2)
    L = np.eye(4)
    L[0, 0] = L[axis, axis] = gamma
    L[0, axis] = L[axis, 0] = -gamma * velocity
    return FieldTensor(L @ F.raised().entries @ L.T)
