"""Symbolic algebra of site-indexed spin-1/2 ladder operators.

Expressions are linear combinations of products of ``s+(k)``, ``s-(k)`` and
``sz(k)`` with complex coefficients.  The drive's time dependence is kept
symbolic: each term carries an integer ``phase_power`` m standing for a
factor ``exp(i m omega t)``.

A term is stored as ``{(factors, phase_power): coefficient}`` where
``factors`` is a tuple of ``(site, kind)`` pairs.  In canonical form every
site occurs at most once and sites increase strictly; the empty tuple is
the identity.

Matrix representation (used by :func:`to_matrix`)::

    s+ = [[0, 1], [0, 0]]     s- = [[0, 0], [1, 0]]     sz = diag(1, -1)

with site 1 the most significant tensor factor and basis index 0 the
``sz = +1`` state.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Mapping, NamedTuple

import numpy as np
import scipy.sparse as sp

from .chain import ChainConfig
from .errors import ConfigError, GuardError, ParseError

PLUS, MINUS, Z = "+", "-", "z"
KINDS = (PLUS, MINUS, Z)
IDENTITY = "I"
ZERO_TOL = 1e-12
MAX_MATRIX_SITES = 12

Factors = tuple  # tuple[tuple[int, str], ...]
Key = tuple  # (Factors, int)

# On-site multiplication table: (left, right) -> {kind: coefficient}.
_SITE_PRODUCT = {
    (PLUS, PLUS): {},
    (PLUS, MINUS): {IDENTITY: 0.5, Z: 0.5},
    (MINUS, PLUS): {IDENTITY: 0.5, Z: -0.5},
    (MINUS, MINUS): {},
    (Z, PLUS): {PLUS: 1.0},
    (PLUS, Z): {PLUS: -1.0},
    (Z, MINUS): {MINUS: -1.0},
    (MINUS, Z): {MINUS: 1.0},
    (Z, Z): {IDENTITY: 1.0},
}

_ADJOINT_KIND = {PLUS: MINUS, MINUS: PLUS, Z: Z}

_MATRICES = {
    PLUS: np.array([[0, 1], [0, 0]], dtype=complex),
    MINUS: np.array([[0, 0], [1, 0]], dtype=complex),
    Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def _is_zero(c: complex) -> bool:
    return abs(c) < ZERO_TOL


def _clean(c: complex) -> complex:
    # strip signed zeros so printing and hashing are stable
    c = complex(c)
    return complex(c.real + 0.0, c.imag + 0.0)


def _reduce_site(kinds: list[str]) -> dict[str, complex]:
    """Product of a sequence of operators acting on one site."""
    acc = {IDENTITY: 1.0}
    for kind in kinds:
        nxt: dict[str, complex] = {}
        for left, c in acc.items():
            if left == IDENTITY:
                nxt[kind] = nxt.get(kind, 0.0) + c
                continue
            for out, d in _SITE_PRODUCT[(left, kind)].items():
                nxt[out] = nxt.get(out, 0.0) + c * d
        acc = {k: v for k, v in nxt.items() if v != 0}
        if not acc:
            break
    return acc


def _canonical_terms(factors: Factors) -> list[tuple[complex, Factors]]:
    """Normal-order one product: returns ``[(scale, canonical_factors), ...]``."""
    by_site: dict[int, list[str]] = {}
    for site, kind in factors:
        by_site.setdefault(site, []).append(kind)
    per_site = []
    for site in sorted(by_site):
        reduced = _reduce_site(by_site[site])
        if not reduced:
            return []
        per_site.append([(c, (site, k)) for k, c in reduced.items()])
    out = []
    for combo in itertools.product(*per_site):
        scale = 1.0
        ops = []
        for c, (site, kind) in combo:
            scale *= c
            if kind != IDENTITY:
                ops.append((site, kind))
        out.append((scale, tuple(ops)))
    return out


class OperatorExpr:
    """Immutable linear combination of operator products.

    Construct through :func:`parse_expr`, :func:`op` or arithmetic on
    existing expressions.  Arithmetic results are always canonical; the raw
    constructor accepts arbitrary factor sequences (in product order) so
    that :func:`canonicalize` can be exercised on unreduced input.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, complex] | None = None):
        merged: dict[Key, complex] = {}
        for (factors, m), c in (terms or {}).items():
            key = (tuple((int(s), k) for s, k in factors), int(m))
            merged[key] = merged.get(key, 0) + complex(c)
        self._terms = {k: _clean(c) for k, c in merged.items() if not _is_zero(c)}

    @property
    def terms(self) -> dict[Key, complex]:
        return dict(self._terms)

    @classmethod
    def scalar(cls, value: complex, phase_power: int = 0) -> "OperatorExpr":
        return cls({((), phase_power): value})

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_canonical(self) -> bool:
        for factors, _ in self._terms:
            sites = [s for s, _ in factors]
            if any(b <= a for a, b in zip(sites, sites[1:])):
                return False
        return True

    def sites(self) -> set[int]:
        return {s for factors, _ in self._terms for s, _ in factors}

    def max_site(self) -> int:
        return max(self.sites(), default=0)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, 0) + c
        return canonicalize(OperatorExpr(terms))

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return canonicalize(OperatorExpr({k: c * other for k, c in self._terms.items()}))
        other = _coerce(other)
        out: dict[Key, complex] = {}
        for (fa, ma), ca in self._terms.items():
            for (fb, mb), cb in other._terms.items():
                for scale, factors in _canonical_terms(fa + fb):
                    key = (factors, ma + mb)
                    out[key] = out.get(key, 0) + ca * cb * scale
        return OperatorExpr(out)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return _coerce(other) * self

    def __truediv__(self, other):
        return self * (1 / other)

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = _coerce(other)
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return canonicalize(self)._terms == canonicalize(other)._terms

    def __hash__(self):
        return hash(frozenset(canonicalize(self)._terms.items()))

    def isclose(self, other, atol: float = 1e-12) -> bool:
        diff = canonicalize(self - _coerce(other))
        return all(abs(c) <= atol for c in diff._terms.values())

    def adjoint(self) -> "OperatorExpr":
        """Hermitian adjoint: reversed products, conjugated coefficients, m -> -m."""
        return canonicalize(OperatorExpr({
            (tuple((s, _ADJOINT_KIND[k]) for s, k in reversed(factors)), -m): c.conjugate()
            for (factors, m), c in self._terms.items()
        }))

    def phase_frozen(self) -> "OperatorExpr":
        """Same expression with every phase factor set to 1."""
        return canonicalize(OperatorExpr({(f, 0): c for (f, m), c in self._terms.items()}))

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"OperatorExpr({to_text(self)!r})"


def _coerce(x) -> OperatorExpr:
    if isinstance(x, OperatorExpr):
        return x
    if isinstance(x, (int, float, complex, np.number)):
        return OperatorExpr.scalar(complex(x))
    raise TypeError(f"cannot use {type(x).__name__} as an operator expression")


def canonicalize(expr: OperatorExpr) -> OperatorExpr:
    """Normal-order every product and merge like terms."""
    out: dict[Key, complex] = {}
    for (factors, m), c in expr._terms.items():
        for scale, canon in _canonical_terms(factors):
            key = (canon, m)
            out[key] = out.get(key, 0) + c * scale
    return OperatorExpr(out)


def op(kind: str, site: int, coeff: complex = 1.0, phase_power: int = 0) -> OperatorExpr:
    """Single-site operator ``coeff * s<kind>(site) * ph(phase_power)``."""
    if kind not in KINDS:
        raise ValueError(f"unknown operator kind {kind!r}")
    if site < 1:
        raise ValueError(f"site index must be >= 1, got {site}")
    return OperatorExpr({(((site, kind),), phase_power): coeff})


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return _coerce(a) * b - _coerce(b) * a


def anticommutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return _coerce(a) * b + _coerce(b) * a


# --------------------------------------------------------------------------
# text form

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_SNUM = r"[+-]?" + _NUM
_TOKENS = [
    ("OP", re.compile(r"s([+\-z])\(\s*([+-]?\d+)\s*\)")),
    ("PHASE", re.compile(r"ph\(\s*([+-]?\d+)\s*\)")),
    ("CPLX", re.compile(
        r"\(\s*(?P<re>" + _SNUM + r")?\s*(?:(?P<sgn>[+-])?\s*(?P<im>" + _NUM + r")?\s*(?P<i>i))?\s*\)")),
    ("NUM", re.compile(_NUM)),
    ("ID", re.compile(r"I(?![A-Za-z])")),
    ("SIGN", re.compile(r"[+-]")),
    ("STAR", re.compile(r"\*")),
]
_WS = re.compile(r"\s+")


def _tokenize(text: str):
    pos = 0
    while pos < len(text):
        m = _WS.match(text, pos)
        if m:
            pos = m.end()
            continue
        for name, pattern in _TOKENS:
            m = pattern.match(text, pos)
            if m and m.end() > pos:
                if name == "CPLX" and m.group("re") is None and m.group("i") is None:
                    continue
                yield name, m, pos
                pos = m.end()
                break
        else:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)


def _complex_literal(m: re.Match) -> complex:
    real = float(m.group("re")) if m.group("re") is not None else 0.0
    if m.group("i") is None:
        return complex(real, 0.0)
    if m.group("re") is not None and m.group("sgn") is None and m.group("im") is None:
        # "(2i)": the signed number was the imaginary part
        return complex(0.0, real)
    if m.group("re") is not None and m.group("sgn") is None:
        raise ParseError("missing sign between real and imaginary parts", m.start())
    imag = float(m.group("im")) if m.group("im") is not None else 1.0
    if m.group("sgn") == "-":
        imag = -imag
    return complex(real, imag)


def parse_expr(text: str) -> OperatorExpr:
    """Parse an operator expression into canonical form.

    Grammar (whitespace-insensitive)::

        expr   := [sign] term (sign term)*
        term   := factor ([*] factor)*
        factor := number | (a+bi) | s+(k) | s-(k) | sz(k) | ph(m) | I

    ``ph(m)`` is the drive phase factor ``exp(i m omega t)``.

    >>> str(parse_expr("s+(1) s-(1)"))
    '(0.5+0.0i) + (0.5+0.0i) sz(1)'
    """
    tokens = list(_tokenize(text))
    if not tokens:
        raise ParseError("empty expression", 0)
    terms: dict[Key, complex] = {}
    i = 0
    sign = 1.0
    if tokens[0][0] == "SIGN":
        sign = -1.0 if tokens[0][1].group() == "-" else 1.0
        i = 1
    while True:
        coeff: complex = sign
        factors: list[tuple[int, str]] = []
        phase = 0
        n_factors = 0
        expect_factor = True
        while i < len(tokens) and tokens[i][0] != "SIGN":
            name, m, pos = tokens[i]
            if name == "STAR":
                if expect_factor:
                    raise ParseError("'*' without a left operand", pos)
                expect_factor = True
                i += 1
                continue
            if name == "OP":
                site = int(m.group(2))
                if site < 1:
                    raise ParseError(f"site index must be >= 1, got {site}", pos)
                factors.append((site, m.group(1)))
            elif name == "PHASE":
                phase += int(m.group(1))
            elif name == "CPLX":
                coeff *= _complex_literal(m)
            elif name == "NUM":
                coeff *= float(m.group())
            elif name == "ID":
                pass
            n_factors += 1
            expect_factor = False
            i += 1
        end_pos = tokens[i][2] if i < len(tokens) else len(text)
        if n_factors == 0 or expect_factor and i > 0 and tokens[i - 1][0] == "STAR":
            raise ParseError("expected a term", end_pos)
        key = (tuple(factors), phase)
        terms[key] = terms.get(key, 0) + coeff
        if i >= len(tokens):
            break
        sign = -1.0 if tokens[i][1].group() == "-" else 1.0
        i += 1
        if i >= len(tokens):
            raise ParseError("dangling sign", len(text))
    return canonicalize(OperatorExpr(terms))


def _fmt_coeff(c: complex) -> str:
    re_part, im_part = c.real + 0.0, c.imag + 0.0
    sign = "-" if np.signbit(im_part) else "+"
    return f"({re_part!r}{sign}{abs(im_part)!r}i)"


def _sort_key(item):
    (factors, m), _ = item
    return (len(factors), factors, m)


def to_text(expr: OperatorExpr) -> str:
    """Render in the grammar accepted by :func:`parse_expr` (exact round trip)."""
    if expr.is_zero:
        return "0"
    parts = []
    for (factors, m), c in sorted(expr._terms.items(), key=_sort_key):
        words = [_fmt_coeff(c)]
        words += [f"s{k}({s})" for s, k in factors]
        if m:
            words.append(f"ph({m})")
        parts.append(" ".join(words))
    return " + ".join(parts)


# --------------------------------------------------------------------------
# matrices

def _site_matrix(kind: str, site: int, n_sites: int):
    mats = [sp.identity(2, dtype=complex, format="csr")] * n_sites
    mats[site - 1] = sp.csr_matrix(_MATRICES[kind])
    return reduce(lambda x, y: sp.kron(x, y, format="csr"), mats)


def to_matrix(expr: OperatorExpr, N: int, t: float | None = None, omega: float = 1.0) -> np.ndarray:
    """Dense ``2**N`` matrix of an expression.

    Phase factors are evaluated as ``exp(i m omega t)``; with ``t=None`` they
    are frozen to 1.  Factors are multiplied in stored order, so raw
    (non-canonical) products are represented faithfully.
    """
    if N > MAX_MATRIX_SITES:
        raise GuardError(f"to_matrix supports at most {MAX_MATRIX_SITES} sites, got {N}")
    if expr.max_site() > N:
        raise ConfigError(f"expression acts on site {expr.max_site()} but N={N}")
    dim = 2 ** N
    total = sp.csr_matrix((dim, dim), dtype=complex)
    cache: dict[tuple[int, str], sp.csr_matrix] = {}
    for (factors, m), c in sorted(expr._terms.items(), key=_sort_key):
        mat = sp.identity(dim, dtype=complex, format="csr")
        for s, k in factors:
            if (s, k) not in cache:
                cache[(s, k)] = _site_matrix(k, s, N)
            mat = mat @ cache[(s, k)]
        phase = 1.0 if t is None or m == 0 else np.exp(1j * m * omega * t)
        total = total + (c * phase) * mat
    return total.toarray()


# --------------------------------------------------------------------------
# the driven chain

def build_hamiltonian(config: ChainConfig) -> OperatorExpr:
    """Symbolic RWA Hamiltonian of the driven XXX chain (hbar = 1).

    Lab frame::

        omega0/2 sum sz(n) - rabi sum (s+(n) ph(-1) + s-(n) ph(1))
            + J_eff sum_bonds (s+(n) s-(m) + s-(n) s+(m) + 1/2 sz(n) sz(m))

    The rotating frame replaces omega0 by the detuning and drops the phases.
    The exchange sum is written once; no Hermitian-conjugate doubling.
    """
    if config.N < 1:
        raise ConfigError("N must be >= 1")
    rotating = config.frame == "rotating"
    level = config.detuning if rotating else config.omega0
    up_phase, down_phase = (0, 0) if rotating else (-1, 1)
    terms: dict[Key, complex] = {}

    def add(factors, m, c):
        if c != 0:
            key = (tuple(sorted(factors)), m)
            terms[key] = terms.get(key, 0) + c

    for n in range(1, config.N + 1):
        add([(n, Z)], 0, level / 2)
        add([(n, PLUS)], up_phase, -config.rabi)
        add([(n, MINUS)], down_phase, -config.rabi)
    for n, m in config.bonds():
        add([(n, PLUS), (m, MINUS)], 0, config.J_eff)
        add([(n, MINUS), (m, PLUS)], 0, config.J_eff)
        add([(n, Z), (m, Z)], 0, config.J_eff / 2)
    return canonicalize(OperatorExpr(terms))


class Motion(NamedTuple):
    """Time derivatives of the three ladder components of one site."""

    minus: OperatorExpr
    plus: OperatorExpr
    z: OperatorExpr

    def component(self, name: str) -> OperatorExpr:
        return getattr(self, name)


def heisenberg_rhs(k: int, H: OperatorExpr, N: int | None = None) -> Motion:
    """``d sigma_k^m / dt = -i [sigma_k^m, H]`` for m in (-, +, z)."""
    n_sites = H.max_site() if N is None else N
    if k < 1 or (n_sites and k > n_sites):
        raise ConfigError(f"site {k} outside 1..{n_sites}")
    return Motion(*(-1j * commutator(op(kind, k), H) for kind in (MINUS, PLUS, Z)))


# --------------------------------------------------------------------------
# comparison with reference forms of the equations of motion

COMPONENTS = ("z", "plus", "minus")
CONVENTIONS = ("single", "doubled")


@dataclass(frozen=True)
class DerivationReport:
    """Outcome of comparing one reference equation with the direct commutator.

    ``difference`` is ``reference - direct``.  ``ratios`` lists the distinct
    per-term coefficient ratios reference/direct; ``same_structure`` is true
    when both sides contain exactly the same operator terms.
    """

    component: str
    site: int
    difference: OperatorExpr
    matches: bool
    source: str = "expanded"
    same_structure: bool = True
    ratios: tuple = ()

    def to_dict(self) -> dict:
        return {
            "component": self.component,
            "site": self.site,
            "source": self.source,
            "matches": self.matches,
            "same_structure": self.same_structure,
            "ratios": [[r.real, r.imag] for r in self.ratios],
            "difference": to_text(self.difference),
        }


def _neighbour_sum(kind: str, k: int) -> OperatorExpr:
    return op(kind, k + 1) + op(kind, k - 1)


def expanded_motion(config: ChainConfig, k: int, J_ref: float) -> Motion:
    """Reference equations of motion written out with explicit anticommutators.

    ``J_ref`` is the exchange constant as it appears in those equations;
    anticommutators are evaluated by the engine.
    """
    w0, rabi = config.omega0, config.rabi
    sp_k, sm_k, sz_k = op(PLUS, k), op(MINUS, k), op(Z, k)
    z = (2j * rabi * (op(PLUS, k, phase_power=-1) - op(MINUS, k, phase_power=1))
         + 2j * J_ref * (anticommutator(sm_k, _neighbour_sum(PLUS, k))
                           - anticommutator(sp_k, _neighbour_sum(MINUS, k))))
    plus = (1j * w0 * sp_k + 1j * rabi * op(Z, k, phase_power=1)
            + 1j * J_ref * (anticommutator(sp_k, _neighbour_sum(Z, k))
                              - anticommutator(sz_k, _neighbour_sum(PLUS, k))))
    # the sign between the two anticommutators is kept as in the reference form
    minus = (-1j * w0 * sm_k - 1j * rabi * op(Z, k, phase_power=-1)
             - 1j * J_ref * (anticommutator(sm_k, _neighbour_sum(Z, k))
                               + anticommutator(sz_k, _neighbour_sum(MINUS, k))))
    return Motion(minus=minus, plus=plus, z=z)


# Unnormalised rotating basis: e+ = ex + i ey, e- = ex - i ey, ez.
BASIS = {
    "plus": np.array([1, 1j, 0]),
    "minus": np.array([1, -1j, 0]),
    "z": np.array([0, 0, 1], dtype=complex),
}
_BASIS_MATRIX = np.column_stack([BASIS["plus"], BASIS["minus"], BASIS["z"]])


def _basis_components(v: np.ndarray) -> dict[str, complex]:
    """Coefficients of ``v`` along (e+, e-, ez)."""
    c = np.linalg.solve(_BASIS_MATRIX, v)
    return {"plus": c[0], "minus": c[1], "z": c[2]}


def determinant_motion(config: ChainConfig, k: int, J_ref: float) -> Motion:
    """Expand the operator cross product ``sigma_k x G`` as a 3x3 determinant.

    First column: basis cross products (computed from the unnormalised basis),
    second: components of sigma_k, third: components of the effective field
    operator G.  Products inside the 2x2 minors are anticommutators.
    """
    e = BASIS
    sigma = {"plus": op(MINUS, k), "minus": op(PLUS, k), "z": op(Z, k)}
    G = {
        "plus": OperatorExpr.scalar(config.rabi, -1) - 2 * J_ref * _neighbour_sum(MINUS, k),
        "minus": OperatorExpr.scalar(config.rabi, 1) - 2 * J_ref * _neighbour_sum(PLUS, k),
        "z": OperatorExpr.scalar(-config.omega0) - 2 * J_ref * _neighbour_sum(Z, k),
    }
    # rows: (basis cross product, signed cofactor), indices follow (e+, e-, ez)
    rows = [
        (np.cross(e["minus"], e["z"]),
         anticommutator(sigma["minus"], G["z"]) - anticommutator(sigma["z"], G["minus"])),
        (np.cross(e["z"], e["plus"]),
         -(anticommutator(sigma["plus"], G["z"]) - anticommutator(sigma["z"], G["plus"]))),
        (np.cross(e["plus"], e["minus"]),
         anticommutator(sigma["plus"], G["minus"]) - anticommutator(sigma["minus"], G["plus"])),
    ]
    out = {name: OperatorExpr() for name in BASIS}
    for vec, cofactor in rows:
        for name, c in _basis_components(vec).items():
            if abs(c) > ZERO_TOL:
                out[name] = out[name] + complex(np.round(c.real, 12), np.round(c.imag, 12)) * cofactor
    # the e+ coefficient of sigma is s-, so it carries d s-/dt
    return Motion(minus=out["plus"], plus=out["minus"], z=out["z"])


def _compare(reference: OperatorExpr, direct: OperatorExpr):
    pub, dire = canonicalize(reference).terms, canonicalize(direct).terms
    same = set(pub) == set(dire)
    ratios = set()
    for key in set(pub) & set(dire):
        r = pub[key] / dire[key]
        ratios.add(complex(round(r.real, 9) + 0.0, round(r.imag, 9) + 0.0))
    return same, tuple(sorted(ratios, key=lambda z: (z.real, z.imag)))


def verify_derivation(config: ChainConfig, k: int, convention: str = "single") -> list[DerivationReport]:
    """Compare direct Heisenberg commutators with the reference equations.

    The direct side is ``-i [sigma_k^m, H]`` for the lab-frame Hamiltonian of
    ``config``.  Two reference forms are checked: the component equations and
    the determinant expansion of the operator cross product.

    ``convention`` fixes how the reference exchange constant maps onto
    ``config.J_eff``: ``"single"`` takes them equal, ``"doubled"`` reads the
    Hamiltonian's "+ H.c." as doubling the exchange sum, i.e. reference
    constant = ``J_eff / 2``.

    Differences are reported, never corrected.
    """
    if convention not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {CONVENTIONS}")
    if not 2 <= k <= config.N - 1:
        raise ConfigError(f"site {k} is not interior for N={config.N} (need 2 <= k <= N-1)")
    lab = config.with_(frame="lab")
    direct = heisenberg_rhs(k, build_hamiltonian(lab), config.N)
    J_ref = config.J_eff if convention == "single" else config.J_eff / 2
    reports = []
    for source, reference in (("expanded", expanded_motion(lab, k, J_ref)),
                              ("determinant", determinant_motion(lab, k, J_ref))):
        for comp in COMPONENTS:
            diff = reference.component(comp) - direct.component(comp)
            same, ratios = _compare(reference.component(comp), direct.component(comp))
            reports.append(DerivationReport(comp, k, diff, diff.is_zero, source, same, ratios))
    return reports


def commutator_oracle(config: ChainConfig, k: int, t: float = 0.37) -> dict[str, float]:
    """Largest entry of ``to_matrix(-i [s, H]) - (-i)(S H - H S)`` per component.

    The right-hand side multiplies dense matrices, so this checks the symbolic
    commutator against plain matrix arithmetic at time ``t``.
    """
    lab = config.with_(frame="lab")
    H = build_hamiltonian(lab)
    Hm = to_matrix(H, config.N, t, config.omega)
    rhs = heisenberg_rhs(k, H, config.N)
    out = {}
    for name, kind in (("z", Z), ("plus", PLUS), ("minus", MINUS)):
        S = to_matrix(op(kind, k), config.N)
        dense = -1j * (S @ Hm - Hm @ S)
        sym = to_matrix(rhs.component(name), config.N, t, config.omega)
        out[name] = float(np.max(np.abs(sym - dense)))
    return out


def random_expr(rng: np.random.Generator, n_sites: int = 3, n_terms: int = 3,
                max_len: int = 4, phases: bool = True) -> OperatorExpr:
    """Random raw (non-canonical) expression with Gaussian-integer coefficients.

    Integer coefficients keep the arithmetic exact, which the algebra-law
    tests rely on.
    """
    terms = {}
    for _ in range(n_terms):
        length = int(rng.integers(0, max_len + 1))
        factors = tuple((int(rng.integers(1, n_sites + 1)), KINDS[int(rng.integers(3))])
                        for _ in range(length))
        m = int(rng.integers(-1, 2)) if phases else 0
        c = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        terms[(factors, m)] = terms.get((factors, m), 0) + c
    return OperatorExpr(terms)


def iter_terms(expr: OperatorExpr) -> Iterable[OperatorExpr]:
    for key, c in sorted(expr.terms.items(), key=_sort_key):
        yield OperatorExpr({key: c})
