"""Dense tensor-product states over two-level sites.

Basis conventions (fixed globally so outputs serialize deterministically):

    polarization  R -> 0, L -> 1
    path          k1 -> 0, k2 -> 1
    NV spin       + -> 0, - -> 1

Site 0 is the most significant index of the amplitude vector.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

SQRT1_2 = 1 / np.sqrt(2)


class Role(str, enum.Enum):
    POLARIZATION = "photon-polarization"
    PATH = "photon-path"
    SPIN = "nv-spin"


BASIS_LABELS: dict[Role, dict[str, int]] = {
    Role.POLARIZATION: {"R": 0, "L": 1},
    Role.PATH: {"k1": 0, "k2": 1},
    Role.SPIN: {"+": 0, "-": 1, "plus": 0, "minus": 1},
}

# phi+- = (|-> +- |+>)/sqrt2, written in the (+, -) index order
PHI_PLUS = np.array([1, 1], dtype=complex) * SQRT1_2
PHI_MINUS = np.array([-1, 1], dtype=complex) * SQRT1_2

MEASUREMENT_BASES: dict[str, dict[str, np.ndarray]] = {
    "plus_minus": {"+": np.array([1, 0], dtype=complex), "-": np.array([0, 1], dtype=complex)},
    "hadamard": {"phi+": PHI_PLUS, "phi-": PHI_MINUS},
}


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class Site:
    role: Role
    owner: str
    index: int

    def __str__(self) -> str:
        short = {Role.POLARIZATION: "pol", Role.PATH: "path", Role.SPIN: "spin"}[self.role]
        return f"{self.owner}.{short}"


def make_layout(photons: Sequence[str] = (), nvs: Sequence[str] = ()) -> tuple[Site, ...]:
    """Photons in declaration order with (pol, path) adjacent, then NV spins."""
    sites = []
    for name in photons:
        sites.append(Site(Role.POLARIZATION, name, len(sites)))
        sites.append(Site(Role.PATH, name, len(sites)))
    for name in nvs:
        sites.append(Site(Role.SPIN, name, len(sites)))
    return tuple(sites)


def _check_layout(layout: Sequence[Site]) -> None:
    if [s.index for s in layout] != list(range(len(layout))):
        raise LayoutError("site indices must be contiguous from 0")
    keys = [(s.owner, s.role) for s in layout]
    if len(set(keys)) != len(keys):
        raise LayoutError("duplicate (owner, role) in layout")


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: tuple[Site, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        layout = tuple(self.layout)
        _check_layout(layout)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(layout):
            raise LayoutError(f"expected {2 ** len(layout)} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_sites(self) -> int:
        return len(self.layout)

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> "StateVector":
        n2 = self.norm2()
        if n2 == 0:
            raise ZeroDivisionError("cannot normalize a zero-norm state")
        return StateVector(self.layout, self.amplitudes / np.sqrt(n2))

    def scaled(self, factor: complex) -> "StateVector":
        return StateVector(self.layout, self.amplitudes * factor)

    def site(self, owner: str, role: Role) -> Site:
        for s in self.layout:
            if s.owner == owner and s.role == role:
                return s
        raise LayoutError(f"no {role.value} site for {owner!r}")

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.n_sites)

    def __add__(self, other: "StateVector") -> "StateVector":
        _same_layout(self, other)
        return StateVector(self.layout, self.amplitudes + other.amplitudes)

    def __repr__(self) -> str:
        return f"StateVector({', '.join(map(str, self.layout))}; norm2={self.norm2():.6g})"


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Matrix acting on ``arity`` sites, row/column index = target bits, first target most significant."""

    matrix: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4, 8):
            raise ValueError(f"operator matrix must be 2^k x 2^k with k in 1..3, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return int(np.log2(self.matrix.shape[0]))

    def is_unitary(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return bool(np.allclose(m.conj().T @ m, np.eye(len(m)), atol=tol, rtol=0))

    def __matmul__(self, other: "LocalOperator") -> "LocalOperator":
        return LocalOperator(self.matrix @ other.matrix, f"{self.name}*{other.name}")


def _same_layout(a: StateVector, b: StateVector) -> None:
    if a.layout != b.layout:
        raise LayoutError("states have different layouts")


def basis_state(layout: Sequence[Site], labels: Sequence[str]) -> StateVector:
    layout = tuple(layout)
    if len(labels) != len(layout):
        raise LayoutError(f"need {len(layout)} labels, got {len(labels)}")
    index = 0
    for site, label in zip(layout, labels):
        table = BASIS_LABELS[site.role]
        if label not in table:
            raise LayoutError(f"label {label!r} is not valid for site {site} ({site.role.value})")
        index = 2 * index + table[label]
    amps = np.zeros(2 ** len(layout), dtype=complex)
    amps[index] = 1
    return StateVector(layout, amps)


def product_state(layout: Sequence[Site], vectors: Iterable[np.ndarray]) -> StateVector:
    amps = np.ones(1, dtype=complex)
    for v in vectors:
        amps = np.kron(amps, np.asarray(v, dtype=complex))
    return StateVector(tuple(layout), amps)


def apply(state: StateVector, targets: Sequence[Site], op: LocalOperator) -> StateVector:
    """Return (I x ... x M x ... x I)|state> with M embedded on ``targets``."""
    axes = [t.index for t in targets]
    if len(set(axes)) != len(axes):
        raise LayoutError("operator targets must be distinct")
    for t in targets:
        if t.index >= state.n_sites or state.layout[t.index] != t:
            raise LayoutError(f"site {t} is not part of the state layout")
    k = len(axes)
    if op.arity != k:
        raise ValueError(f"operator {op.name or ''} has arity {op.arity}, got {k} targets")
    t = np.moveaxis(state.tensor(), axes, range(k))
    shape = t.shape
    t = (op.matrix @ t.reshape(2**k, -1)).reshape(shape)
    t = np.moveaxis(t, range(k), axes)
    return StateVector(state.layout, t.reshape(-1))


def inner(a: StateVector, b: StateVector) -> complex:
    _same_layout(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(ideal: StateVector, actual: StateVector) -> float:
    """|<ideal|actual>|^2 of the normalized inputs; phase-insensitive."""
    _same_layout(ideal, actual)
    n_i, n_a = ideal.norm2(), actual.norm2()
    if n_i == 0 or n_a == 0:
        raise ZeroDivisionError("fidelity undefined for a zero-norm state")
    if abs(n_i - 1) > 1e-12 or abs(n_a - 1) > 1e-12:
        log.debug("fidelity: normalizing inputs (norm2 %.6g, %.6g)", n_i, n_a)
    return float(abs(np.vdot(ideal.amplitudes, actual.amplitudes)) ** 2 / (n_i * n_a))


def contract(state: StateVector, site: Site, vector: np.ndarray) -> StateVector:
    """Project ``site`` onto ``vector`` and drop it from the layout (result unnormalized)."""
    if state.layout[site.index] != site:
        raise LayoutError(f"site {site} is not part of the state layout")
    t = np.moveaxis(state.tensor(), site.index, 0).reshape(2, -1)
    rest = np.conj(np.asarray(vector, dtype=complex)) @ t
    layout = [s for s in state.layout if s != site]
    layout = tuple(Site(s.role, s.owner, i) for i, s in enumerate(layout))
    return StateVector(layout, rest)


def reduce_to(state: StateVector, owners: Sequence[str]) -> tuple[Site, ...]:
    return tuple(s for s in state.layout if s.owner in owners)


@dataclass(frozen=True)
class Branch:
    outcome: str
    probability: float
    state: StateVector


def measure(state: StateVector, target: Site, basis: str = "hadamard") -> list[Branch]:
    """Projective measurement of an NV spin; collapsed states keep the full layout."""
    if target.role is not Role.SPIN:
        raise LayoutError(f"can only measure NV spin sites, got {target}")
    if basis not in MEASUREMENT_BASES:
        raise ValueError(f"unknown basis {basis!r}")
    total = state.norm2()
    if total == 0:
        raise ZeroDivisionError("cannot measure a zero-norm state")
    branches = []
    for label, vec in MEASUREMENT_BASES[basis].items():
        projector = np.outer(vec, vec.conj())
        projected = apply(state, [target], LocalOperator(projector, f"P[{label}]"))
        p = projected.norm2() / total
        collapsed = projected.normalized() if p > 0 else projected
        branches.append(Branch(label, p, collapsed))
    return branches
