"""Operators for the linear-optical elements and the cavity-interaction placement rule.

Every constructor returns a ``LocalOperator`` whose targets follow the
signature in ``SIGNATURES``; multi-site operators index their first target as
the most significant bit (pol before path before spin).
"""

from __future__ import annotations

import enum

import numpy as np

from .cavity import ReflectionPair, scattering_operator
from .hilbert import BASIS_LABELS, LocalOperator, Role

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

_P = [np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)]


class ElementKind(str, enum.Enum):
    PBS = "pbs"
    BS = "bs"
    HWP = "hwp"
    QWP = "qwp"
    SWITCH = "switch"
    NV_INTERACT = "nv_interact"
    SPIN_HADAMARD = "spin_hadamard"


# target roles each element acts on; SWITCH touches nothing
SIGNATURES: dict[ElementKind, tuple[Role, ...]] = {
    ElementKind.PBS: (Role.POLARIZATION, Role.PATH),
    ElementKind.BS: (Role.PATH,),
    ElementKind.HWP: (Role.POLARIZATION, Role.PATH),
    ElementKind.QWP: (Role.POLARIZATION,),
    ElementKind.SWITCH: (),
    ElementKind.NV_INTERACT: (Role.POLARIZATION, Role.PATH, Role.SPIN),
    ElementKind.SPIN_HADAMARD: (Role.SPIN,),
}


def _mode_index(mode: str) -> int:
    try:
        return BASIS_LABELS[Role.PATH][mode]
    except KeyError:
        raise ValueError(f"mode must be k1 or k2, got {mode!r}") from None


def pbs() -> LocalOperator:
    """CNOT with R as control flipping the path: routes R from k1 to k2, leaves L alone."""
    m = np.zeros((4, 4), dtype=complex)
    m[1, 0] = m[0, 1] = 1
    m[2, 2] = m[3, 3] = 1
    return LocalOperator(m, "pbs")


def bs(port: str = "k1") -> LocalOperator:
    """50:50 beam splitter on the path qubit.

    ``port`` names the input mode sent to the symmetric output combination.
    With the default k1 this is the Hadamard; with k2 the input ports are
    swapped (Hadamard after X), which is the same element mounted the other
    way round.
    """
    if _mode_index(port) == 0:
        return LocalOperator(H, "bs")
    return LocalOperator(H @ X, "bs[k2]")


def hwp(mode: str) -> LocalOperator:
    """Polarization bit flip placed on arm ``mode`` only; targets (pol, path)."""
    c = _mode_index(mode)
    m = np.kron(X, _P[c]) + np.kron(I2, _P[1 - c])
    return LocalOperator(m, f"hwp[{mode}]")


def qwp() -> LocalOperator:
    return LocalOperator(H, "qwp")


def nv_interact(mode: str, pair: ReflectionPair) -> LocalOperator:
    """Cavity reflection on arm ``mode``; the other arm bypasses the cavity untouched.

    Targets are (pol, path, spin).
    """
    c = _mode_index(mode)
    s = scattering_operator(pair).matrix.reshape(2, 2, 2, 2)  # [pol', spin', pol, spin]
    m = np.zeros((2, 2, 2, 2, 2, 2), dtype=complex)  # [pol', path', spin', pol, path, spin]
    for path in (0, 1):
        block = s if path == c else np.einsum("ac,bd->abcd", I2, I2)
        m[:, path, :, :, path, :] = block
    return LocalOperator(m.reshape(8, 8), f"nv[{mode}]")


def spin_hadamard() -> LocalOperator:
    """Rotates phi+ to |+> and phi- to -|-> (involutive Hadamard in the (+, -) order)."""
    return LocalOperator(H, "spin_h")


def switch() -> None:
    """Optical switch: only sequences photons through a shared cavity; no state change."""
    return None
