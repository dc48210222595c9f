"""Protocol circuits, state dictionaries, NV-outcome tabulation and restoration."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cavity import IDEAL, ReflectionPair
from .circuit import SPIN_STATES, CircuitSpec, Step, execute
from .hilbert import (
    PHI_MINUS,
    PHI_PLUS,
    LayoutError,
    LocalOperator,
    Role,
    StateVector,
    apply,
    contract,
    fidelity,
    make_layout,
)
from .optics import ElementKind, H, X, Z

S = 1 / np.sqrt(2)
BELL_NAMES = ("phi1+", "phi1-", "phi2+", "phi2-")
GHZ_NAMES = tuple(f"psi{i}{s}" for i in range(1, 5) for s in "+-")
NV_OUTCOMES = ("phi+", "phi-")
_NV_VECTORS = {"phi+": PHI_PLUS, "phi-": PHI_MINUS}

_PRETTY_DIGIT = str.maketrans("1234+-", "₁₂₃₄⁺⁻")


@dataclass(frozen=True, order=True)
class HyperBellLabel:
    pol: str
    spatial: str

    def __post_init__(self):
        if self.pol not in BELL_NAMES or self.spatial not in BELL_NAMES:
            raise ValueError(f"unknown Bell label {self.pol}_{self.spatial}")

    @property
    def ascii(self) -> str:
        return f"{self.pol}_{self.spatial}"

    @property
    def pretty(self) -> str:
        def fmt(n):
            return "|Φ" + n[3:].translate(_PRETTY_DIGIT) + "⟩"

        return f"{fmt(self.pol)}_P{fmt(self.spatial)}_S"

    def __str__(self) -> str:
        return self.ascii


@dataclass(frozen=True, order=True)
class HyperGHZLabel:
    pol: str
    spatial: str

    def __post_init__(self):
        if self.pol not in GHZ_NAMES or self.spatial not in GHZ_NAMES:
            raise ValueError(f"unknown GHZ label {self.pol}_{self.spatial}")

    @property
    def ascii(self) -> str:
        return f"{self.pol}_{self.spatial}"

    @property
    def pretty(self) -> str:
        def fmt(n):
            return "|Ψ" + n[3:].translate(_PRETTY_DIGIT) + "⟩"

        return f"{fmt(self.pol)}_P{fmt(self.spatial)}_S"

    def __str__(self) -> str:
        return self.ascii


def parse_label(text: str) -> HyperBellLabel | HyperGHZLabel:
    pol, sep, spatial = text.partition("_")
    if not sep:
        raise ValueError(f"label {text!r} must look like phi1+_phi2- or psi1+_psi2+")
    if pol.startswith("psi"):
        return HyperGHZLabel(pol, spatial)
    return HyperBellLabel(pol, spatial)


ALL_BELL_LABELS = tuple(HyperBellLabel(p, s) for s in BELL_NAMES[:2] for p in BELL_NAMES) + tuple(
    HyperBellLabel(p, s) for s in BELL_NAMES[2:] for p in BELL_NAMES
)
ALL_GHZ_LABELS = tuple(HyperGHZLabel(p, s) for p in GHZ_NAMES for s in GHZ_NAMES)


# -- dictionaries -----------------------------------------------------------

# each family is the bit pattern of its first term; the second term is the complement
_BELL_PATTERNS = {"phi1": (0, 0), "phi2": (1, 0)}
_GHZ_PATTERNS = {"psi1": (0, 0, 0), "psi2": (1, 0, 0), "psi3": (0, 1, 0), "psi4": (0, 0, 1)}


def _cat_state(pattern: Sequence[int], sign: str) -> np.ndarray:
    n = len(pattern)
    v = np.zeros(2**n, dtype=complex)
    first = int("".join(map(str, pattern)), 2)
    second = (2**n - 1) ^ first
    v[first] += S
    v[second] += S if sign == "+" else -S
    return v.reshape([2] * n)


def _hyper(pol_name: str, spatial_name: str, patterns: dict) -> np.ndarray:
    P = _cat_state(patterns[pol_name[:-1]], pol_name[-1])
    Q = _cat_state(patterns[spatial_name[:-1]], spatial_name[-1])
    n = P.ndim
    # interleave to (pol_0, path_0, pol_1, path_1, ...)
    t = np.multiply.outer(P, Q)
    order = [ax for i in range(n) for ax in (i, n + i)]
    return np.transpose(t, order).reshape(-1)


def photon_layout(n_photons: int):
    return make_layout(("a", "b", "c")[:n_photons])


def bell_state(label: HyperBellLabel | str) -> StateVector:
    if isinstance(label, str):
        label = parse_label(label)
    return StateVector(photon_layout(2), _hyper(label.pol, label.spatial, _BELL_PATTERNS))


def ghz_state(label: HyperGHZLabel | str) -> StateVector:
    if isinstance(label, str):
        label = parse_label(label)
    return StateVector(photon_layout(3), _hyper(label.pol, label.spatial, _GHZ_PATTERNS))


def bell_dictionary() -> dict[HyperBellLabel, StateVector]:
    return {lab: bell_state(lab) for lab in ALL_BELL_LABELS}


def ghz_dictionary() -> dict[HyperGHZLabel, StateVector]:
    return {lab: ghz_state(lab) for lab in ALL_GHZ_LABELS}


def _dictionary_for(state: StateVector):
    n_photons = sum(1 for s in state.layout if s.role is Role.POLARIZATION)
    if any(s.role is Role.SPIN for s in state.layout):
        raise LayoutError("classify expects a photons-only state")
    if n_photons == 2:
        labels, maker = ALL_BELL_LABELS, bell_state
    elif n_photons == 3:
        labels, maker = ALL_GHZ_LABELS, ghz_state
    else:
        raise LayoutError(f"no state dictionary for {n_photons} photons")
    layout = photon_layout(n_photons)
    if state.layout != layout:
        state = StateVector(layout, state.amplitudes)
    return labels, maker, state


def classify(state: StateVector, tol: float = 1e-9):
    """Dictionary label whose fidelity with ``state`` exceeds 1 - tol, else None."""
    labels, maker, state = _dictionary_for(state)
    basis = np.array([maker(lab).amplitudes for lab in labels])
    v = state.normalized().amplitudes
    overlaps = np.abs(basis.conj() @ v) ** 2
    best = int(np.argmax(overlaps))
    return labels[best] if overlaps[best] > 1 - tol else None


# -- builders ---------------------------------------------------------------


def _steps(*items) -> tuple[Step, ...]:
    out = []
    for item in items:
        kind, *rest = item
        kind = ElementKind(kind)
        if kind is ElementKind.NV_INTERACT:
            nv, photon, mode = rest
            out.append(Step(kind, (nv, photon), mode))
        elif kind in (ElementKind.HWP, ElementKind.BS) and len(rest) == 2:
            out.append(Step(kind, (rest[0],), rest[1]))
        else:
            out.append(Step(kind, tuple(rest)))
    return tuple(out)


def build_hbsg2() -> CircuitSpec:
    """Two-photon hyperentangled Bell-state generation with two NV centers."""
    steps = _steps(
        ("pbs", "a"),
        ("pbs", "b"),
        ("nv_interact", "NV1", "a", "k2"),
        ("switch", "b"),
        ("nv_interact", "NV1", "b", "k2"),
        ("bs", "a"),
        ("bs", "b", "k2"),
        ("nv_interact", "NV2", "a", "k1"),
        ("switch", "b"),
        ("nv_interact", "NV2", "b", "k2"),
    )
    return CircuitSpec(
        ("a", "b"),
        (("NV1", "phi_plus"), ("NV2", "phi_plus")),
        steps,
        "hbsg2",
        "two-photon polarization-spatial hyperentangled Bell state generation",
    )


def build_hbsg3() -> CircuitSpec:
    """Three-photon hyperentangled GHZ generation with three NV centers."""
    steps = _steps(
        ("pbs", "a"),
        ("pbs", "b"),
        ("pbs", "c"),
        ("nv_interact", "NV1", "a", "k2"),
        ("nv_interact", "NV1", "b", "k2"),
        ("nv_interact", "NV2", "b", "k1"),
        ("nv_interact", "NV2", "c", "k2"),
        ("bs", "a"),
        ("bs", "b", "k2"),
        ("bs", "c", "k2"),
        ("nv_interact", "NV3", "a", "k1"),
        ("nv_interact", "NV3", "b", "k1"),
        ("nv_interact", "NV3", "c", "k1"),
        ("bs", "a"),
        ("bs", "b"),
        ("bs", "c"),
    )
    return CircuitSpec(
        ("a", "b", "c"),
        (("NV1", "phi_plus"), ("NV2", "phi_plus"), ("NV3", "phi_plus")),
        steps,
        "hbsg3",
        "three-photon polarization-spatial hyperentangled GHZ state generation",
    )


def _parity_stage(first: str, second: str) -> tuple:
    return (
        ("nv_interact", first, "a", "k1"),
        ("nv_interact", first, "b", "k2"),
        ("bs", "a"),
        ("bs", "b"),
        ("nv_interact", second, "a", "k1"),
        ("nv_interact", second, "b", "k2"),
    )


def build_hbsa(through_stage: int = 3) -> CircuitSpec:
    """Nondestructive hyperentangled Bell-state analyzer.

    Stage 1 couples both photons to NV1 and NV2, stage 2 is a BS and a QWP on
    each photon, stage 3 repeats stage 1 with NV3 and NV4.  Restoring the
    input state depends on the measured signature, so it is applied
    afterwards by ``restoration``/``apply_restoration`` rather than being part
    of the fixed netlist.
    """
    if through_stage not in (1, 2, 3):
        raise ValueError("through_stage must be 1, 2 or 3")
    items = list(_parity_stage("NV1", "NV2"))
    if through_stage >= 2:
        items += [("bs", "a"), ("bs", "b"), ("qwp", "a"), ("qwp", "b")]
    if through_stage >= 3:
        items += list(_parity_stage("NV3", "NV4"))
    name = "hbsa" if through_stage == 3 else f"hbsa_stage{through_stage}"
    return CircuitSpec(
        ("a", "b"),
        tuple((f"NV{i}", "phi_plus") for i in range(1, 5 if through_stage == 3 else 3)),
        _steps(*items),
        name,
        "complete nondestructive hyperentangled Bell state analysis",
    )


# -- running ----------------------------------------------------------------


def with_spins(c: CircuitSpec, photons: StateVector) -> StateVector:
    """Tensor a photons-only state with the circuit's declared NV initial states."""
    if len(photons.layout) != 2 * len(c.photons):
        raise LayoutError("photon state does not match the circuit's photon count")
    amps = photons.amplitudes
    for _, init in c.nvs:
        amps = np.kron(amps, SPIN_STATES[init])
    return StateVector(c.layout(), amps)


def nv_branches(state: StateVector, nvs: Sequence[str], via_spin_hadamard: bool = False):
    """Split ``state`` by the phi+/phi- outcome of every NV in ``nvs``.

    Yields (outcomes, unnormalized photons-only state).  With
    ``via_spin_hadamard`` each spin is rotated first and then projected on
    |+>/|->, mirroring a readout after a Hadamard pulse.
    """
    if via_spin_hadamard:
        h = LocalOperator(H, "spin_h")
        for nv in nvs:
            state = apply(state, [state.site(nv, Role.SPIN)], h)
        vectors = {"phi+": np.array([1, 0], dtype=complex), "phi-": np.array([0, 1], dtype=complex)}
    else:
        vectors = _NV_VECTORS
    for outcomes in itertools.product(NV_OUTCOMES, repeat=len(nvs)):
        reduced = state
        for nv, out in zip(nvs, outcomes):
            reduced = contract(reduced, reduced.site(nv, Role.SPIN), vectors[out])
        yield outcomes, reduced


@dataclass(frozen=True)
class OutcomeRecord:
    input_label: str | None
    nv_outcomes: tuple[str, ...]
    probability: float
    photon_state: StateVector
    classified: HyperBellLabel | HyperGHZLabel | None
    branch_fidelity: float
    efficiency: float


def _resolve_inputs(c: CircuitSpec, inputs) -> list[tuple[str | None, StateVector]]:
    if inputs is None:
        return [(None, None)]
    out = []
    for item in inputs:
        if isinstance(item, tuple):
            label, state = item
        elif isinstance(item, StateVector):
            label, state = None, item
        else:
            lab = parse_label(item) if isinstance(item, str) else item
            label = lab.ascii
            state = bell_state(lab) if isinstance(lab, HyperBellLabel) else ghz_state(lab)
        if state is not None and not any(s.role is Role.SPIN for s in state.layout):
            state = with_spins(c, state)
        out.append((label, state))
    return out


def tabulate(
    c: CircuitSpec,
    inputs: Iterable | None = None,
    pair: ReflectionPair = IDEAL,
    tol: float = 1e-9,
    min_probability: float = 1e-12,
) -> list[OutcomeRecord]:
    """Execute ``c`` on each input and decompose the output by NV outcomes.

    ``inputs`` may hold dictionary labels, photons-only states, full states or
    (label, state) pairs; None runs the circuit's default initial state.
    Branch fidelity compares each normalized branch with the ideal-mode branch
    for the same outcome, and ``classified`` names that ideal branch (in ideal
    mode the two coincide).  ``efficiency`` is the branch's share of the input
    norm surviving the cavities, which in ideal mode equals its probability.
    """
    nvs = c.nv_names
    lossy = pair != IDEAL
    records = []
    for label, initial in _resolve_inputs(c, inputs):
        out = execute(c, pair, initial)
        total = out.norm2()
        ideal = dict(nv_branches(execute(c, IDEAL, initial), nvs)) if lossy else None
        for outcomes, branch in nv_branches(out, nvs):
            eff = branch.norm2()
            p = eff / total
            ideal_branch = ideal[outcomes] if lossy else branch
            if p < min_probability and ideal_branch.norm2() < min_probability:
                continue
            if p < min_probability:
                records.append(OutcomeRecord(label, outcomes, p, branch, None, 0.0, eff))
                continue
            photons = branch.normalized()
            if ideal_branch.norm2() < min_probability:
                bf, target = 0.0, None
            else:
                bf = fidelity(ideal_branch, photons)
                target = classify(ideal_branch.normalized(), tol)
            records.append(OutcomeRecord(label, outcomes, p, photons, target, bf, eff))
    return records


# -- restoration ------------------------------------------------------------

_PAULI = {"X": X, "Z": Z}
_SINGLE_QUBIT_CHOICES = ((), ("X",), ("Z",), ("Z", "X"))


class RestorationError(LookupError):
    pass


@dataclass(frozen=True)
class PauliOp:
    photon: str
    dof: str  # "pol" or "path"
    pauli: str  # "X" or "Z"

    def __str__(self) -> str:
        return f"{self.pauli}_{self.dof}({self.photon})"


def apply_restoration(state: StateVector, ops: Sequence[PauliOp]) -> StateVector:
    for op in ops:
        role = Role.POLARIZATION if op.dof == "pol" else Role.PATH
        state = apply(state, [state.site(op.photon, role)], LocalOperator(_PAULI[op.pauli], str(op)))
    return state


def restoration(final: HyperBellLabel | str, initial: HyperBellLabel | str) -> tuple[PauliOp, ...]:
    """Shortest single-photon Pauli sequence mapping dictionary[final] to dictionary[initial]."""
    src, dst = bell_state(final), bell_state(initial)
    qubits = [(p, d) for p in ("a", "b") for d in ("pol", "path")]
    candidates = []
    for choice in itertools.product(_SINGLE_QUBIT_CHOICES, repeat=len(qubits)):
        ops = tuple(PauliOp(p, d, g) for (p, d), gates in zip(qubits, choice) for g in gates)
        candidates.append(ops)
    candidates.sort(key=len)
    for ops in candidates:
        if fidelity(dst, apply_restoration(src, ops)) > 1 - 1e-12:
            return ops
    raise RestorationError(f"no single-photon Pauli sequence maps {final} to {initial}")
