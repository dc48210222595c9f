"""Line-oriented netlist language for photon/NV circuits (``.hqc`` files).

Grammar::

    program    := (line NEWLINE)*
    line       := pragma | decl | step | comment | empty
    pragma     := "#@" ("name" | "description") TEXT
    decl       := "photon" NAME | "nv" NAME "init" SPINSTATE
    step       := "pbs" NAME | "bs" NAME ["mode" MODE] | "hwp" NAME "mode" MODE
                | "qwp" NAME | "nv_interact" NV PHOTON "mode" MODE ["ideal"]
                | "spin_hadamard" NV | "switch" NAME
    SPINSTATE  := "plus" | "minus" | "phi_plus" | "phi_minus"
    MODE       := "k1" | "k2"

Anything after ``#`` is a comment, except that a line starting with ``#@``
carries circuit metadata so that serialization round-trips.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import optics
from .cavity import IDEAL, ReflectionPair
from .hilbert import (
    PHI_MINUS,
    PHI_PLUS,
    SQRT1_2,
    LayoutError,
    Role,
    StateVector,
    apply,
    make_layout,
    product_state,
)
from .optics import ElementKind

log = logging.getLogger(__name__)

SPIN_STATES: dict[str, np.ndarray] = {
    "plus": np.array([1, 0], dtype=complex),
    "minus": np.array([0, 1], dtype=complex),
    "phi_plus": PHI_PLUS,
    "phi_minus": PHI_MINUS,
}
MODES = ("k1", "k2")
PAIR_SOURCES = ("from_params", "ideal")

PHOTON_STATES: dict[str, np.ndarray] = {
    "R": np.array([1, 0], dtype=complex),
    "L": np.array([0, 1], dtype=complex),
    "D": np.array([1, 1], dtype=complex) * SQRT1_2,
    "A": np.array([1, -1], dtype=complex) * SQRT1_2,
}
DEFAULT_PHOTON_STATE = "D"

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_KEYWORDS = {"photon", "nv", "init", "mode", "ideal"} | {k.value for k in ElementKind}


# -- diagnostics ------------------------------------------------------------


class CircuitError(Exception):
    kind = "CircuitError"

    def __init__(self, message: str, line: int = 0, col: int = 0, path: str = "<string>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.path = path

    def diagnostic(self) -> str:
        return f"{self.path}:{self.line}:{self.col}: {self.kind}: {self.message}"

    def __str__(self) -> str:
        return self.diagnostic()


class CircuitSyntaxError(CircuitError):
    kind = "SyntaxError"


class CircuitReferenceError(CircuitError):
    kind = "ReferenceError"


class ArityError(CircuitError):
    kind = "ArityError"


class DuplicateError(CircuitError):
    kind = "DuplicateError"


class TotalLossError(RuntimeError):
    """Execution produced a state with zero norm."""


# -- data model -------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    kind: ElementKind
    targets: tuple[str, ...]
    mode: str | None = None
    pair_source: str = "from_params"

    def __post_init__(self):
        object.__setattr__(self, "kind", ElementKind(self.kind))
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.mode is not None and self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.pair_source not in PAIR_SOURCES:
            raise ValueError(f"pair_source must be one of {PAIR_SOURCES}")


@dataclass(frozen=True)
class CircuitSpec:
    photons: tuple[str, ...] = ()
    nvs: tuple[tuple[str, str], ...] = ()
    steps: tuple[Step, ...] = ()
    name: str = ""
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "photons", tuple(self.photons))
        object.__setattr__(self, "nvs", tuple((n, s) for n, s in self.nvs))
        object.__setattr__(self, "steps", tuple(self.steps))
        validate(self)

    @property
    def nv_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.nvs)

    def layout(self):
        return make_layout(self.photons, self.nv_names)

    def __add__(self, other: "CircuitSpec") -> "CircuitSpec":
        """Concatenate the steps of ``other`` (declarations must match)."""
        if (self.photons, self.nvs) != (other.photons, other.nvs):
            raise ValueError("cannot concatenate circuits with different declarations")
        return CircuitSpec(self.photons, self.nvs, self.steps + other.steps, self.name, self.description)


def validate(c: CircuitSpec) -> None:
    """Semantic checks shared by the parser and programmatic construction."""
    seen: set[str] = set()
    for name in list(c.photons) + [n for n, _ in c.nvs]:
        if name in seen:
            raise DuplicateError(f"name {name!r} declared twice")
        seen.add(name)
    for name, init in c.nvs:
        if init not in SPIN_STATES:
            raise ValueError(f"unknown initial spin state {init!r} for {name}")
    photons, nvs = set(c.photons), set(c.nv_names)
    for step in c.steps:
        _check_step(step, photons, nvs)


def _expected_entities(kind: ElementKind) -> tuple[str, ...]:
    if kind is ElementKind.NV_INTERACT:
        return ("nv", "photon")
    if kind is ElementKind.SPIN_HADAMARD:
        return ("nv",)
    if kind is ElementKind.SWITCH:
        return ("any",)
    return ("photon",)


def _check_step(step: Step, photons: set[str], nvs: set[str], line: int = 0, cols=None, path="<string>"):
    want = _expected_entities(step.kind)
    cols = cols or [0] * len(step.targets)
    if len(step.targets) != len(want):
        raise ArityError(
            f"{step.kind.value} takes {len(want)} target(s), got {len(step.targets)}", line, cols[0] if cols else 0, path
        )
    for name, role, col in zip(step.targets, want, cols):
        ok = {"photon": name in photons, "nv": name in nvs, "any": name in photons | nvs}[role]
        if not ok:
            what = "entity" if role == "any" else role
            raise CircuitReferenceError(f"undeclared {what} {name!r}", line, col, path)
    needs_mode = step.kind in (ElementKind.HWP, ElementKind.NV_INTERACT)
    if needs_mode and step.mode is None:
        raise CircuitSyntaxError(f"{step.kind.value} requires a mode", line, 0, path)
    if step.mode is not None and not needs_mode and step.kind is not ElementKind.BS:
        raise CircuitSyntaxError(f"{step.kind.value} does not take a mode", line, 0, path)
    if step.pair_source != "from_params" and step.kind is not ElementKind.NV_INTERACT:
        raise CircuitSyntaxError("only nv_interact takes a pair source", line, 0, path)


# -- parser -----------------------------------------------------------------


@dataclass
class _Line:
    tokens: list[tuple[str, int]]
    lineno: int
    path: str
    pos: int = 0
    end_col: int = 1

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def col(self) -> int:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else self.end_col

    def error(self, msg: str) -> CircuitSyntaxError:
        return CircuitSyntaxError(msg, self.lineno, self.col(), self.path)

    def take(self, what: str) -> tuple[str, int]:
        if self.pos >= len(self.tokens):
            raise self.error(f"expected {what}, found end of line")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def keyword(self, kw: str) -> None:
        tok, col = self.take(repr(kw))
        if tok != kw:
            raise CircuitSyntaxError(f"expected {kw!r}, found {tok!r}", self.lineno, col, self.path)

    def name(self) -> tuple[str, int]:
        tok, col = self.take("a name")
        if not _NAME.match(tok) or tok in _KEYWORDS:
            raise CircuitSyntaxError(f"invalid name {tok!r}", self.lineno, col, self.path)
        return tok, col

    def choice(self, options: Sequence[str], what: str) -> str:
        tok, col = self.take(what)
        if tok not in options:
            raise CircuitSyntaxError(
                f"expected {what} ({' | '.join(options)}), found {tok!r}", self.lineno, col, self.path
            )
        return tok

    def done(self) -> None:
        if self.pos < len(self.tokens):
            tok, col = self.tokens[self.pos]
            raise CircuitSyntaxError(f"unexpected token {tok!r}", self.lineno, col, self.path)


def _tokenize(text: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", text)]


def parse(text: str, path: str = "<string>") -> CircuitSpec:
    photons: list[str] = []
    nvs: list[tuple[str, str]] = []
    steps: list[Step] = []
    meta = {"name": "", "description": ""}
    declared: dict[str, str] = {}

    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        stripped = raw.lstrip()
        if stripped.startswith("#@"):
            body = stripped[2:].strip()
            key, _, value = body.partition(" ")
            if key not in meta:
                col = len(raw) - len(stripped) + 1
                raise CircuitSyntaxError(f"unknown metadata key {key!r}", lineno, col, path)
            meta[key] = value.strip()
            continue
        code = raw.split("#", 1)[0]
        tokens = _tokenize(code)
        if not tokens:
            continue
        ln = _Line(tokens, lineno, path, end_col=len(code.rstrip()) + 1)
        head, head_col = ln.take("a statement")

        if head in ("photon", "nv"):
            name, col = ln.name()
            if name in declared:
                raise DuplicateError(f"name {name!r} already declared as {declared[name]}", lineno, col, path)
            if head == "photon":
                photons.append(name)
            else:
                ln.keyword("init")
                nvs.append((name, ln.choice(tuple(SPIN_STATES), "spin state")))
            ln.done()
            declared[name] = head
            continue

        try:
            kind = ElementKind(head)
        except ValueError:
            raise CircuitSyntaxError(f"unknown statement {head!r}", lineno, head_col, path) from None

        n_targets = len(_expected_entities(kind))
        targets, cols = [], []
        while ln.peek() is not None and ln.peek() not in ("mode", "ideal"):
            name, col = ln.name()
            targets.append(name)
            cols.append(col)
        if len(targets) != n_targets:
            col = cols[n_targets] if len(targets) > n_targets else ln.col()
            raise ArityError(f"{kind.value} takes {n_targets} target(s), got {len(targets)}", lineno, col, path)
        mode = None
        pair_source = "from_params"
        if kind in (ElementKind.HWP, ElementKind.NV_INTERACT):
            ln.keyword("mode")
            mode = ln.choice(MODES, "mode")
        elif kind is ElementKind.BS and ln.peek() == "mode":
            ln.keyword("mode")
            mode = ln.choice(MODES, "mode")
        if kind is ElementKind.NV_INTERACT and ln.peek() == "ideal":
            ln.take("ideal")
            pair_source = "ideal"
        ln.done()
        step = Step(kind, tuple(targets), mode, pair_source)
        _check_step(step, set(photons), set(n for n, _ in nvs), lineno, cols, path)
        steps.append(step)

    return CircuitSpec(tuple(photons), tuple(nvs), tuple(steps), meta["name"], meta["description"])


def parse_file(path) -> CircuitSpec:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), str(path))


# -- serializer -------------------------------------------------------------


def _step_line(s: Step) -> str:
    parts = [s.kind.value, *s.targets]
    if s.mode is not None and not (s.kind is ElementKind.BS and s.mode == "k1"):
        parts += ["mode", s.mode]
    if s.pair_source == "ideal":
        parts.append("ideal")
    return " ".join(parts)


def serialize(c: CircuitSpec) -> str:
    lines = ["# hyperentanglement circuit (.hqc)"]
    if c.name:
        lines.append(f"#@ name {c.name}")
    if c.description:
        lines.append(f"#@ description {c.description}")
    lines += [f"photon {p}" for p in c.photons]
    lines += [f"nv {n} init {s}" for n, s in c.nvs]
    lines += [_step_line(s) for s in c.steps]
    return "\n".join(lines) + "\n"


# -- executor ---------------------------------------------------------------


def default_initial(c: CircuitSpec, photon_states: Mapping[str, str] | None = None) -> StateVector:
    """Photons in the given polarization (default (R+L)/sqrt2) on path k1; NVs per declaration."""
    photon_states = dict(photon_states or {})
    unknown = set(photon_states) - set(c.photons) - set(c.nv_names)
    if unknown:
        raise LayoutError(f"initial state given for undeclared entities {sorted(unknown)}")
    vectors = []
    for p in c.photons:
        label = photon_states.get(p, DEFAULT_PHOTON_STATE)
        if label not in PHOTON_STATES:
            raise LayoutError(f"unknown photon state {label!r} for {p}")
        vectors += [PHOTON_STATES[label], np.array([1, 0], dtype=complex)]
    for n, init in c.nvs:
        label = photon_states.get(n, init)
        if label not in SPIN_STATES:
            raise LayoutError(f"unknown spin state {label!r} for {n}")
        vectors.append(SPIN_STATES[label])
    return product_state(c.layout(), vectors)


def step_operator(step: Step, pair: ReflectionPair):
    """The LocalOperator a step applies (None for the switch)."""
    k = step.kind
    if k is ElementKind.PBS:
        return optics.pbs()
    if k is ElementKind.BS:
        return optics.bs(step.mode or "k1")
    if k is ElementKind.HWP:
        return optics.hwp(step.mode)
    if k is ElementKind.QWP:
        return optics.qwp()
    if k is ElementKind.NV_INTERACT:
        return optics.nv_interact(step.mode, IDEAL if step.pair_source == "ideal" else pair)
    if k is ElementKind.SPIN_HADAMARD:
        return optics.spin_hadamard()
    return None


def step_sites(step: Step, state: StateVector):
    if step.kind is ElementKind.NV_INTERACT:
        nv, photon = step.targets
        return [state.site(photon, Role.POLARIZATION), state.site(photon, Role.PATH), state.site(nv, Role.SPIN)]
    roles = optics.SIGNATURES[step.kind]
    return [state.site(step.targets[0], role) for role in roles]


def execute(
    c: CircuitSpec,
    pair: ReflectionPair = IDEAL,
    initial: StateVector | Mapping[str, str] | None = None,
) -> StateVector:
    """Apply every step in order; returns the (possibly unnormalized) output state."""
    if isinstance(initial, StateVector):
        if initial.layout != c.layout():
            raise LayoutError("initial state layout does not match the circuit declarations")
        state = initial
    else:
        state = default_initial(c, initial)
    cache: dict[tuple, object] = {}
    for step in c.steps:
        key = (step.kind, step.mode, step.pair_source)
        if key not in cache:
            cache[key] = step_operator(step, pair)
        op = cache[key]
        if op is None:
            continue
        state = apply(state, step_sites(step, state), op)
    if state.norm2() == 0:
        raise TotalLossError(f"circuit {c.name or '<unnamed>'} lost all amplitude")
    return state
