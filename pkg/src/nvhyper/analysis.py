"""Closed-form fidelities/efficiencies, simulation cross-checks, sweeps and output files."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .cavity import IDEAL, ReflectionPair, resonant_pair
from .circuit import CircuitSpec, execute
from .hilbert import Role, StateVector
from .optics import ElementKind
from . import protocols

FAMILIES = ("F1", "F2", "F3", "F4")
_FAMILY_OF = {("phi1", "phi1"): "F1", ("phi1", "phi2"): "F2", ("phi2", "phi1"): "F3", ("phi2", "phi2"): "F4"}


class SingularPointError(ZeroDivisionError):
    pass


# -- closed forms -----------------------------------------------------------


def hbsg_fidelities(r: float, r0: float) -> tuple[float, float, float, float]:
    a = r * r + r0 * r0
    q = r**4 + r0**4 + 2
    if a == 0:
        raise SingularPointError("r = r0 = 0")
    d = r - r0
    f1 = d * d * (a + 2) ** 2 / (8 * a * q)
    f2 = (a + 2) ** 4 / (16 * q * q)
    f3 = d**4 / (4 * a * a)
    f4 = (1 - r * r0) ** 2 * d * d / (4 * (1 + r * r * r0 * r0) * a)
    return f1, f2, f3, f4


def hbsg_efficiency(r: float, r0: float) -> float:
    return (r * r + r0 * r0 + 2) ** 4 / 2**8


def hbsa_fidelity(r: float, r0: float) -> float:
    a = r * r + r0 * r0
    eps = r - r0
    alpha = (r * r - r0 * r0) ** 2 * (eps * eps * (r * r + 1) * (r0 * r0 + 1) + 4 * r * r0 * a)
    beta = a * a * (a * a + 4 * r * r * r0 * r0)
    den = 4 * (alpha + 2 * beta)
    if den == 0:
        raise SingularPointError("alpha + 2 beta = 0")
    return eps**8 / den


def hbsa_efficiency(r: float, r0: float) -> float:
    return (r * r + r0 * r0 + 2) ** 8 / 2**16


# -- simulation -------------------------------------------------------------


@lru_cache(maxsize=None)
def _hbsg_circuit() -> CircuitSpec:
    return protocols.build_hbsg2()


@lru_cache(maxsize=None)
def _hbsa_circuit() -> CircuitSpec:
    return protocols.build_hbsa()


def _photon_configs(state: StateVector) -> np.ndarray:
    """Amplitudes reshaped to (photonic configuration, spin configuration)."""
    n_spin = sum(1 for s in state.layout if s.role is Role.SPIN)
    return state.amplitudes.reshape(-1, 2**n_spin)


@lru_cache(maxsize=None)
def herald_classes() -> dict[tuple[str, ...], tuple[str, np.ndarray]]:
    """For each NV outcome of the generation circuit: (family, mask of photonic configurations).

    A configuration belongs to the outcome whose ideal branch state has support
    on it.  The masks are disjoint and together cover every configuration,
    which is checked here rather than assumed.
    """
    c = _hbsg_circuit()
    ideal = execute(c, IDEAL)
    classes = {}
    covered = np.zeros(2 ** (2 * len(c.photons)), dtype=int)
    for outcomes, branch in protocols.nv_branches(ideal, c.nv_names):
        if branch.norm2() < 1e-12:
            continue
        label = protocols.classify(branch.normalized())
        mask = np.abs(branch.amplitudes) > 1e-9
        covered += mask
        classes[outcomes] = (_FAMILY_OF[(label.pol[:4], label.spatial[:4])], mask)
    if not np.all(covered == 1):
        raise AssertionError("herald classes do not partition the photonic configurations")
    return classes


def _masked_fidelity(ideal: StateVector, lossy: StateVector, mask: np.ndarray) -> float:
    u = _photon_configs(ideal)[mask].reshape(-1)
    v = _photon_configs(lossy)[mask].reshape(-1)
    nv = np.vdot(v, v).real
    if nv == 0:
        return 0.0
    return float(abs(np.vdot(u, v)) ** 2 / (np.vdot(u, u).real * nv))


@dataclass(frozen=True)
class HbsgMetrics:
    F1: float
    F2: float
    F3: float
    F4: float
    eta1: float
    branch_fidelities: dict

    def as_tuple(self) -> tuple[float, ...]:
        return self.F1, self.F2, self.F3, self.F4, self.eta1


def simulate_hbsg_metrics(pair: ReflectionPair) -> HbsgMetrics:
    """Lossy run of the generation circuit compared with the ideal run.

    Each family fidelity is the overlap of the ideal and lossy joint states
    restricted to the photonic configurations heralded by that family's NV
    outcome (spins left unmeasured).  ``branch_fidelities`` additionally holds
    the measured per-outcome photon-state fidelities.
    """
    c = _hbsg_circuit()
    ideal = execute(c, IDEAL)
    lossy = execute(c, pair)
    values = {}
    for outcomes, (family, mask) in herald_classes().items():
        values[family] = _masked_fidelity(ideal, lossy, mask)
    measured = {}
    ideal_branches = dict(protocols.nv_branches(ideal, c.nv_names))
    for outcomes, branch in protocols.nv_branches(lossy, c.nv_names):
        if outcomes in herald_classes() and branch.norm2() > 0:
            ib = ideal_branches[outcomes]
            measured[outcomes] = abs(np.vdot(ib.amplitudes, branch.amplitudes)) ** 2 / (ib.norm2() * branch.norm2())
    return HbsgMetrics(values["F1"], values["F2"], values["F3"], values["F4"], lossy.norm2(), measured)


def simulate_hbsa_metrics(pair: ReflectionPair, input_label="phi1+_phi1+") -> tuple[float, float]:
    """(fidelity of the full lossy output with the ideal output, surviving norm)."""
    c = _hbsa_circuit()
    initial = protocols.with_spins(c, protocols.bell_state(input_label))
    ideal = execute(c, IDEAL, initial)
    lossy = execute(c, pair, initial)
    f = abs(np.vdot(ideal.amplitudes, lossy.amplitudes)) ** 2 / (ideal.norm2() * lossy.norm2())
    return float(f), lossy.norm2()


def independent_pass_efficiency(c: CircuitSpec, pair: ReflectionPair, initial=None) -> float:
    """Product of single-pass survival probabilities along the ideal trajectory.

    At every NV_INTERACT step the survival of that one pass is
    1 - sum p(pol, spin on the cavity arm) * (1 - |s(pol, spin)|^2), with p
    taken from the ideal state at that point.  Treating the passes as
    independent ignores that two photons meeting the same spin have
    correlated losses, so this differs from the exact execution norm unless
    |r| = |r0|.
    """
    from .circuit import default_initial, step_operator, step_sites
    from .hilbert import apply

    state = initial if isinstance(initial, StateVector) else default_initial(c, initial)
    state = state.normalized()
    r2, r02 = abs(pair.r) ** 2, abs(pair.r0) ** 2
    loss = np.array([[1 - r2, 1 - r02], [1 - r02, 1 - r2]])  # [pol, spin]
    eta = 1.0
    for step in c.steps:
        op = step_operator(step, IDEAL)
        if op is None:
            continue
        sites = step_sites(step, state)
        if step.kind is ElementKind.NV_INTERACT and step.pair_source == "from_params":
            arm = 0 if step.mode == "k1" else 1
            t = np.moveaxis(state.tensor(), [s.index for s in sites], [0, 1, 2])
            p = np.sum(np.abs(t[:, arm, :]) ** 2, axis=tuple(range(2, state.n_sites - 1)))
            eta *= 1 - float(np.sum(p * loss))
        state = apply(state, sites, op)
    return eta


# -- sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    g_norm: float
    ks_ratio: float
    r: float
    r0: float
    F1: float
    F2: float
    F3: float
    F4: float
    eta1: float
    F_hbsa: float
    eta_hbsa: float
    sim_F1: float
    sim_F2: float
    sim_F3: float
    sim_F4: float
    sim_eta1: float
    sim_F_hbsa: float
    sim_eta_hbsa: float

    @property
    def key(self) -> tuple[float, float]:
        return self.ks_ratio, self.g_norm


COLUMNS = tuple(f.name for f in fields(SweepRow))
METRIC_PAIRS = (
    ("F1", "sim_F1"),
    ("F2", "sim_F2"),
    ("F3", "sim_F3"),
    ("F4", "sim_F4"),
    ("eta1", "sim_eta1"),
    ("F_hbsa", "sim_F_hbsa"),
    ("eta_hbsa", "sim_eta_hbsa"),
)


def evaluate_point(g_norm: float, ks_ratio: float) -> SweepRow:
    pair = resonant_pair(g_norm, ks_ratio)
    r, r0 = pair.real()
    sim = simulate_hbsg_metrics(pair)
    sim_f, sim_eta = simulate_hbsa_metrics(pair)
    return SweepRow(
        g_norm,
        ks_ratio,
        r,
        r0,
        *hbsg_fidelities(r, r0),
        hbsg_efficiency(r, r0),
        hbsa_fidelity(r, r0),
        hbsa_efficiency(r, r0),
        *sim.as_tuple(),
        sim_f,
        sim_eta,
    )


def _evaluate_star(args):
    return evaluate_point(*args)


def default_g_grid(g_min: float = 0.5, g_max: float = 5.0, g_step: float = 0.05) -> list[float]:
    if g_step <= 0 or g_max < g_min:
        raise ValueError("need g_step > 0 and g_max >= g_min")
    n = int(math.floor((g_max - g_min) / g_step + 1e-9)) + 1
    return [round(g_min + i * g_step, 12) for i in range(n)]


DEFAULT_KS = (0.0, 0.03, 0.06)


def sweep(
    g_norm_grid: Sequence[float] | None = None,
    ks_ratio_list: Sequence[float] = DEFAULT_KS,
    workers: int | None = None,
) -> list[SweepRow]:
    """Evaluate every grid point; rows sorted by (ks_ratio, g_norm) whatever the evaluation order."""
    g_grid = default_g_grid() if g_norm_grid is None else list(g_norm_grid)
    if not g_grid or not ks_ratio_list:
        raise ValueError("grids must be non-empty")
    if any(g < 0 for g in g_grid) or any(k < 0 for k in ks_ratio_list):
        raise ValueError("grid values must be non-negative")
    points = [(float(g), float(k)) for k in ks_ratio_list for g in g_grid]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_star, points, chunksize=16))
    else:
        rows = [evaluate_point(*p) for p in points]
    return sorted(rows, key=lambda row: row.key)


# -- emission ---------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit(rows: Sequence[SweepRow], fmt: str = "csv") -> bytes:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([_fmt(v) for v in asdict(row).values()])
        return buf.getvalue().encode("utf-8")
    if fmt == "svg":
        from .plot import render_svg

        if not rows:
            raise ValueError("cannot plot an empty sweep")
        return render_svg(rows).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def read_csv(data: bytes | str) -> list[SweepRow]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != COLUMNS:
        raise ValueError("unexpected CSV header")
    return [SweepRow(**{k: float(v) for k, v in rec.items()}) for rec in reader]


def max_deviation(rows: Iterable[SweepRow]) -> dict[str, float]:
    """Largest |simulated - closed form| per metric."""
    out = {name: 0.0 for name, _ in METRIC_PAIRS}
    for row in rows:
        for name, sim in METRIC_PAIRS:
            out[name] = max(out[name], abs(getattr(row, sim) - getattr(row, name)))
    return out
