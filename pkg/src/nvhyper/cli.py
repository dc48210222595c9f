"""Command-line interface: ``nvhyper {coeffs,run,verify-tables,sweep,analyze}``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from importlib import resources
from pathlib import Path

from . import analysis, protocols
from .cavity import IDEAL, resonant_pair
from .circuit import CircuitError, TotalLossError, parse
from .verify import verify_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _nonneg(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"must be a finite non-negative number, got {text}")
    return v


def _positive(text: str) -> float:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _ks_list(text: str) -> list[float]:
    return [_nonneg(part) for part in text.split(",") if part.strip()]


def _g(x) -> str:
    return f"{x:.12g}"


def bundled_circuit(name: str) -> Path | None:
    ref = resources.files("nvhyper") / "data" / name
    return Path(str(ref)) if ref.is_file() else None


def _read_circuit(path_text: str):
    path = Path(path_text)
    if not path.exists():
        alt = bundled_circuit(path.name if path.suffix else path.name + ".hqc")
        if alt is None:
            raise FileNotFoundError(path_text)
        path = alt
    return parse(path.read_text(encoding="utf-8"), str(path_text))


# -- subcommands ------------------------------------------------------------


def cmd_coeffs(args) -> int:
    pair = resonant_pair(args.g_norm, args.ks_ratio)
    r, r0 = pair.real()
    print(f"r={_g(r)}")
    print(f"r0={_g(r0)}")
    return EXIT_OK


def _format_records(records, lossy: bool, fmt: str, n_nv: int) -> str:
    nv_cols = [f"nv{i + 1}" for i in range(n_nv)]
    header = ["input_label", *nv_cols, "probability", "classified_label", "branch_fidelity"]
    if lossy:
        header.append("efficiency")
    rows = []
    for rec in records:
        row = [rec.input_label or "default", *rec.nv_outcomes, _g(rec.probability)]
        row += [rec.classified.ascii if rec.classified else "none", _g(rec.branch_fidelity)]
        if lossy:
            row.append(_g(rec.efficiency))
        rows.append(row)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def cmd_run(args) -> int:
    try:
        circuit = _read_circuit(args.circuit)
    except CircuitError as exc:
        print(exc.diagnostic(), file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"{args.circuit}: cannot read circuit: {exc}", file=sys.stderr)
        return EXIT_FAIL
    lossy = args.mode == "lossy"
    pair = resonant_pair(args.g_norm, args.ks_ratio) if lossy else IDEAL
    inputs = None
    if args.input:
        if args.input == "all":
            labels = protocols.ALL_BELL_LABELS if len(circuit.photons) == 2 else protocols.ALL_GHZ_LABELS
            inputs = list(labels)
        else:
            try:
                inputs = [protocols.parse_label(args.input)]
            except ValueError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_USAGE
    try:
        records = protocols.tabulate(circuit, inputs, pair)
    except (TotalLossError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(_format_records(records, lossy, args.format, len(circuit.nvs)))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify_all()
    for check in checks:
        status = "PASS" if check.ok else "FAIL"
        print(f"{check.name}: {status} ({check.rows} rows)")
        for note in check.notes:
            print(f"  corrected entry {note}")
        if not check.ok:
            print(f"  first mismatch: {check.mismatches[0]}")
    passed = sum(c.ok for c in checks)
    print(f"{passed}/{len(checks)} tables reproduced")
    return EXIT_OK if passed == len(checks) else EXIT_FAIL


def cmd_sweep(args) -> int:
    try:
        grid = analysis.default_g_grid(args.g_min, args.g_max, args.g_step)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = analysis.sweep(grid, args.ks_list, workers=args.workers)
    try:
        Path(args.out).write_bytes(analysis.emit(rows, "csv"))
        if args.plot:
            Path(args.plot).write_bytes(analysis.emit(rows, "svg"))
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"{len(rows)} rows written to {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    pair = resonant_pair(args.g_norm, args.ks_ratio)
    r, r0 = pair.real()
    sim = analysis.simulate_hbsg_metrics(pair)
    closed = (*analysis.hbsg_fidelities(r, r0), analysis.hbsg_efficiency(r, r0))
    sim_f, sim_eta = analysis.simulate_hbsa_metrics(pair, args.input)
    hbsa_circuit = protocols.build_hbsa()
    hbsa_in = protocols.with_spins(hbsa_circuit, protocols.bell_state(args.input))
    rows = [
        ("r", r, None, None),
        ("r0", r0, None, None),
    ]
    for name, c, s in zip(("F1", "F2", "F3", "F4", "eta1"), closed, sim.as_tuple()):
        rows.append((name, c, s, None))
    rows[-1] = ("eta1", closed[4], sim.eta1, analysis.independent_pass_efficiency(protocols.build_hbsg2(), pair))
    rows.append(("F_hbsa", analysis.hbsa_fidelity(r, r0), sim_f, None))
    rows.append(
        (
            "eta_hbsa",
            analysis.hbsa_efficiency(r, r0),
            sim_eta,
            analysis.independent_pass_efficiency(hbsa_circuit, pair, hbsa_in),
        )
    )
    print(f"g_norm={_g(args.g_norm)} ks_ratio={_g(args.ks_ratio)} input={args.input}")
    print(f"{'metric':<9} {'closed_form':>16} {'simulated':>16} {'independent':>16}")
    for name, c, s, ind in rows:
        cells = [_g(v) if v is not None else "-" for v in (c, s, ind)]
        print(f"{name:<9} {cells[0]:>16} {cells[1]:>16} {cells[2]:>16}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nvhyper", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="resonant reflection amplitudes r, r0")
    c.add_argument("--g-norm", type=_nonneg, required=True, help="g / sqrt(kappa gamma)")
    c.add_argument("--ks-ratio", type=_nonneg, required=True, help="kappa_s / kappa")
    c.set_defaults(func=cmd_coeffs)

    r = sub.add_parser("run", help="execute a .hqc circuit and print the NV-outcome table")
    r.add_argument("circuit", help="path to a .hqc file, or the name of a bundled circuit (hbsg2, hbsg3, hbsa)")
    r.add_argument("--mode", choices=("ideal", "lossy"), default="ideal")
    r.add_argument("--g-norm", type=_nonneg, default=1.5)
    r.add_argument("--ks-ratio", type=_nonneg, default=0.03)
    r.add_argument("--input", help="dictionary label such as phi1+_phi1+, or 'all'")
    r.add_argument("--format", choices=("text", "csv"), default="text")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify-tables", help="reproduce the five reference tables")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="closed-form vs simulated metrics over a grid")
    s.add_argument("--g-min", type=_nonneg, default=0.5)
    s.add_argument("--g-max", type=_nonneg, default=5.0)
    s.add_argument("--g-step", type=_positive, default=0.05)
    s.add_argument("--ks-list", type=_ks_list, default=list(analysis.DEFAULT_KS), help="comma-separated kappa_s/kappa values")
    s.add_argument("--out", default="sweep.csv")
    s.add_argument("--plot", help="optional SVG output path")
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("analyze", help="all metrics at one parameter point")
    a.add_argument("--g-norm", type=_nonneg, required=True)
    a.add_argument("--ks-ratio", type=_nonneg, required=True)
    a.add_argument("--input", default="phi1+_phi1+", help="analyzer input label")
    a.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
