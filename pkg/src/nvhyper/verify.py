"""Batch reproduction of the reference outcome tables in ideal mode."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import protocols, tables


@dataclass
class TableCheck:
    name: str
    rows: int
    mismatches: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _label(x) -> str:
    return x.ascii if x is not None else "none"


def _generation_check(name, circuit, reference, probability, corrections) -> TableCheck:
    check = TableCheck(name, len(reference))
    records = protocols.tabulate(circuit)
    got = {rec.nv_outcomes: rec for rec in records}
    for outcomes, expected in reference.items():
        rec = got.get(outcomes)
        sig = ",".join(outcomes)
        if rec is None:
            check.mismatches.append(f"({sig}): expected {expected}, outcome never occurs")
        elif _label(rec.classified) != expected:
            check.mismatches.append(f"({sig}): expected {expected}, got {_label(rec.classified)}")
        elif abs(rec.probability - probability) > 1e-12:
            check.mismatches.append(f"({sig}): probability {rec.probability:.12g}, expected {probability:.12g}")
    extra = set(got) - set(reference)
    for outcomes in sorted(extra):
        check.mismatches.append(f"({','.join(outcomes)}): unexpected outcome")
    for outcomes, (listed, used) in corrections.items():
        check.notes.append(f"({','.join(outcomes)}): listed {listed}, reproduced {used}")
    return check


def check_table1() -> TableCheck:
    return _generation_check("Table 1", protocols.build_hbsg2(), tables.TABLE1, 1 / 4, {})


def check_table2() -> TableCheck:
    return _generation_check(
        "Table 2", protocols.build_hbsg3(), tables.TABLE2, 1 / 8, tables.TABLE2_CORRECTIONS
    )


def _single_outcome(circuit, label):
    records = protocols.tabulate(circuit, [label])
    return records[0] if len(records) == 1 else None


def check_table3() -> TableCheck:
    check = TableCheck("Table 3", len(tables.TABLE3) + len(tables.STAGE2_CHECKS))
    stage1, stage2 = protocols.build_hbsa(1), protocols.build_hbsa(2)
    for inp, (state, nv1, nv2) in tables.TABLE3.items():
        rec = _single_outcome(stage1, inp)
        got = None if rec is None else (_label(rec.classified), *rec.nv_outcomes)
        if got != (state, nv1, nv2):
            check.mismatches.append(f"{inp}: expected {(state, nv1, nv2)}, got {got}")
    for inp, state in tables.STAGE2_CHECKS.items():
        rec = _single_outcome(stage2, inp)
        got = None if rec is None else _label(rec.classified)
        if got != state:
            check.mismatches.append(f"{inp} after BS+QWP: expected {state}, got {got}")
    return check


def check_tables45() -> tuple[TableCheck, TableCheck]:
    t4 = TableCheck("Table 4", len(tables.TABLE4))
    t5 = TableCheck("Table 5", len(tables.TABLE5))
    circuit = protocols.build_hbsa()
    signatures = {}
    for inp in tables.TABLE5:
        rec = _single_outcome(circuit, inp)
        if rec is None:
            t4.mismatches.append(f"{inp}: output is not a single NV signature")
            t5.mismatches.append(f"{inp}: output is not a single NV signature")
            continue
        if _label(rec.classified) != tables.TABLE4[inp]:
            t4.mismatches.append(f"{inp}: expected {tables.TABLE4[inp]}, got {_label(rec.classified)}")
        if rec.nv_outcomes != tables.TABLE5[inp]:
            t5.mismatches.append(f"{inp}: expected {','.join(tables.TABLE5[inp])}, got {','.join(rec.nv_outcomes)}")
        signatures.setdefault(rec.nv_outcomes, []).append(inp)
        if rec.classified is not None:
            ops = protocols.restoration(rec.classified, inp)
            restored = protocols.apply_restoration(rec.photon_state, ops)
            if protocols.classify(restored, 1e-12) != protocols.parse_label(inp):
                t4.mismatches.append(f"{inp}: restoration failed")
    for sig, inputs in signatures.items():
        if len(inputs) > 1:
            t5.mismatches.append(f"signature {','.join(sig)} shared by {', '.join(inputs)}")
    for inp, (listed, used) in tables.TABLE4_CORRECTIONS.items():
        t4.notes.append(f"{inp}: listed {listed}, reproduced {used}")
    return t4, t5


def verify_all() -> list[TableCheck]:
    return [check_table1(), check_table2(), check_table3(), *check_tables45()]
