import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvhyper import analysis, protocols
from nvhyper.analysis import (
    COLUMNS,
    emit,
    hbsa_efficiency,
    hbsa_fidelity,
    hbsg_efficiency,
    hbsg_fidelities,
    independent_pass_efficiency,
    read_csv,
    simulate_hbsa_metrics,
    simulate_hbsg_metrics,
    sweep,
)
from nvhyper.cavity import IDEAL, ReflectionPair, resonant_pair

P1 = resonant_pair(1.5, 0.03)
P2 = resonant_pair(1.5, 0.06)
P3 = resonant_pair(3.0, 0.06)


@pytest.fixture(scope="module")
def default_rows():
    return sweep()


def test_hbsg_closed_form_examples():
    assert hbsg_fidelities(1, -1) == pytest.approx((1, 1, 1, 1))
    assert hbsg_fidelities(0.80060, -0.94175) == pytest.approx((0.9668, 0.9469, 0.9870, 0.9743), abs=5e-5)
    f = hbsg_fidelities(0.3, 0.3)
    assert (f[0], f[2], f[3]) == (0, 0, 0)
    with pytest.raises(ZeroDivisionError):
        hbsg_fidelities(0, 0)


def test_hbsg_efficiency_examples():
    assert hbsg_efficiency(1, -1) == 1
    assert hbsg_efficiency(0.801193, -0.886792) == pytest.approx(0.5396, abs=5e-5)
    assert hbsg_efficiency(0, 0) == 1 / 16


def test_hbsa_closed_form_examples():
    assert hbsa_fidelity(1, -1) == pytest.approx(1)
    assert hbsa_fidelity(0.946033, -0.886792) == pytest.approx(0.9958, abs=5e-5)
    assert hbsa_fidelity(0.4, 0.4) == 0
    assert hbsa_efficiency(1, -1) == 1
    assert hbsa_efficiency(0.946033, -0.886792) == pytest.approx(0.5148, abs=5e-5)


def test_hbsa_denominator_with_ideal_values():
    # alpha vanishes because r^2 = r0^2; beta = 4 * (4 + 4) = 32... checked via eps^8 = 256
    assert (1 - -1) ** 8 == 256
    assert hbsa_fidelity(-1, 1) == pytest.approx(1)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_closed_forms_bounded(r, r0):
    if abs(r) + abs(r0) < 1e-3:
        return
    for v in (*hbsg_fidelities(r, r0), hbsg_efficiency(r, r0), hbsa_efficiency(r, r0)):
        assert -1e-12 <= v <= 1 + 1e-12
    assert hbsa_efficiency(r, r0) == pytest.approx(hbsg_efficiency(r, r0) ** 2, rel=1e-12)


def test_simulated_hbsg_fidelities():
    sim = simulate_hbsg_metrics(P1)
    assert (sim.F1, sim.F2, sim.F3, sim.F4) == pytest.approx(hbsg_fidelities(*P1.real()), abs=1e-9)
    ideal = simulate_hbsg_metrics(IDEAL)
    assert ideal.as_tuple() == pytest.approx((1, 1, 1, 1, 1), abs=1e-12)


def test_herald_classes_partition():
    classes = analysis.herald_classes()
    assert sorted(fam for fam, _ in classes.values()) == ["F1", "F2", "F3", "F4"]
    total = sum(mask.astype(int) for _, mask in classes.values())
    assert np.all(total == 1)


def test_family_members_share_fidelity():
    # the four families are tied to one herald each; the measured per-branch
    # fidelities are a different (post-selected) quantity and are reported alongside
    sim = simulate_hbsg_metrics(P1)
    assert set(sim.branch_fidelities) == set(analysis.herald_classes())
    assert all(0.9 < v < 1 for v in sim.branch_fidelities.values())


def test_simulated_hbsg_efficiency():
    assert simulate_hbsg_metrics(P2).eta1 == pytest.approx(0.53961, abs=1e-5)


def test_simulated_hbsa_example():
    f, eta = simulate_hbsa_metrics(P3, "phi1+_phi1+")
    assert f == pytest.approx(0.9958, abs=1e-4)
    assert eta == pytest.approx(0.5148, abs=1e-4)


def test_simulated_hbsa_fidelity_ideal_any_input():
    for lab in protocols.ALL_BELL_LABELS:
        assert simulate_hbsa_metrics(IDEAL, lab) == pytest.approx((1, 1), abs=1e-12)


@pytest.mark.parametrize("pair", [P1, P2, P3, resonant_pair(0.6, 0.0)], ids=["1.5/.03", "1.5/.06", "3/.06", "0.6/0"])
def test_independent_pass_product_matches_closed_forms(pair):
    r, r0 = pair.real()
    assert independent_pass_efficiency(protocols.build_hbsg2(), pair) == pytest.approx(hbsg_efficiency(r, r0), abs=1e-12)
    c = protocols.build_hbsa()
    initial = protocols.with_spins(c, protocols.bell_state("phi1+_phi1+"))
    assert independent_pass_efficiency(c, pair, initial) == pytest.approx(hbsa_efficiency(r, r0), abs=1e-12)


def test_shared_spin_correlates_losses():
    # one photon pair on one spin: the exact survival exceeds the independent product
    # unless |r| = |r0|
    r, r0 = P1.real()
    a = r * r + r0 * r0
    exact = (4 + 4 * a + 2 * (r**4 + r0**4)) / 16
    assert exact > ((2 + a) / 4) ** 2
    c = protocols.build_hbsg2()
    first_stage = analysis.CircuitSpec(c.photons, c.nvs, c.steps[:5])
    assert analysis.execute(first_stage, P1).norm2() == pytest.approx(exact, abs=1e-14)
    equal = ReflectionPair(0.7, -0.7)
    assert analysis.execute(c, equal).norm2() == pytest.approx(hbsg_efficiency(0.7, -0.7), abs=1e-14)


def test_sweep_single_point():
    (row,) = sweep([1.5], [0.03])
    assert (row.F1, row.F2, row.F3, row.F4) == pytest.approx((0.9668, 0.9469, 0.9870, 0.9743), abs=5e-5)
    (row,) = sweep([3.0], [0.06])
    assert row.eta1 == pytest.approx(0.7175, abs=5e-5)


def test_sweep_order_independent_of_input_order():
    a = sweep([2.0, 1.0, 0.5], [0.06, 0.0])
    b = sweep([0.5, 1.0, 2.0], [0.0, 0.06])
    assert a == b
    assert [r.key for r in a] == sorted(r.key for r in a)


def test_sweep_parallel_matches_serial():
    grid = [0.5, 1.25, 2.0, 4.5]
    assert sweep(grid, [0.0, 0.03], workers=2) == sweep(grid, [0.0, 0.03])


def test_sweep_rejects_bad_grids():
    with pytest.raises(ValueError):
        sweep([], [0.0])
    with pytest.raises(ValueError):
        sweep([-1.0], [0.0])


def test_default_grid(default_rows):
    assert len(default_rows) == 273
    assert analysis.default_g_grid()[:3] == [0.5, 0.55, 0.6]
    assert analysis.default_g_grid()[-1] == 5.0


def test_default_grid_fidelities_match_closed_forms(default_rows):
    dev = analysis.max_deviation(default_rows)
    for name in ("F1", "F2", "F3", "F4", "F_hbsa"):
        assert dev[name] < 1e-9, name


def test_default_grid_efficiencies_match_closed_forms(default_rows):
    dev = analysis.max_deviation(default_rows)
    assert dev["eta1"] < 1e-9 and dev["eta_hbsa"] < 1e-9


def test_default_grid_bounds_and_identity(default_rows):
    for row in default_rows:
        for name in COLUMNS[4:]:
            assert 0 <= getattr(row, name) <= 1 + 1e-12
        assert abs(row.eta_hbsa - row.eta1**2) < 1e-12


def test_eta1_monotone(default_rows):
    for ks in analysis.DEFAULT_KS:
        eta = [r.eta1 for r in default_rows if r.ks_ratio == ks]
        assert all(b >= a for a, b in zip(eta, eta[1:]))


def test_large_coupling_limit_fidelities():
    (row,) = sweep([100.0], [0.0])
    for name in ("F1", "F2", "F3", "F4", "F_hbsa", "sim_F1", "sim_F2", "sim_F3", "sim_F4", "sim_F_hbsa"):
        assert getattr(row, name) == pytest.approx(1, abs=1e-6)


def test_large_coupling_limit_efficiencies():
    (row,) = sweep([100.0], [0.0])
    for name in ("eta1", "eta_hbsa", "sim_eta1", "sim_eta_hbsa"):
        assert getattr(row, name) == pytest.approx(1, abs=1e-6), name


def test_efficiency_gap_to_one_scales_as_inverse_square_coupling():
    # 1 - r ~ 1/(2 x^2) with kappa_s = 0, hence 1 - eta1 ~ 1/x^2
    for x in (100.0, 1000.0):
        r, r0 = resonant_pair(x, 0.0).real()
        assert 1 - hbsg_efficiency(r, r0) == pytest.approx(1 / x**2, rel=1e-3)


def test_csv_emit():
    rows = sweep([1.5], [0.03])
    data = emit(rows, "csv")
    lines = data.decode().splitlines()
    assert len(lines) == 2 and lines[0] == ",".join(COLUMNS)
    assert emit(rows, "csv") == data


def test_csv_round_trip(default_rows):
    back = read_csv(emit(default_rows, "csv"))
    assert len(back) == len(default_rows)
    for a, b in zip(default_rows, back):
        for name in COLUMNS:
            x, y = getattr(a, name), getattr(b, name)
            assert y == float(f"{x:.12g}")
            assert math.isclose(x, y, rel_tol=1e-11, abs_tol=1e-300)


def test_svg_emit(default_rows):
    svg = emit(default_rows, "svg")
    assert svg == emit(default_rows, "svg")
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert b"href" not in svg and b"<image" not in svg
    assert svg.count(b"<polyline") == 4 + 3 * 3
    with pytest.raises(ValueError):
        emit([], "svg")
    with pytest.raises(ValueError):
        emit(default_rows, "png")
