import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvhyper.hilbert import (
    PHI_MINUS,
    PHI_PLUS,
    LayoutError,
    LocalOperator,
    Role,
    StateVector,
    apply,
    basis_state,
    contract,
    fidelity,
    inner,
    make_layout,
    measure,
    product_state,
)
from nvhyper.optics import H, X


def random_state(rng, layout):
    v = rng.normal(size=2 ** len(layout)) + 1j * rng.normal(size=2 ** len(layout))
    return StateVector(layout, v / np.linalg.norm(v))


def random_unitary(rng, dim):
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q * (np.diag(r) / abs(np.diag(r)))


def test_layout_order():
    layout = make_layout(("a", "b"), ("NV1", "NV2"))
    assert [str(s) for s in layout] == ["a.pol", "a.path", "b.pol", "b.path", "NV1.spin", "NV2.spin"]
    assert [s.index for s in layout] == list(range(6))


def test_basis_state_conventions():
    pol = make_layout(("a",))[:1]
    assert np.array_equal(basis_state(pol, ["R"]).amplitudes, [1, 0])
    lay = make_layout(("a",), ("N",))
    lay = make_layout(("a",), ("N",))
    v = basis_state(lay, ["L", "k1", "-"]).amplitudes
    assert v[0b101] == 1 and np.count_nonzero(v) == 1
    v = basis_state(lay[:2], ["R", "k2"]).amplitudes
    assert v[0b01] == 1 and np.count_nonzero(v) == 1


def test_basis_state_rejects_role_mismatch():
    lay = make_layout(("a",), ("N",))
    with pytest.raises(LayoutError, match="a.path"):
        basis_state(lay, ["R", "+", "-"])


def test_apply_identity_is_exact(rng):
    lay = make_layout(("a",), ("N",))
    s = random_state(rng, lay)
    out = apply(s, [lay[1]], LocalOperator(np.eye(2)))
    assert np.array_equal(out.amplitudes, s.amplitudes)


def test_apply_x_and_scatter():
    lay = make_layout(("a",), ("N",))
    s = basis_state(lay, ["R", "k1", "+"])
    assert np.allclose(apply(s, [lay[0]], LocalOperator(X)).amplitudes, basis_state(lay, ["L", "k1", "+"]).amplitudes)
    scat = LocalOperator(np.diag([1, -1, -1, 1]))
    s = basis_state(lay, ["R", "k1", "-"])
    assert np.allclose(apply(s, [lay[0], lay[2]], scat).amplitudes, -s.amplitudes)


def test_apply_errors(rng):
    lay = make_layout(("a",), ("N",))
    s = random_state(rng, lay)
    other = make_layout(("z",))
    with pytest.raises(LayoutError):
        apply(s, [other[0]], LocalOperator(X))
    with pytest.raises(ValueError):
        apply(s, [lay[0], lay[1]], LocalOperator(X))
    with pytest.raises(LayoutError):
        apply(s, [lay[0], lay[0]], LocalOperator(np.eye(4)))


def test_apply_leaves_input_untouched(rng):
    lay = make_layout(("a",))
    s = random_state(rng, lay)
    before = s.amplitudes.copy()
    apply(s, [lay[0]], LocalOperator(X))
    assert np.array_equal(s.amplitudes, before)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_inner_examples():
    lay = make_layout(("a",))[:1]
    R, L = basis_state(lay, ["R"]), basis_state(lay, ["L"])
    assert inner(R, L) == 0
    assert inner(R, R) == 1
    D = StateVector(lay, [1 / np.sqrt(2), 1 / np.sqrt(2)])
    assert inner(D, R) == pytest.approx(1 / np.sqrt(2))


def test_inner_is_conjugate_linear_in_first_argument(rng):
    lay = make_layout(("a",))
    a, b = random_state(rng, lay), random_state(rng, lay)
    assert inner(a.scaled(2j), b) == pytest.approx(-2j * inner(a, b))


def test_fidelity_examples(rng):
    lay = make_layout(("a",))
    s = random_state(rng, lay)
    assert fidelity(s, s) == pytest.approx(1, abs=1e-12)
    R, L = basis_state(lay, ["R", "k1"]), basis_state(lay, ["L", "k1"])
    assert fidelity(R, L) == 0
    assert fidelity(s, s.scaled(3 * np.exp(0.4j))) == pytest.approx(1, abs=1e-12)
    with pytest.raises(ZeroDivisionError):
        fidelity(s, s.scaled(0))


def test_measure_examples():
    lay = make_layout((), ("N",))
    branches = measure(StateVector(lay, PHI_PLUS), lay[0], "hadamard")
    probs = {b.outcome: b.probability for b in branches}
    assert probs["phi+"] == pytest.approx(1) and probs["phi-"] == pytest.approx(0, abs=1e-15)
    branches = measure(basis_state(lay, ["-"]), lay[0], "hadamard")
    assert [b.probability for b in branches] == pytest.approx([0.5, 0.5])
    with pytest.raises(LayoutError):
        measure(basis_state(make_layout(("a",)), ["R", "k1"]), make_layout(("a",))[0])


def test_measure_recombines(rng):
    lay = make_layout(("a",), ("N",))
    s = random_state(rng, lay).scaled(0.7)
    for basis in ("hadamard", "plus_minus"):
        branches = measure(s, lay[2], basis)
        assert sum(b.probability for b in branches) == pytest.approx(1, abs=1e-12)
        total = sum(np.sqrt(b.probability * s.norm2()) * b.state.amplitudes for b in branches)
        assert np.allclose(total, s.amplitudes, atol=1e-12)
        for b in branches:
            assert b.state.norm2() == pytest.approx(1, abs=1e-12)


def test_contract_matches_measure(rng):
    lay = make_layout(("a",), ("N",))
    s = random_state(rng, lay)
    reduced = contract(s, lay[2], PHI_MINUS)
    assert [x.role for x in reduced.layout] == [Role.POLARIZATION, Role.PATH]
    p = {b.outcome: b.probability for b in measure(s, lay[2])}["phi-"]
    assert reduced.norm2() == pytest.approx(p)


def test_product_state():
    lay = make_layout(("a",))
    s = product_state(lay, [np.array([0, 1]), np.array([1, 0])])
    assert np.array_equal(s.amplitudes, basis_state(lay, ["L", "k1"]).amplitudes)


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_unitaries_preserve_norm(seed):
    rng = np.random.default_rng(seed)
    lay = make_layout(("a", "b"), ("N",))
    s = random_state(rng, lay).scaled(rng.uniform(0.1, 1))
    targets = [lay[i] for i in rng.choice(len(lay), size=2, replace=False)]
    op = LocalOperator(random_unitary(rng, 4))
    assert op.is_unitary()
    assert abs(apply(s, targets, op).norm2() - s.norm2()) < 1e-12


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_apply_is_linear(seed):
    rng = np.random.default_rng(seed)
    lay = make_layout(("a",), ("N",))
    s1, s2 = random_state(rng, lay), random_state(rng, lay)
    alpha, beta = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    op = LocalOperator(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    targets = [lay[2], lay[0]]
    lhs = apply(s1.scaled(alpha) + s2.scaled(beta), targets, op)
    rhs = apply(s1, targets, op).scaled(alpha) + apply(s2, targets, op).scaled(beta)
    assert np.allclose(lhs.amplitudes, rhs.amplitudes, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_disjoint_operators_commute(seed):
    rng = np.random.default_rng(seed)
    lay = make_layout(("a", "b"), ("N",))
    s = random_state(rng, lay)
    A, B = LocalOperator(random_unitary(rng, 4)), LocalOperator(random_unitary(rng, 2))
    SA, SB = [lay[0], lay[3]], [lay[4]]
    ab = apply(apply(s, SA, A), SB, B)
    ba = apply(apply(s, SB, B), SA, A)
    assert np.allclose(ab.amplitudes, ba.amplitudes, atol=1e-12)


def test_hadamard_basis_projection_agrees_with_rotation():
    lay = make_layout((), ("N",))
    for vec in (PHI_PLUS, PHI_MINUS):
        rotated = apply(StateVector(lay, vec), [lay[0]], LocalOperator(H))
        assert max(abs(rotated.amplitudes)) == pytest.approx(1)
