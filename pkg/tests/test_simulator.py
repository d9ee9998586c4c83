import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qautocorr.boolfn import make_function, walsh_spectrum
from qautocorr.simulator import (MAX_QUBITS, QubitBudgetError, RegisterLayout, StateVector,
                                 apply_cnot_registers, apply_controlled_swap, apply_global_phase,
                                 apply_hadamard_layer, apply_oracle, apply_phase_where, apply_ry, apply_x,
                                 dump_state, load_amplitudes, marginal, measure_register, probability_of,
                                 probability_where, project, swap_test)


def random_state(layout, seed):
    s = StateVector(layout)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=s.amps.size) + 1j * rng.normal(size=s.amps.size)
    s.amps[:] = v / np.linalg.norm(v)
    return s


def set_register_state(layout, register, vec, fixed=None):
    """Product state: ``vec`` on ``register``, basis values elsewhere."""
    s = StateVector(layout, fixed or {})
    base = s.amps.copy()
    idx0 = int(np.flatnonzero(base)[0])
    off = layout.offset(register)
    s.amps[:] = 0
    for v, amp in enumerate(vec):
        s.amps[idx0 | (v << off)] = amp
    return s


# -- layout -------------------------------------------------------------------

def test_layout_offsets_and_budget():
    lay = RegisterLayout.of([("A", 1), ("B", 3), ("C", 2)])
    assert lay.num_qubits == 6
    assert lay.offset("B") == 1 and lay.qubits("C") == [4, 5]
    with pytest.raises(ValueError):
        RegisterLayout.of([("A", 1), ("A", 2)])
    with pytest.raises(ValueError):
        RegisterLayout.of([("A", 0)])
    with pytest.raises(QubitBudgetError):
        RegisterLayout.of([("A", MAX_QUBITS + 1)])
    assert RegisterLayout.of([("A", 20), ("B", 20)], basis=["B"]).num_qubits == 20


def test_unknown_register():
    s = StateVector(RegisterLayout.of([("A", 2)]))
    with pytest.raises(KeyError):
        apply_hadamard_layer(s, "Z")


def test_initial_values_little_endian():
    lay = RegisterLayout.of([("A", 2), ("B", 3)])
    s = StateVector(lay, {"A": 1, "B": 5})
    assert np.flatnonzero(s.amps).tolist() == [1 | (5 << 2)]
    assert probability_of(s, "A", 1) == 1.0 and probability_of(s, "B", 5) == 1.0
    with pytest.raises(ValueError):
        StateVector(lay, {"A": 4})


# -- Hadamard -----------------------------------------------------------------

def test_hadamard_examples():
    lay = RegisterLayout.of([("A", 3)])
    s = apply_hadamard_layer(StateVector(lay), "A")
    assert np.allclose(s.amps, 2 ** -1.5, atol=1e-15)
    one = apply_hadamard_layer(StateVector(RegisterLayout.of([("Q", 1)]), {"Q": 1}), "Q")
    assert np.allclose(one.amps, [1 / math.sqrt(2), -1 / math.sqrt(2)])
    r = random_state(RegisterLayout.of([("A", 2), ("B", 3)]), 1)
    before = r.amps.copy()
    apply_hadamard_layer(apply_hadamard_layer(r, "B"), "B")
    assert np.max(np.abs(r.amps - before)) < 1e-12


def test_hadamard_counts_and_depth():
    s = StateVector(RegisterLayout.of([("A", 3), ("B", 2)]))
    apply_hadamard_layer(s, "A")
    apply_hadamard_layer(s, "B")
    assert s.counter.gates["h"] == 5 and s.counter.depth == 1


# -- CNOT ---------------------------------------------------------------------

@pytest.mark.parametrize("a", range(8))
def test_cnot_copies_basis(a):
    s = StateVector(RegisterLayout.of([("C", 3), ("T", 3)]), {"C": a})
    apply_cnot_registers(s, "C", "T")
    assert probability_of(s, "T", a) == 1.0
    apply_cnot_registers(s, "C", "T")
    assert probability_of(s, "T", 0) == 1.0
    assert s.counter.gates["cnot"] == 6 and s.counter.depth == 2


def test_cnot_on_superposition():
    lay = RegisterLayout.of([("C", 3), ("T", 3)])
    alpha = np.random.default_rng(2).normal(size=8)
    alpha /= np.linalg.norm(alpha)
    b = 5
    s = set_register_state(lay, "T", alpha, {"C": b})
    apply_cnot_registers(s, "C", "T")
    got = s.tensor()[:, b]
    assert np.allclose(got, alpha[np.arange(8) ^ b])


def test_cnot_with_basis_control_matches_quantum_control():
    q = RegisterLayout.of([("C", 3), ("T", 3)])
    bl = RegisterLayout.of([("C", 3), ("T", 3)], basis=["C"])
    for b in range(8):
        vec = np.random.default_rng(b).normal(size=8)
        vec /= np.linalg.norm(vec)
        s1 = set_register_state(q, "T", vec, {"C": b})
        s2 = StateVector(bl, {"C": b})
        s2.amps[:] = vec
        apply_cnot_registers(s1, "C", "T")
        apply_cnot_registers(s2, "C", "T")
        assert np.allclose(s1.tensor()[:, b], s2.amps)


def test_cnot_width_mismatch():
    s = StateVector(RegisterLayout.of([("C", 2), ("T", 3)]))
    with pytest.raises(ValueError):
        apply_cnot_registers(s, "C", "T")


# -- oracle -------------------------------------------------------------------

def test_phase_oracle_constant_zero_is_identity():
    s = apply_hadamard_layer(StateVector(RegisterLayout.of([("X", 3)])), "X")
    before = s.amps.copy()
    apply_oracle(s, make_function("constant", 3), "X")
    assert np.array_equal(s.amps, before)
    assert s.counter.u_f_calls == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(0, 10**6))
def test_bitflip_with_minus_target_equals_phase(n, seed):
    f = make_function("random", n, seed=seed)
    lay = RegisterLayout.of([("T", 1), ("X", n), ("Y", 1)])
    a = random_state(lay, seed)
    # put T into |->, keeping everything else random
    t = a.tensor()
    t[..., 0] = a.tensor()[..., 0] / np.sqrt(2)
    t[..., 1] = -t[..., 0]
    a.amps /= np.linalg.norm(a.amps)
    b = a.copy()
    apply_oracle(a, f, "X", "T")
    apply_oracle(b, f, "X")
    assert np.max(np.abs(a.amps - b.amps)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_bitflip_oracle_action_on_basis(n, seed):
    f = make_function("random", n, seed=seed)
    lay = RegisterLayout.of([("X", n), ("T", 1)])
    for x in range(1 << n):
        for b in (0, 1):
            s = StateVector(lay, {"X": x, "T": b})
            apply_oracle(s, f, "X", "T")
            assert probability_of(s, "T", b ^ f(x)) == 1.0


def test_oracle_deutsch_jozsa_on_and():
    f = make_function("and", 2)
    s = apply_hadamard_layer(StateVector(RegisterLayout.of([("X", 2)])), "X")
    apply_oracle(s, f, "X")
    apply_hadamard_layer(s, "X")
    assert np.max(np.abs(s.amps - walsh_spectrum(f).values)) < 1e-12


def test_oracle_width_mismatch():
    s = StateVector(RegisterLayout.of([("X", 3)]))
    with pytest.raises(ValueError):
        apply_oracle(s, make_function("constant", 2), "X")


def test_counter_counts_oracle_calls():
    f = make_function("random", 3, seed=1)
    s = StateVector(RegisterLayout.of([("X", 3), ("T", 1)]))
    for i in range(7):
        apply_oracle(s, f, "X", "T" if i % 2 else None)
    assert s.counter.u_f_calls == 7


# -- swap ---------------------------------------------------------------------

def two_registers(psi, phi):
    n = int(np.log2(len(psi)))
    lay = RegisterLayout.of([("S", 1), ("A", n), ("B", n)])
    s = StateVector(lay)
    joint = np.outer(phi, psi)  # axes (B, A)
    s.tensor()[:, :, 0] = joint
    return s


def test_swap_test_examples():
    e0, e1 = np.array([1, 0]), np.array([0, 1])
    s = swap_test(two_registers(e0, e0), "S", "A", "B")
    assert abs(probability_of(s, "S", 0) - 1) < 1e-12
    s = swap_test(two_registers(e0, e1), "S", "A", "B")
    assert abs(probability_of(s, "S", 0) - 0.5) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_swap_test_overlap(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    phi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    psi /= np.linalg.norm(psi)
    phi /= np.linalg.norm(phi)
    s = swap_test(two_registers(psi, phi), "S", "A", "B")
    assert abs(probability_of(s, "S", 0) - (1 + abs(np.vdot(psi, phi)) ** 2) / 2) < 1e-12
    # the displayed identity: |0>(psi phi + phi psi)/2 + |1>(psi phi - phi psi)/2
    pp, qq = np.outer(phi, psi), np.outer(psi, phi)
    assert np.allclose(s.tensor()[:, :, 0], (pp + qq) / 2)
    assert np.allclose(s.tensor()[:, :, 1], (pp - qq) / 2)


def test_controlled_swap_errors():
    s = StateVector(RegisterLayout.of([("S", 1), ("A", 2), ("B", 3)]))
    with pytest.raises(ValueError):
        apply_controlled_swap(s, "S", "A", "B")


# -- unitarity ----------------------------------------------------------------

GATES = [
    ("h", lambda s: apply_hadamard_layer(s, "A"), lambda s: apply_hadamard_layer(s, "A")),
    ("x", lambda s: apply_x(s, "B", [0, 2]), lambda s: apply_x(s, "B", [0, 2])),
    ("cnot", lambda s: apply_cnot_registers(s, "B", "C"), lambda s: apply_cnot_registers(s, "B", "C")),
    ("oracle", lambda s: apply_oracle(s, make_function("random", 3, seed=4), "B", "A"),
     lambda s: apply_oracle(s, make_function("random", 3, seed=4), "B", "A")),
    ("phase-oracle", lambda s: apply_oracle(s, make_function("random", 3, seed=4), "C"),
     lambda s: apply_oracle(s, make_function("random", 3, seed=4), "C")),
    ("cswap", lambda s: apply_controlled_swap(s, "A", "B", "C"), lambda s: apply_controlled_swap(s, "A", "B", "C")),
    ("ry", lambda s: apply_ry(s, "A", 0.7), lambda s: apply_ry(s, "A", -0.7)),
    ("phase", lambda s: apply_phase_where(s, {"B": 3, "C": (1, 2)}, 1.1),
     lambda s: apply_phase_where(s, {"B": 3, "C": (1, 2)}, -1.1)),
    ("global", lambda s: apply_global_phase(s, 0.3), lambda s: apply_global_phase(s, -0.3)),
]


@pytest.mark.parametrize("name, gate, inverse", GATES, ids=[g[0] for g in GATES])
def test_gate_unitary(name, gate, inverse):
    lay = RegisterLayout.of([("A", 1), ("B", 3), ("C", 3)])
    for seed in range(3):
        s = random_state(lay, seed)
        before = s.amps.copy()
        gate(s)
        assert abs(s.norm() - 1) < 1e-10
        inverse(s)
        assert np.max(np.abs(s.amps - before)) < 1e-12


# -- conditions and readout ---------------------------------------------------

def test_probability_where_and_project():
    lay = RegisterLayout.of([("A", 2), ("B", 2)])
    s = apply_hadamard_layer(apply_hadamard_layer(StateVector(lay), "A"), "B")
    assert abs(probability_where(s, {"A": 1}) - 0.25) < 1e-15
    assert abs(probability_where(s, {"A": (1, 2), "B": 0}) - 0.125) < 1e-15
    p = project(s, {"A": 3})
    assert probability_of(p, "A", 3) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        probability_where(s, {"A": 4})


def test_probability_of_examples():
    lay = RegisterLayout.of([("A", 3)])
    assert probability_of(StateVector(lay), "A", 0) == 1.0
    u = apply_hadamard_layer(StateVector(lay), "A")
    assert all(abs(probability_of(u, "A", v) - 1 / 8) < 1e-15 for v in range(8))
    with pytest.raises(ValueError):
        probability_of(u, "A", 8)


def test_measure_basis_state():
    s = StateVector(RegisterLayout.of([("A", 3)]), {"A": 6})
    assert measure_register(s, "A", 500, seed=1) == {6: 500}


def test_measure_uniform_frequencies():
    s = apply_hadamard_layer(StateVector(RegisterLayout.of([("A", 2)])), "A")
    before = s.amps.copy()
    hist = measure_register(s, "A", 40000, seed=12)
    assert all(abs(hist[v] / 40000 - 0.25) <= 0.02 for v in range(4))
    assert np.array_equal(s.amps, before)
    assert measure_register(s, "A", 40000, seed=12) == hist


def test_measure_marginal_of_second_register():
    lay = RegisterLayout.of([("A", 2), ("B", 3)])
    beta = np.random.default_rng(3).normal(size=8)
    beta /= np.linalg.norm(beta)
    s = set_register_state(lay, "B", beta)
    assert np.allclose(marginal(s, "B"), beta ** 2)
    hist = measure_register(s, "B", 100000, seed=5)
    freq = np.array([hist.get(v, 0) for v in range(8)]) / 100000
    assert np.max(np.abs(freq - beta ** 2)) < 0.01


def test_measure_rejects_zero_shots():
    with pytest.raises(ValueError):
        measure_register(StateVector(RegisterLayout.of([("A", 1)])), "A", 0, seed=1)


# -- basis registers ----------------------------------------------------------

def test_basis_register_rejects_superposition():
    s = StateVector(RegisterLayout.of([("A", 2), ("P", 2)], basis=["P"]), {"P": 2})
    with pytest.raises(ValueError):
        apply_hadamard_layer(s, "P")
    assert marginal(s, "P").tolist() == [0, 0, 1, 0]
    assert probability_where(s, {"P": 1}) == 0.0


# -- dump ---------------------------------------------------------------------

def test_dump_round_trip(tmp_path):
    s = random_state(RegisterLayout.of([("A", 3), ("B", 2)]), 7)
    path = tmp_path / "state.bin"
    dump_state(s, path)
    raw = path.read_bytes()
    assert raw[:4] == b"ASVD" and len(raw) == 16 + 16 * 32
    assert np.array_equal(load_amplitudes(path), s.amps)
    path.write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        load_amplitudes(path)
