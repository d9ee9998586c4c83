"""Dense statevector simulator over named registers.

Qubits of the quantum registers are numbered in layout order; the basis index
of the statevector has qubit ``q`` at bit ``q``, so a register's value is read
little-endian from its qubits (its first qubit is ``x_1``).

A register may be declared a *basis register*: it is held in a fixed
computational-basis state outside the amplitude vector.  Point registers that
only ever act as CNOT controls are simulated this way to keep large HoDJ^k
instances within memory; any gate that would put such a register into
superposition raises.
"""
from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .boolfn import BooleanFunction

MAX_QUBITS = 26
_SQRT_HALF = 1.0 / math.sqrt(2.0)
_DUMP_MAGIC = b"ASVD"
_DUMP_VERSION = 1


class QubitBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Register:
    name: str
    size: int
    basis: bool = False


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[Register, ...]

    def __post_init__(self):
        names = [r.name for r in self.registers]
        if len(set(names)) != len(names):
            raise ValueError(f"register names must be unique: {names}")
        for r in self.registers:
            if r.size < 1:
                raise ValueError(f"register {r.name!r} must have at least one qubit")
        if self.num_qubits > MAX_QUBITS:
            raise QubitBudgetError(
                f"layout needs {self.num_qubits} qubits, budget is {MAX_QUBITS}")

    @classmethod
    def of(cls, registers: Sequence[tuple[str, int]], basis: Iterable[str] = ()) -> "RegisterLayout":
        basis = set(basis)
        unknown = basis - {name for name, _ in registers}
        if unknown:
            raise ValueError(f"unknown basis registers {sorted(unknown)}")
        return cls(tuple(Register(name, int(size), name in basis) for name, size in registers))

    @property
    def num_qubits(self) -> int:
        return sum(r.size for r in self.registers if not r.basis)

    @property
    def quantum(self) -> tuple[Register, ...]:
        return tuple(r for r in self.registers if not r.basis)

    def __getitem__(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(f"unknown register {name!r}")

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.registers)

    def offset(self, name: str) -> int:
        """Global index of the register's first qubit (quantum registers only)."""
        off = 0
        for r in self.registers:
            if r.name == name:
                if r.basis:
                    raise ValueError(f"{name!r} is a basis register and has no qubits")
                return off
            if not r.basis:
                off += r.size
        raise KeyError(f"unknown register {name!r}")

    def qubits(self, name: str) -> list[int]:
        off = self.offset(name)
        return list(range(off, off + self[name].size))

    def tensor_shape(self) -> tuple[int, ...]:
        """Shape with one axis per quantum register, last register first."""
        return tuple(1 << r.size for r in reversed(self.quantum))

    def tensor_axis(self, name: str) -> int:
        q = self.quantum
        for i, r in enumerate(q):
            if r.name == name:
                return len(q) - 1 - i
        raise KeyError(f"{name!r} is not a quantum register")

    def to_dict(self) -> list[dict]:
        return [{"name": r.name, "size": r.size, "basis": r.basis} for r in self.registers]


@dataclass
class QueryCounter:
    """Oracle calls, gate tally and circuit depth accumulated during a run."""

    u_f_calls: int = 0
    gate_count: int = 0
    gates: Counter = field(default_factory=Counter)
    _busy: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return max(self._busy.values(), default=0)

    def record(self, kind: str, groups: Sequence[Sequence[tuple[str, int]]]) -> None:
        """Place one gate per wire group, each in the first free layer."""
        for group in groups:
            level = max((self._busy.get(w, 0) for w in group), default=0) + 1
            for w in group:
                self._busy[w] = level
        self.gates[kind] += len(groups)
        self.gate_count += len(groups)
        if kind == "u_f":
            self.u_f_calls += len(groups)

    def snapshot(self) -> dict:
        return {"u_f_calls": self.u_f_calls, "gate_count": self.gate_count,
                "depth": self.depth, **{f"{k}_count": v for k, v in sorted(self.gates.items())}}


def _wires(layout: RegisterLayout, name: str) -> list[tuple[str, int]]:
    return [(name, i) for i in range(layout[name].size)]


class StateVector:
    """Amplitudes over the quantum registers plus values of the basis registers."""

    def __init__(self, layout: RegisterLayout, initial: Mapping[str, int] | None = None):
        self.layout = layout
        initial = dict(initial or {})
        for name in initial:
            layout[name]
        index = 0
        self.basis_values: dict[str, int] = {}
        for r in layout.registers:
            v = int(initial.get(r.name, 0))
            if not 0 <= v < (1 << r.size):
                raise ValueError(f"initial value {v} does not fit register {r.name!r}")
            if r.basis:
                self.basis_values[r.name] = v
            else:
                index |= v << layout.offset(r.name)
        self.amps = np.zeros(1 << layout.num_qubits, dtype=np.complex128)
        self.amps[index] = 1.0
        self.counter = QueryCounter()

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    def copy(self) -> "StateVector":
        other = StateVector.__new__(StateVector)
        other.layout = self.layout
        other.amps = self.amps.copy()
        other.basis_values = dict(self.basis_values)
        other.counter = QueryCounter()
        return other

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``; basis registers must agree or the overlap is 0."""
        if self.basis_values != other.basis_values:
            return 0j
        return complex(np.vdot(self.amps, other.amps))

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.layout.tensor_shape())

    def _qubit_tensor(self) -> np.ndarray:
        m = self.num_qubits
        return self.amps.reshape([2] * m) if m else self.amps.reshape(())

    def _axis(self, q: int) -> int:
        return self.num_qubits - 1 - q


def _register(state: StateVector, name: str) -> Register:
    return state.layout[name]


def _qubit(state: StateVector, control) -> int:
    """Resolve a qubit reference: a 1-qubit register name or ``(name, bit)``."""
    if isinstance(control, str):
        reg = _register(state, control)
        if reg.size != 1:
            raise ValueError(f"{control!r} has {reg.size} qubits; name a single qubit")
        name, bit = control, 0
    else:
        name, bit = control
    reg = _register(state, name)
    if reg.basis:
        raise ValueError(f"{name!r} is a basis register")
    if not 0 <= bit < reg.size:
        raise ValueError(f"bit {bit} out of range for {name!r}")
    return state.layout.offset(name) + bit


def _h_qubit(amps: np.ndarray, m: int, q: int) -> None:
    v = amps.reshape(1 << (m - q - 1), 2, 1 << q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :].copy()
    v[:, 0, :] = (a0 + a1) * _SQRT_HALF
    v[:, 1, :] = (a0 - a1) * _SQRT_HALF


def _x_qubit(amps: np.ndarray, m: int, q: int) -> None:
    v = amps.reshape(1 << (m - q - 1), 2, 1 << q)
    v[:] = v[:, ::-1, :].copy()


def _cnot_qubits(state: StateVector, cq: int, tq: int) -> None:
    t = state._qubit_tensor()
    ca, ta = state._axis(cq), state._axis(tq)
    idx = [slice(None)] * state.num_qubits
    idx[ca] = 1
    sub = t[tuple(idx)]
    sub[...] = np.flip(sub, axis=ta - 1 if ta > ca else ta).copy()


# -- gates --------------------------------------------------------------------

def apply_hadamard_layer(state: StateVector, register: str) -> StateVector:
    reg = _register(state, register)
    if reg.basis:
        raise ValueError(f"Hadamard on basis register {register!r} would create superposition")
    m = state.num_qubits
    for q in state.layout.qubits(register):
        _h_qubit(state.amps, m, q)
    state.counter.record("h", [[w] for w in _wires(state.layout, register)])
    return state


def apply_x(state: StateVector, register: str, bits: Iterable[int] | None = None) -> StateVector:
    reg = _register(state, register)
    bits = list(range(reg.size)) if bits is None else list(bits)
    if reg.basis:
        for b in bits:
            state.basis_values[register] ^= 1 << b
    else:
        off = state.layout.offset(register)
        for b in bits:
            _x_qubit(state.amps, state.num_qubits, off + b)
    state.counter.record("x", [[(register, b)] for b in bits])
    return state


def apply_ry(state: StateVector, qubit, angle: float) -> StateVector:
    q = _qubit(state, qubit)
    m = state.num_qubits
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    v = state.amps.reshape(1 << (m - q - 1), 2, 1 << q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :].copy()
    v[:, 0, :] = c * a0 - s * a1
    v[:, 1, :] = s * a0 + c * a1
    name = qubit if isinstance(qubit, str) else qubit[0]
    bit = 0 if isinstance(qubit, str) else qubit[1]
    state.counter.record("ry", [[(name, bit)]])
    return state


def apply_cnot_registers(state: StateVector, control_register: str, target_register: str) -> StateVector:
    """Bitwise ``|c>|t> -> |c>|t xor c>``: one layer of ``width`` parallel CNOTs."""
    c, t = _register(state, control_register), _register(state, target_register)
    if c.size != t.size:
        raise ValueError(f"width mismatch: {c.name}={c.size}, {t.name}={t.size}")
    if c.name == t.name:
        raise ValueError("control and target must differ")
    if t.basis and not c.basis:
        raise ValueError(f"quantum control on basis register {t.name!r} would entangle it")
    if c.basis:
        value = state.basis_values[c.name]
        if t.basis:
            state.basis_values[t.name] ^= value
        else:
            off = state.layout.offset(t.name)
            for i in range(t.size):
                if value >> i & 1:
                    _x_qubit(state.amps, state.num_qubits, off + i)
    else:
        coff, toff = state.layout.offset(c.name), state.layout.offset(t.name)
        for i in range(t.size):
            _cnot_qubits(state, coff + i, toff + i)
    state.counter.record("cnot", [[(c.name, i), (t.name, i)] for i in range(t.size)])
    return state


def apply_oracle(state: StateVector, f: BooleanFunction, input_register: str,
                 target: str | None = None) -> StateVector:
    """Standard ``U_f``.

    With ``target`` (a 1-qubit register) it acts as ``|x>|b> -> |x>|b xor f(x)>``;
    with ``target=None`` it is the phase form ``|x> -> (-1)^f(x) |x>``.
    Either way it is one call to ``U_f``.
    """
    reg = _register(state, input_register)
    if reg.size != f.n:
        raise ValueError(f"register {input_register!r} has {reg.size} qubits, f takes {f.n}")
    m = state.num_qubits
    wires = _wires(state.layout, input_register)
    if target is None:
        if reg.basis:
            if f(state.basis_values[input_register]):
                state.amps *= -1
        else:
            off = state.layout.offset(input_register)
            v = state.amps.reshape(1 << (m - off - reg.size), 1 << reg.size, 1 << off)
            v *= f.signs().astype(np.float64)[None, :, None]
    else:
        treg = _register(state, target)
        if treg.size != 1:
            raise ValueError("bit-flip oracle target must be a 1-qubit register")
        if treg.name == reg.name:
            raise ValueError("target must differ from the input register")
        wires = wires + [(target, 0)]
        if reg.basis:
            if f(state.basis_values[input_register]):
                _flip(state, target)
        elif treg.basis:
            raise ValueError(f"quantum input on basis target {target!r} would entangle it")
        else:
            tq = state.layout.offset(target)
            off = state.layout.offset(input_register)
            off2 = off if off < tq else off - 1
            v = state.amps.reshape(1 << (m - tq - 1), 2, 1 << tq)
            b0 = v[:, 0, :].copy().reshape(-1)
            b1 = v[:, 1, :].copy().reshape(-1)
            w0 = b0.reshape(1 << (m - 1 - off2 - reg.size), 1 << reg.size, 1 << off2)
            w1 = b1.reshape(w0.shape)
            mask = f.table.astype(bool)
            tmp = w0[:, mask, :].copy()
            w0[:, mask, :] = w1[:, mask, :]
            w1[:, mask, :] = tmp
            v[:, 0, :] = b0.reshape(v.shape[0], v.shape[2])
            v[:, 1, :] = b1.reshape(v.shape[0], v.shape[2])
    state.counter.record("u_f", [wires])
    return state


def _flip(state: StateVector, target: str) -> None:
    reg = _register(state, target)
    if reg.basis:
        state.basis_values[target] ^= 1
    else:
        _x_qubit(state.amps, state.num_qubits, state.layout.offset(target))


def apply_controlled_swap(state: StateVector, control_qubit, reg_a: str, reg_b: str) -> StateVector:
    a, b = _register(state, reg_a), _register(state, reg_b)
    if a.size != b.size:
        raise ValueError(f"width mismatch: {a.name}={a.size}, {b.name}={b.size}")
    if a.basis or b.basis:
        raise ValueError("controlled swap needs quantum registers")
    cq = _qubit(state, control_qubit)
    qa, qb = state.layout.qubits(reg_a), state.layout.qubits(reg_b)
    if cq in qa or cq in qb:
        raise ValueError("control qubit lies inside a swapped register")
    m = state.num_qubits
    ca = state._axis(cq)

    def sub_axis(q):
        ax = m - 1 - q
        return ax - 1 if ax > ca else ax

    perm = list(range(m - 1))
    for x, y in zip(qa, qb):
        perm[sub_axis(x)], perm[sub_axis(y)] = sub_axis(y), sub_axis(x)
    t = state._qubit_tensor()
    idx = [slice(None)] * m
    idx[ca] = 1
    sub = t[tuple(idx)]
    sub[...] = sub.transpose(perm).copy()
    cname = control_qubit if isinstance(control_qubit, str) else control_qubit[0]
    cbit = 0 if isinstance(control_qubit, str) else control_qubit[1]
    state.counter.record("cswap", [[(cname, cbit), (reg_a, i), (reg_b, i)] for i in range(a.size)])
    return state


def swap_test(state: StateVector, ancilla: str, reg_a: str, reg_b: str) -> StateVector:
    """H on the ancilla, ancilla-controlled swap of the registers, H again."""
    apply_hadamard_layer(state, ancilla)
    apply_controlled_swap(state, ancilla, reg_a, reg_b)
    apply_hadamard_layer(state, ancilla)
    return state


# -- conditions on register values -------------------------------------------

def _accepts(state: StateVector, name: str, accepted) -> np.ndarray:
    size = 1 << _register(state, name).size
    vec = np.zeros(size, dtype=bool)
    values = [accepted] if isinstance(accepted, (int, np.integer)) else list(accepted)
    for v in values:
        if not 0 <= int(v) < size:
            raise ValueError(f"value {v} out of range for register {name!r}")
        vec[int(v)] = True
    return vec


def condition_mask(state: StateVector, conditions: Mapping[str, object]) -> np.ndarray | None:
    """Boolean mask over the register tensor selecting basis states that meet
    every condition (a value or a collection of accepted values).

    Returns ``None`` when a basis-register condition already fails.
    """
    shape = state.layout.tensor_shape()
    mask = np.ones(shape, dtype=bool)
    for name, accepted in conditions.items():
        vec = _accepts(state, name, accepted)
        reg = _register(state, name)
        if reg.basis:
            if not vec[state.basis_values[name]]:
                return None
            continue
        view = [1] * len(shape)
        view[state.layout.tensor_axis(name)] = vec.size
        mask &= vec.reshape(view)
    return mask


def apply_phase_where(state: StateVector, conditions: Mapping[str, object], angle: float) -> StateVector:
    """Multiply amplitudes of the selected basis states by ``exp(i*angle)``."""
    mask = condition_mask(state, conditions)
    if mask is not None:
        phase = -1.0 if angle == math.pi else complex(math.cos(angle), math.sin(angle))
        state.tensor()[mask] *= phase
    groups = [w for name in conditions for w in _wires(state.layout, name)]
    state.counter.record("phase", [groups])
    return state


def apply_global_phase(state: StateVector, angle: float) -> StateVector:
    state.amps *= -1.0 if angle == math.pi else complex(math.cos(angle), math.sin(angle))
    return state


def probability_where(state: StateVector, conditions: Mapping[str, object]) -> float:
    mask = condition_mask(state, conditions)
    if mask is None:
        return 0.0
    probs = np.abs(state.tensor()) ** 2
    return float(probs[mask].sum())


def project(state: StateVector, conditions: Mapping[str, object]) -> StateVector:
    """Renormalized projection onto the selected subspace (a new state)."""
    mask = condition_mask(state, conditions)
    p = probability_where(state, conditions)
    if mask is None or p == 0.0:
        raise ValueError("projection onto a zero-probability subspace")
    out = state.copy()
    t = out.tensor()
    t[~mask] = 0
    out.amps /= math.sqrt(p)
    return out


# -- readout ------------------------------------------------------------------

def marginal(state: StateVector, register: str) -> np.ndarray:
    reg = _register(state, register)
    size = 1 << reg.size
    if reg.basis:
        out = np.zeros(size)
        out[state.basis_values[register]] = 1.0
        return out
    probs = np.abs(state.tensor()) ** 2
    axis = state.layout.tensor_axis(register)
    others = tuple(i for i in range(probs.ndim) if i != axis)
    return probs.sum(axis=others)


def probability_of(state: StateVector, register: str, value: int) -> float:
    size = 1 << _register(state, register).size
    if not 0 <= value < size:
        raise ValueError(f"value {value} out of range for register {register!r}")
    return float(marginal(state, register)[value])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def measure_register(state: StateVector, register: str, shots: int, seed) -> dict[int, int]:
    """Sample ``shots`` outcomes of ``register`` without collapsing the state."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = marginal(state, register)
    p = np.clip(p, 0.0, None)
    p = p / p.sum()
    counts = _rng(seed).multinomial(shots, p)
    return {int(v): int(c) for v, c in enumerate(counts) if c}


# -- debug dump ---------------------------------------------------------------

def dump_state(state: StateVector, path) -> None:
    header = struct.pack("<4sIII", _DUMP_MAGIC, _DUMP_VERSION, state.num_qubits, 0)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(state.amps.astype("<c16").tobytes())


def load_amplitudes(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, m, _ = struct.unpack_from("<4sIII", raw)
    if magic != _DUMP_MAGIC or version != _DUMP_VERSION:
        raise ValueError("not a statevector dump")
    amps = np.frombuffer(raw, dtype="<c16", offset=16)
    if amps.size != 1 << m:
        raise ValueError(f"dump holds {amps.size} amplitudes, header says 2^{m}")
    return amps.astype(np.complex128)
