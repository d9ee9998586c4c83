"""Circuit programs built as immutable op lists over the statevector simulator.

Covers the higher-order Deutsch-Jozsa family (HoDJ^k) together with the
autocorrelation sampler and swap-test estimator that reuse the same oracle.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import simulator as sim
from .boolfn import BooleanFunction, as_points
from .simulator import RegisterLayout, StateVector

# Point registers are kept as qubits while the whole HoDJ^k circuit fits here.
AUTO_BASIS_THRESHOLD = 20


def _freeze_conditions(conditions: Mapping[str, object]) -> tuple:
    out = []
    for name, accepted in conditions.items():
        if isinstance(accepted, (int,)) or hasattr(accepted, "__index__"):
            out.append((name, int(accepted)))
        else:
            out.append((name, tuple(sorted(int(v) for v in accepted))))
    return tuple(out)


def _condition_dict(frozen: tuple) -> dict:
    return {name: accepted for name, accepted in frozen}


# -- ops ------------------------------------------------------------------

@dataclass(frozen=True)
class Hadamard:
    registers: tuple[str, ...]

    def apply(self, state):
        for r in self.registers:
            sim.apply_hadamard_layer(state, r)

    def inverse(self):
        return self

    def to_dict(self):
        return {"op": "h", "registers": list(self.registers), "params": {}}


@dataclass(frozen=True)
class PauliX:
    register: str
    bits: tuple[int, ...]

    def apply(self, state):
        sim.apply_x(state, self.register, self.bits)

    def inverse(self):
        return self

    def to_dict(self):
        return {"op": "x", "registers": [self.register], "params": {"bits": list(self.bits)}}


@dataclass(frozen=True)
class CnotRegisters:
    control: str
    target: str

    def apply(self, state):
        sim.apply_cnot_registers(state, self.control, self.target)

    def inverse(self):
        return self

    def to_dict(self):
        return {"op": "cnot", "registers": [self.control, self.target], "params": {}}


@dataclass(frozen=True)
class Oracle:
    f: BooleanFunction
    register: str
    target: str | None = None

    def apply(self, state):
        sim.apply_oracle(state, self.f, self.register, self.target)

    def inverse(self):
        return self

    def to_dict(self):
        regs = [self.register] + ([self.target] if self.target else [])
        mode = "bitflip" if self.target else "phase"
        return {"op": "u_f", "registers": regs, "params": {"mode": mode}}


@dataclass(frozen=True)
class ControlledSwap:
    control: str
    a: str
    b: str

    def apply(self, state):
        sim.apply_controlled_swap(state, self.control, self.a, self.b)

    def inverse(self):
        return self

    def to_dict(self):
        return {"op": "cswap", "registers": [self.control, self.a, self.b], "params": {}}


@dataclass(frozen=True)
class RotationY:
    register: str
    angle: float

    def apply(self, state):
        sim.apply_ry(state, self.register, self.angle)

    def inverse(self):
        return RotationY(self.register, -self.angle)

    def to_dict(self):
        return {"op": "ry", "registers": [self.register], "params": {"angle": self.angle}}


@dataclass(frozen=True)
class PhaseWhere:
    """``exp(i*angle)`` on basis states meeting every register condition."""

    conditions: tuple
    angle: float

    def apply(self, state):
        sim.apply_phase_where(state, _condition_dict(self.conditions), self.angle)

    def inverse(self):
        return PhaseWhere(self.conditions, -self.angle)

    def to_dict(self):
        return {"op": "phase", "registers": [c[0] for c in self.conditions],
                "params": {"angle": self.angle,
                           "values": {c[0]: (list(c[1]) if isinstance(c[1], tuple) else c[1])
                                      for c in self.conditions}}}


@dataclass(frozen=True)
class GlobalPhase:
    angle: float

    def apply(self, state):
        sim.apply_global_phase(state, self.angle)

    def inverse(self):
        return GlobalPhase(-self.angle)

    def to_dict(self):
        return {"op": "global_phase", "registers": [], "params": {"angle": self.angle}}


# -- programs -------------------------------------------------------------

@dataclass(frozen=True)
class CircuitProgram:
    layout: RegisterLayout
    initial: tuple[tuple[str, int], ...]
    ops: tuple
    name: str = field(default="program", compare=False)
    declared: Mapping[str, int] = field(default_factory=dict, compare=False)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.layout, self.initial, self.ops))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def u_f_calls(self) -> int:
        return int(self.declared["u_f_calls"])

    def initial_values(self) -> dict[str, int]:
        return dict(self.initial)

    def new_state(self) -> StateVector:
        return StateVector(self.layout, self.initial_values())

    def run(self, state: StateVector | None = None) -> StateVector:
        if state is None:
            state = self.new_state()
        for op in self.ops:
            op.apply(state)
        return state

    def inverse(self) -> "CircuitProgram":
        return CircuitProgram(self.layout, self.initial, tuple(op.inverse() for op in reversed(self.ops)),
                              name=f"{self.name}^dagger", declared=dict(self.declared))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "layout": self.layout.to_dict(),
            "initial": dict(self.initial),
            "ops": [op.to_dict() for op in self.ops],
            "metadata": dict(self.declared),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def make_program(layout, initial, ops, name, **declared) -> CircuitProgram:
    return CircuitProgram(layout, tuple(sorted(initial.items())), tuple(ops), name=name, declared=declared)


# -- Gray code ------------------------------------------------------------

@dataclass(frozen=True)
class GrayCode:
    k: int
    codes: tuple[int, ...]

    def transition_bit(self, j: int) -> int | None:
        """Bit flipped entering stage ``j`` (1-based) from ``g_{j-1}``, with ``g_0 = 0``."""
        prev = 0 if j == 1 else self.codes[j - 2]
        diff = prev ^ self.codes[j - 1]
        if diff == 0:
            return None
        return diff.bit_length() - 1


def gray_code(k: int, n: int | None = None) -> GrayCode:
    """Binary reflected Gray code rotated so the last code is ``0^k``."""
    if k < 1 or (n is not None and k > n):
        raise ValueError(f"gray code order k={k} out of range")
    brgc = [i ^ (i >> 1) for i in range(1 << k)]
    return GrayCode(k, tuple(brgc[1:] + brgc[:1]))


# -- builders -------------------------------------------------------------

def _point_names(k: int) -> list[str]:
    return [f"R{3 + t}" for t in range(k)]


def build_hodj(f: BooleanFunction, points, basis_points: bool | None = None) -> CircuitProgram:
    """Higher-order Deutsch-Jozsa circuit for the points ``a_1..a_k``.

    Runs on ``|1>|0^n>|a_1>...|a_k>`` and leaves ``R2`` holding the Walsh
    spectrum of the k-th derivative.  ``k = 0`` is the Deutsch-Jozsa circuit.
    ``basis_points`` keeps the point registers in the computational basis
    outside the amplitude vector; ``None`` chooses by size.
    """
    pts = as_points(f.n, points)
    n, k = f.n, pts.k
    names = _point_names(k)
    if basis_points is None:
        basis_points = 1 + (k + 1) * n > AUTO_BASIS_THRESHOLD
    layout = RegisterLayout.of([("R1", 1), ("R2", n)] + [(r, n) for r in names],
                               basis=names if basis_points else ())
    initial = {"R1": 1, "R2": 0, **dict(zip(names, pts.points))}
    ops: list = [Hadamard(("R1", "R2"))]
    if k == 0:
        ops.append(Oracle(f, "R2", "R1"))
    else:
        code = gray_code(k, n)
        for j in range(1, (1 << k) + 1):
            ops.append(CnotRegisters(names[code.transition_bit(j)], "R2"))
            ops.append(Oracle(f, "R2", "R1"))
    ops.append(Hadamard(("R1", "R2")))
    return make_program(
        layout, initial, ops, f"hodj{k}",
        u_f_calls=1 << k, cnot_count=n * ((1 << k) if k else 0), h_count=2 * (n + 1),
        gate_count=(1 << k) + n * ((1 << k) if k else 0) + 2 * (n + 1),
        depth=2 * ((1 << k) + 1) if k else 3,
    )


def build_deutsch_jozsa(f: BooleanFunction) -> CircuitProgram:
    return build_hodj(f, ())


def build_autocorrelation_sampler(f: BooleanFunction) -> CircuitProgram:
    """``|1>|0^n>|0^n>``, H on R3, then HoDJ^1 with R3 as the point register.

    ``Pr[R2 = 0^n] = sigma_f / 2^n`` and, given that, R3 is distributed as
    ``acf(b)^2 / sigma_f``.
    """
    n = f.n
    layout = RegisterLayout.of([("R1", 1), ("R2", n), ("R3", n)])
    ops = [
        Hadamard(("R3",)),
        Hadamard(("R1", "R2")),
        CnotRegisters("R3", "R2"),
        Oracle(f, "R2", "R1"),
        CnotRegisters("R3", "R2"),
        Oracle(f, "R2", "R1"),
        Hadamard(("R1", "R2")),
    ]
    return make_program(layout, {"R1": 1, "R2": 0, "R3": 0}, ops, "autocorrelation_sampler",
                        u_f_calls=2, cnot_count=2 * n, h_count=3 * n + 2, gate_count=5 * n + 4)


def build_swap_test_estimator(f: BooleanFunction, a: int, literal_point_register: bool = False) -> CircuitProgram:
    """State preparation for estimating ``acf(a)^2`` by a swap test.

    Registers: R1 holds ``a``, R2 is the swap-test qubit, R3/R4 receive
    ``sum_x (-1)^f(x)|x>`` and ``sum_y (-1)^f(y^a)|y>``, W is the reusable
    ``|->`` qubit for the phase-kicked oracle.  ``Pr[R2 = 0] = 1/2 + acf(a)^2/2``.
    R1 is a basis register unless ``literal_point_register`` is set.
    """
    n = f.n
    if not 0 <= a < (1 << n):
        raise ValueError(f"point {a} is not an {n}-bit value")
    layout = RegisterLayout.of([("R1", n), ("R2", 1), ("R3", n), ("R4", n), ("W", 1)],
                               basis=() if literal_point_register else ("R1",))
    ops = [
        Hadamard(("R3", "R4", "W")),
        CnotRegisters("R1", "R4"),
        Oracle(f, "R3", "W"),
        Oracle(f, "R4", "W"),
        CnotRegisters("R1", "R4"),
        Hadamard(("W",)),
        Hadamard(("R2",)),
        ControlledSwap("R2", "R3", "R4"),
        Hadamard(("R2",)),
    ]
    return make_program(layout, {"R1": a, "R2": 0, "R3": 0, "R4": 0, "W": 1}, ops, "swap_test_estimator",
                        u_f_calls=2, cnot_count=2 * n, h_count=2 * n + 4, cswap_count=n,
                        gate_count=2 + 2 * n + (2 * n + 4) + n)


def build_synthetic(p: float) -> CircuitProgram:
    """Single-qubit program ``RY`` with success probability ``p`` on ``Q = 1``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    layout = RegisterLayout.of([("Q", 1)])
    angle = 2.0 * math.asin(math.sqrt(p))
    return make_program(layout, {"Q": 0}, [RotationY("Q", angle)], "synthetic", u_f_calls=0, gate_count=1)


def register_amplitudes(state: StateVector, register: str, fixed: Mapping[str, int]) -> np.ndarray:
    """Amplitudes of ``register`` with every other quantum register pinned to ``fixed``."""
    t = state.tensor()
    idx = []
    for r in reversed(state.layout.quantum):
        if r.name == register:
            idx.append(slice(None))
        else:
            idx.append(int(fixed[r.name]))
    for name, v in fixed.items():
        if state.layout[name].basis and state.basis_values[name] != v:
            return np.zeros(1 << state.layout[register].size, dtype=complex)
    return t[tuple(idx)].copy()
