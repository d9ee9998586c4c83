"""Grover operator, fixed-point amplitude amplification and amplitude estimation
over any :class:`CircuitProgram` with a designated good subspace.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Mapping

import numpy as np

from .circuits import CircuitProgram, GlobalPhase, PhaseWhere, _freeze_conditions
from .simulator import MAX_QUBITS, QubitBudgetError, StateVector, probability_where

# Readout probabilities below this are round-off, not signal.
_READOUT_FLOOR = 1e-13


@dataclass(frozen=True)
class GoodSubspace:
    """Conjunction of register conditions; each is a value or a set of values."""

    conditions: tuple

    @classmethod
    def of(cls, conditions: Mapping[str, object] | None = None, **kw) -> "GoodSubspace":
        merged = dict(conditions or {}, **kw)
        if not merged:
            raise ValueError("a good subspace needs at least one condition")
        return cls(_freeze_conditions(merged))

    @classmethod
    def from_predicate(cls, register: str, width: int, predicate: Callable[[int], bool]) -> "GoodSubspace":
        accepted = tuple(v for v in range(1 << width) if predicate(v))
        return cls(((register, accepted),))

    def as_dict(self) -> dict:
        return dict(self.conditions)

    def probability(self, state: StateVector) -> float:
        return probability_where(state, self.as_dict())


@dataclass
class EstimateReport:
    estimate: float
    epsilon: float
    delta: float
    u_f_calls: int
    grover_applications: int
    seed: int
    algorithm: str = "amplitude_estimation"
    program_applications: int = 0
    classical_calls: int = 0
    repetitions: int = 0
    ancillas: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _initial_phase(program: CircuitProgram, angle: float) -> PhaseWhere:
    return PhaseWhere(_freeze_conditions(program.initial_values()), angle)


class GroverOperator:
    """``Q = -A S_0 A^dagger S_good`` for the state preparation ``A = program``."""

    def __init__(self, program: CircuitProgram, good: GoodSubspace):
        self.program = program
        self.good = good
        self.ops = ((PhaseWhere(good.conditions, math.pi),)
                    + program.inverse().ops
                    + (_initial_phase(program, math.pi),)
                    + program.ops
                    + (GlobalPhase(math.pi),))

    @property
    def u_f_calls(self) -> int:
        return 2 * self.program.u_f_calls

    def prepare(self) -> StateVector:
        return self.program.run()

    def apply(self, state: StateVector, times: int = 1) -> StateVector:
        for _ in range(times):
            for op in self.ops:
                op.apply(state)
        return state


def grover_operator(program: CircuitProgram, good: GoodSubspace) -> GroverOperator:
    return GroverOperator(program, good)


# -- fixed-point amplification -------------------------------------------------

def fixed_point_length(p_min: float, delta: float) -> int:
    """Smallest odd sequence length ``L`` reaching success ``>= 1 - delta`` for
    every initial success probability ``>= p_min``."""
    if not 0.0 < p_min <= 1.0:
        raise ValueError("p_min must lie in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if p_min == 1.0:
        return 1
    d = math.sqrt(delta)
    ratio = math.acosh(1.0 / d) / math.acosh(1.0 / math.sqrt(1.0 - p_min))
    L = max(1, math.ceil(ratio - 1e-12))
    return L if L % 2 else L + 1


def fixed_point_phases(L: int, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Phase pairs ``(alpha_j, beta_j)``, ``j = 1..(L-1)/2``, of the Chebyshev schedule."""
    if L % 2 != 1:
        raise ValueError("L must be odd")
    l = (L - 1) // 2
    d = math.sqrt(delta)
    gamma = 1.0 / math.cosh(math.acosh(1.0 / d) / L)
    sg = math.sqrt(1.0 - gamma * gamma)
    j = np.arange(1, l + 1)
    alphas = 2.0 * np.arctan2(1.0, np.tan(2.0 * np.pi * j / L) * sg)
    betas = -alphas[::-1]
    return alphas, betas


def _chebyshev(L: float, x: float) -> float:
    if abs(x) <= 1.0:
        return math.cos(L * math.acos(x))
    return math.cosh(L * math.acosh(abs(x))) * (math.copysign(1.0, x) ** L)


def fixed_point_success(p: float, L: int, delta: float) -> float:
    """Closed-form success probability after the length-``L`` sequence."""
    d = math.sqrt(delta)
    x = math.cosh(math.acosh(1.0 / d) / L) * math.sqrt(1.0 - p)
    return 1.0 - delta * _chebyshev(L, x) ** 2


def fixed_point_amplify(program: CircuitProgram, good: GoodSubspace, delta: float, p_min: float) -> CircuitProgram:
    """Amplify to success ``>= 1 - delta`` for any true success ``>= p_min``.

    Uses ``(L-1)/2`` generalized Grover steps, so ``L`` applications of the
    program in total.  Every phase acts as a scalar on the good projector, so
    the state within the good subspace keeps its direction.
    """
    L = fixed_point_length(p_min, delta)
    alphas, betas = fixed_point_phases(L, delta)
    inverse = program.inverse().ops
    ops = list(program.ops)
    for alpha, beta in zip(alphas, betas):
        ops.append(PhaseWhere(good.conditions, float(beta)))
        ops.extend(inverse)
        ops.append(_initial_phase(program, -float(alpha)))
        ops.extend(program.ops)
        ops.append(GlobalPhase(math.pi))
    l = len(alphas)
    declared = {
        "u_f_calls": L * program.u_f_calls,
        "program_applications": L,
        "grover_applications": l,
        "sequence_length": L,
    }
    if "gate_count" in program.declared:
        declared["gate_count"] = L * program.declared["gate_count"] + 2 * l
    return CircuitProgram(program.layout, program.initial, tuple(ops),
                          name=f"fixed_point({program.name})", declared=declared)


# -- amplitude estimation ------------------------------------------------------

def ae_parameters(epsilon: float, delta: float) -> tuple[int, int]:
    """Ancilla count ``t`` and repetition count ``r`` for accuracy/error targets."""
    if not 0.0 < epsilon <= 0.25:
        raise ValueError(f"epsilon must lie in (0, 1/4], got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    t = math.ceil(math.log2(math.pi / epsilon)) + 2
    r = max(1, math.ceil(18.0 * math.log(1.0 / delta)))
    return t, r


def ae_query_counts(program: CircuitProgram, epsilon: float, delta: float) -> dict:
    t, r = ae_parameters(epsilon, delta)
    M = 1 << t
    applications = r * (2 * M - 1)
    return {
        "ancillas": t,
        "repetitions": r,
        "grover_applications": r * (M - 1),
        "program_applications": applications,
        "u_f_calls": program.u_f_calls * applications,
    }


def grover_overlaps(program: CircuitProgram, good: GoodSubspace, count: int) -> tuple[np.ndarray, StateVector]:
    """``<psi|Q^d|psi>`` for ``d = 0..count`` with ``psi = A|init>``."""
    q = GroverOperator(program, good)
    psi = q.prepare()
    work = psi.copy()
    out = np.empty(count + 1, dtype=np.complex128)
    out[0] = psi.inner(work)
    for d in range(1, count + 1):
        q.apply(work)
        out[d] = psi.inner(work)
    return out, work


def readout_from_overlaps(overlaps: np.ndarray, t: int) -> np.ndarray:
    """Phase-estimation readout from the Grover-trajectory overlaps.

    With the ancillas in uniform superposition the controlled powers produce
    ``M^-1/2 sum_k |k> Q^k psi``; after the inverse QFT the probability of
    ``y`` is ``M^-2 sum_{k,k'} w^{-y(k-k')} <Q^k' psi|Q^k psi>``, and the inner
    product depends only on ``k - k'`` because ``Q`` is unitary.  Folding the
    differences modulo ``M`` turns the double sum into a single FFT.
    """
    M = 1 << t
    g = overlaps[:M]
    d = np.arange(M)
    w = (M - d) * g
    w[1:] += d[1:] * np.conj(g[M - d[1:]])
    probs = np.fft.fft(w).real / (M * M)
    probs[probs < _READOUT_FLOOR] = 0.0
    return probs / probs.sum()


@functools.lru_cache(maxsize=64)
def readout_distribution(program: CircuitProgram, good: GoodSubspace, t: int) -> np.ndarray:
    """Exact distribution of the ``t``-ancilla phase-estimation readout.

    Performs the ``2^t - 1`` Grover applications of one canonical run on the
    statevector; repeated runs share the distribution.
    """
    overlaps, _ = grover_overlaps(program, good, (1 << t) - 1)
    probs = readout_from_overlaps(overlaps, t)
    probs.setflags(write=False)
    return probs


def _resolve_seed(seed) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy % (1 << 64))
    return int(seed)


def amplitude_estimate(program: CircuitProgram, good: GoodSubspace, epsilon: float, delta: float,
                       seed: int | None) -> EstimateReport:
    """Estimate ``p = Pr[good]`` to ``+-epsilon`` with probability ``>= 1 - delta``.

    Canonical phase estimation on the Grover operator, ``t`` ancillas, median
    of ``r`` independent runs.  A run reads ``y`` and reports
    ``sin^2(pi*y/2^t)``; if ``p = 0`` every run reads ``y = 0`` and the
    estimate is exactly 0.
    """
    t, r = ae_parameters(epsilon, delta)
    if program.layout.num_qubits + t > MAX_QUBITS:
        raise QubitBudgetError(
            f"estimation needs {program.layout.num_qubits} + {t} qubits, budget is {MAX_QUBITS}")
    seed = _resolve_seed(seed)
    M = 1 << t
    probs = readout_distribution(program, good, t)
    ys = np.random.default_rng(seed).choice(M, size=r, p=probs)
    estimates = np.sin(np.pi * ys / M) ** 2
    estimates[ys == 0] = 0.0
    counts = ae_query_counts(program, epsilon, delta)
    return EstimateReport(
        estimate=float(np.median(estimates)),
        epsilon=epsilon,
        delta=delta,
        u_f_calls=counts["u_f_calls"],
        grover_applications=counts["grover_applications"],
        seed=seed,
        program_applications=counts["program_applications"],
        repetitions=r,
        ancillas=t,
    )
