"""End-to-end quantum algorithms for the autocorrelation spectrum and the
classical sampling baselines they are compared against."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .amplify import (EstimateReport, GoodSubspace, _resolve_seed, amplitude_estimate,
                      fixed_point_amplify)
from .boolfn import BooleanFunction, autocorrelation_spectrum
from .circuits import build_autocorrelation_sampler, build_swap_test_estimator
from .simulator import measure_register

COARSE_EPSILON = 1 / 8
_CHUNK = 1 << 20


@dataclass
class SamplingResult:
    histogram: dict
    shots: int
    delta: float
    p_min: float
    seed: int
    sequence_length: int
    u_f_calls_per_shot: int
    u_f_calls: int
    success_probability: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        return d


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def _sub_seeds(seed: int, count: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def autocorrelation_distribution(f: BooleanFunction) -> np.ndarray:
    """Target distribution ``acf(b)^2 / sigma_f``."""
    sq = autocorrelation_spectrum(f).values ** 2
    return sq / sq.sum()


def total_variation(histogram: dict, probs: np.ndarray) -> float:
    shots = sum(histogram.values())
    emp = np.zeros(len(probs))
    for v, c in histogram.items():
        emp[int(v)] = c / shots
    return 0.5 * float(np.abs(emp - probs).sum())


def sample_autocorrelation(f: BooleanFunction, delta: float, shots: int, seed,
                           p_min: float | None = None) -> SamplingResult:
    """Draw ``shots`` samples of ``b`` with probability ``acf(b)^2 / sigma_f``.

    Each shot prepares the sampler, amplifies ``R2 = 0^n`` to probability
    ``>= 1 - delta`` (``sigma_f >= 1`` gives the floor ``2^-n`` by default) and
    measures R3.
    """
    _check_delta(delta)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    seed = _resolve_seed(seed)
    p_min = 2.0 ** -f.n if p_min is None else p_min
    good = GoodSubspace.of(R2=0)
    program = fixed_point_amplify(build_autocorrelation_sampler(f), good, delta, p_min)
    state = program.run()
    hist = measure_register(state, "R3", shots, seed)
    per_shot = program.u_f_calls
    return SamplingResult(
        histogram=hist, shots=shots, delta=delta, p_min=p_min, seed=seed,
        sequence_length=program.declared["sequence_length"],
        u_f_calls_per_shot=per_shot, u_f_calls=per_shot * shots,
        success_probability=good.probability(state),
    )


def estimate_autocorrelation_sq(f: BooleanFunction, a: int, epsilon: float, delta: float, seed,
                                literal_point_register: bool = False) -> EstimateReport:
    """``acf(a)^2`` from the swap test: estimate ``Pr[R2 = 0] = (1 + acf(a)^2)/2``
    to ``epsilon/2`` and return ``2*l - 1``."""
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    _check_delta(delta)
    program = build_swap_test_estimator(f, a, literal_point_register)
    report = amplitude_estimate(program, GoodSubspace.of(R2=0), epsilon / 2, delta, seed)
    report.estimate = 2.0 * report.estimate - 1.0
    report.epsilon = epsilon
    report.algorithm = "autocorrelation_sq_swap_test"
    return report


def estimate_autocorrelation_sq_with_zero_guard(f: BooleanFunction, a: int, epsilon: float, delta: float,
                                                seed, coarse_epsilon: float = COARSE_EPSILON) -> EstimateReport:
    """Swap-test estimate that returns exactly 0 when ``acf(a) = 0``.

    A coarse estimate of ``Pr[R2 = 0^n, R3 = a] = acf(a)^2 / 2^n`` on the
    unamplified sampler comes first; estimation cannot err when that
    probability is 0.  Otherwise the result is the swap-test estimate capped
    by the coarse upper bound ``2^n (F' + coarse_epsilon)``.
    """
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    _check_delta(delta)
    seed = _resolve_seed(seed)
    coarse_seed, fine_seed = _sub_seeds(seed, 2)
    sampler = build_autocorrelation_sampler(f)
    coarse = amplitude_estimate(sampler, GoodSubspace.of(R2=0, R3=a), coarse_epsilon, delta, coarse_seed)
    if coarse.estimate == 0.0:
        estimate, fine = 0.0, None
    else:
        fine = estimate_autocorrelation_sq(f, a, epsilon, delta, fine_seed)
        bound = (1 << f.n) * (coarse.estimate + coarse_epsilon)
        estimate = min(bound, fine.estimate)
    parts = [coarse] + ([fine] if fine else [])
    return EstimateReport(
        estimate=estimate, epsilon=epsilon, delta=delta,
        u_f_calls=sum(p.u_f_calls for p in parts),
        grover_applications=sum(p.grover_applications for p in parts),
        seed=seed, algorithm="autocorrelation_sq_zero_guard",
        program_applications=sum(p.program_applications for p in parts),
        repetitions=sum(p.repetitions for p in parts),
        ancillas=max(p.ancillas for p in parts),
    )


def estimate_sigma_quantum(f: BooleanFunction, epsilon: float, delta: float, seed) -> EstimateReport:
    """``sigma_f`` as ``2^n`` times the estimated ``Pr[R2 = 0^n]`` of the sampler."""
    size = 1 << f.n
    if not 0.0 < epsilon <= size / 4:
        raise ValueError(f"epsilon must lie in (0, 2^n/4] = (0, {size / 4}], got {epsilon}")
    _check_delta(delta)
    report = amplitude_estimate(build_autocorrelation_sampler(f), GoodSubspace.of(R2=0),
                                epsilon / size, delta, seed)
    report.estimate *= size
    report.epsilon = epsilon
    report.algorithm = "sigma_quantum"
    return report


def hoeffding_samples(epsilon: float, delta: float) -> int:
    """Samples of a +-1 variable whose mean is then within ``epsilon`` w.p. ``>= 1 - delta``."""
    return math.ceil((2.0 / epsilon ** 2) * math.log(2.0 / delta))


def sigma_classical_samples(n: int, epsilon: float, delta: float) -> int:
    return math.ceil((float(1 << (2 * n)) / epsilon ** 2) * 2.0 * math.log(2.0 / delta))


def estimate_sigma_classical(f: BooleanFunction, epsilon: float, delta: float, seed) -> EstimateReport:
    """Monte-Carlo ``sigma_f = 1 + (2^n - 1) E[X]`` over uniform ``a`` and ``b != c``,
    ``X = (-1)^(f(b) + f(b^a) + f(c) + f(c^a))`` (four calls to ``f`` per sample).

    The mean is taken to accuracy ``epsilon / 2^n`` by Hoeffding's bound.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    _check_delta(delta)
    if f.n < 1:
        raise ValueError("need n >= 1")
    seed = _resolve_seed(seed)
    rng = np.random.default_rng(seed)
    size = f.size
    samples = sigma_classical_samples(f.n, epsilon, delta)
    s = f.signs()
    total = 0
    remaining = samples
    while remaining:
        m = min(remaining, _CHUNK)
        a = rng.integers(0, size, m)
        b = rng.integers(0, size, m)
        c = rng.integers(0, size, m)
        clash = b == c
        while clash.any():
            c[clash] = rng.integers(0, size, int(clash.sum()))
            clash = b == c
        total += int(np.sum(s[b] * s[b ^ a] * s[c] * s[c ^ a]))
        remaining -= m
    estimate = 1.0 + (size - 1) * total / samples
    return EstimateReport(
        estimate=estimate, epsilon=epsilon, delta=delta, u_f_calls=0, grover_applications=0,
        seed=seed, algorithm="sigma_classical", classical_calls=4 * samples, repetitions=samples,
    )


def estimate_autocorrelation_classical(f: BooleanFunction, a: int, epsilon: float, delta: float, seed) -> EstimateReport:
    """Mean of ``(-1)^(f(x) + f(x^a))`` over uniform ``x``; estimates ``acf(a)``."""
    if not 0.0 < epsilon:
        raise ValueError("epsilon must be positive")
    _check_delta(delta)
    if not 0 <= a < f.size:
        raise ValueError(f"point {a} is not an {f.n}-bit value")
    seed = _resolve_seed(seed)
    rng = np.random.default_rng(seed)
    samples = hoeffding_samples(epsilon, delta)
    s = f.signs()
    total = 0
    remaining = samples
    while remaining:
        m = min(remaining, _CHUNK)
        x = rng.integers(0, f.size, m)
        total += int(np.sum(s[x] * s[x ^ a]))
        remaining -= m
    return EstimateReport(
        estimate=total / samples, epsilon=epsilon, delta=delta, u_f_calls=0, grover_applications=0,
        seed=seed, algorithm="autocorrelation_classical", classical_calls=2 * samples, repetitions=samples,
    )
