"""Command-line front end.

Exit codes: 0 success, 1 failed verification, 2 bad parameters or input
files, 3 qubit budget exceeded.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
import uuid

import numpy as np

from . import boolfn, estimators
from .amplify import fixed_point_amplify, GoodSubspace
from .circuits import build_autocorrelation_sampler, build_hodj, build_swap_test_estimator, register_amplitudes
from .simulator import QubitBudgetError
from .tablefile import TableFormatError, read_table, write_table

MAX_QUANTUM_N = 12
HODJ_TOLERANCE = 1e-10
LOG_FIELDS = ("run_id", "algorithm", "n", "function_family", "point", "epsilon", "delta", "estimate",
              "truth", "u_f_calls", "classical_calls", "seed", "wall_ms")
FAMILIES = ("constant", "linear", "bent", "and", "random")


class VerificationError(RuntimeError):
    pass


def thread_cap(environ=os.environ) -> int:
    """Parallelism cap from ``AUTOSPEC_THREADS``; the engine itself runs single-threaded."""
    raw = environ.get("AUTOSPEC_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"AUTOSPEC_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"AUTOSPEC_THREADS must be a positive integer, got {raw!r}")
    return value


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n")


def _function_seed(args) -> int | None:
    return args.function_seed if args.function_seed is not None else args.seed


def load_function(args) -> tuple[boolfn.BooleanFunction, str]:
    if args.table:
        if args.family:
            raise ValueError("give either --table or --family, not both")
        return read_table(args.table), "table"
    if not args.family:
        raise ValueError("a function source is required: --table PATH or --family NAME")
    if args.n is None:
        raise ValueError("--family needs --n")
    if not 1 <= args.n <= boolfn.MAX_CLASSICAL_N:
        raise ValueError(f"n must lie in [1, {boolfn.MAX_CLASSICAL_N}], got {args.n}")
    family = "bent_quadratic" if args.family == "bent" else args.family
    f = boolfn.make_function(family, args.n, w=args.w, value=args.value, seed=_function_seed(args))
    return f, args.family


def _parse_point_list(text: str) -> list[int]:
    if text.strip() == "":
        return []
    try:
        return [int(p, 0) for p in text.split(",")]
    except ValueError:
        raise ValueError(f"points must be comma-separated integers, got {text!r}") from None


def _single_point(args, n: int) -> int:
    if args.bits is not None and args.point is not None:
        raise ValueError("give either --point or --bits, not both")
    if args.bits is not None:
        (a,) = boolfn.points_from_bits([args.bits])
        if len(args.bits.strip()) != n:
            raise ValueError(f"--bits needs exactly n={n} bits")
    elif args.point is not None:
        a = args.point
    else:
        raise ValueError("a point is required: --point INT or --bits BITSTRING")
    if not 0 <= a < (1 << n):
        raise ValueError(f"point {a} is not an {n}-bit value")
    return a


def _require_quantum(n: int) -> None:
    if n > MAX_QUANTUM_N:
        raise QubitBudgetError(f"simulated quantum runs support n <= {MAX_QUANTUM_N}, got n={n}")


def _dump(program, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(program.to_json(sort_keys=True, indent=2) + "\n")


def _append_log(path, row: dict) -> None:
    if not path:
        return
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=LOG_FIELDS)
        if fresh:
            writer.writeheader()
        writer.writerow({k: row.get(k, "") for k in LOG_FIELDS})


def _log_report(args, report, n, family, point, truth, started) -> None:
    _append_log(args.log, {
        "run_id": uuid.uuid4().hex, "algorithm": report.algorithm, "n": n, "function_family": family,
        "point": "" if point is None else point, "epsilon": report.epsilon, "delta": report.delta,
        "estimate": report.estimate, "truth": truth, "u_f_calls": report.u_f_calls,
        "classical_calls": report.classical_calls, "seed": report.seed,
        "wall_ms": round((time.perf_counter() - started) * 1000.0, 3),
    })


def _floats(values) -> list[float]:
    return [float(v) for v in values]


# -- commands -------------------------------------------------------------

def cmd_spectrum(args) -> int:
    f, _ = load_function(args)
    if args.save_table:
        write_table(f, args.save_table)
    chosen = [k for k in ("walsh", "autocorr", "sigma", "degree", "anf") if getattr(args, k)]
    if not chosen:
        chosen = ["walsh", "autocorr", "sigma", "degree", "anf"]
    walsh = boolfn.walsh_spectrum(f).values
    acf = boolfn.autocorrelation_spectrum(f).values
    vectors, scalars = {}, {}
    if args.point is not None:
        if not 0 <= args.point < f.size:
            raise ValueError(f"point {args.point} is not an {f.n}-bit value")
        scalars["point"] = args.point
    if "walsh" in chosen:
        vectors["walsh"] = walsh
    if "autocorr" in chosen:
        vectors["autocorrelation"] = acf
    if "sigma" in chosen:
        scalars["sigma_f"] = float(np.sum(acf ** 2))
    if "degree" in chosen:
        scalars["degree"] = boolfn.degree(f)
    if "anf" in chosen and args.point is None:
        scalars["anf"] = boolfn.anf_monomials(f)
    if args.point is not None:
        scalars.update({k: float(v[args.point]) for k, v in vectors.items()})
        vectors = {}

    if args.out == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        if vectors:
            w.writerow(["point", *vectors])
            for y in range(f.size):
                w.writerow([y, *(repr(float(v[y])) for v in vectors.values())])
        if scalars:
            w.writerow(["quantity", "value"])
            for k, v in scalars.items():
                w.writerow([k, " ".join(map(str, v)) if isinstance(v, list) else v])
    else:
        _emit({"n": f.n, **{k: _floats(v) for k, v in vectors.items()}, **scalars})
    return 0


def cmd_hodj(args) -> int:
    f, _ = load_function(args)
    _require_quantum(f.n)
    if args.bits is not None and args.points is not None:
        raise ValueError("give either --points or --bits, not both")
    if args.bits is not None:
        pts = boolfn.points_from_bits(args.bits.split(",")) if args.bits.strip() else []
    else:
        pts = _parse_point_list(args.points or "")
    program = build_hodj(f, pts)
    _dump(program, args.dump_circuit)
    state = program.run()
    names = [f"R{3 + t}" for t in range(len(pts))]
    amps = register_amplitudes(state, "R2", {"R1": 1, **dict(zip(names, pts))})
    measured = state.counter.snapshot()
    k = len(pts)
    out = {
        "n": f.n, "k": k, "points": pts,
        "amplitudes": _floats(amps.real),
        "u_f_calls": measured["u_f_calls"],
        "cnot_count": measured.get("cnot_count", 0),
        "h_count": measured.get("h_count", 0),
        "depth": measured["depth"],
        "depth_formula": 2 * ((1 << k) + 1),
        "declared": dict(program.declared),
    }
    code = 0
    if args.verify:
        expected = boolfn.derivative_walsh_spectrum(f, pts).values
        err = float(np.max(np.abs(amps - expected)))
        out["max_error"] = err
        out["verified"] = err <= HODJ_TOLERANCE and measured["u_f_calls"] == 1 << k
        if not out["verified"]:
            code = 1
    _emit(out)
    return code


def cmd_sample(args) -> int:
    f, _ = load_function(args)
    _require_quantum(f.n)
    if args.dump_circuit:
        p_min = args.p_min if args.p_min is not None else 2.0 ** -f.n
        _dump(fixed_point_amplify(build_autocorrelation_sampler(f), GoodSubspace.of(R2=0), args.delta, p_min),
              args.dump_circuit)
    res = estimators.sample_autocorrelation(f, args.delta, args.shots, args.seed, p_min=args.p_min)
    out = res.to_dict()
    out["n"] = f.n
    out["total_variation"] = estimators.total_variation(res.histogram, estimators.autocorrelation_distribution(f))
    _emit(out)
    return 0


def cmd_estimate(args) -> int:
    started = time.perf_counter()
    f, family = load_function(args)
    a = _single_point(args, f.n)
    acf = float(boolfn.autocorrelation_at(f, a))
    if args.classical:
        report = estimators.estimate_autocorrelation_classical(f, a, args.epsilon, args.delta, args.seed)
        truth = acf
    else:
        _require_quantum(f.n)
        _dump(build_swap_test_estimator(f, a, args.literal_register), args.dump_circuit)
        if args.zero_guard:
            report = estimators.estimate_autocorrelation_sq_with_zero_guard(f, a, args.epsilon, args.delta, args.seed)
        else:
            report = estimators.estimate_autocorrelation_sq(f, a, args.epsilon, args.delta, args.seed,
                                                            literal_point_register=args.literal_register)
        truth = acf * acf
    _log_report(args, report, f.n, family, a, truth, started)
    _emit({**report.to_dict(), "n": f.n, "point": a, "truth": truth})
    return 0


def cmd_sigma(args) -> int:
    started = time.perf_counter()
    f, family = load_function(args)
    truth = boolfn.sum_of_squares(f)
    if args.classical:
        report = estimators.estimate_sigma_classical(f, args.epsilon, args.delta, args.seed)
    else:
        _require_quantum(f.n)
        _dump(build_autocorrelation_sampler(f), args.dump_circuit)
        report = estimators.estimate_sigma_quantum(f, args.epsilon, args.delta, args.seed)
    _log_report(args, report, f.n, family, None, truth, started)
    _emit({**report.to_dict(), "n": f.n, "truth": truth})
    return 0


# -- parser ---------------------------------------------------------------

def _add_source(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("function source")
    g.add_argument("--table", help="truth-table file (n=<int> line, then hex)")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--w", type=lambda s: int(s, 0), default=0, help="mask for the linear family")
    g.add_argument("--value", type=int, default=0, help="value of the constant family")
    g.add_argument("--function-seed", type=int, help="seed of the random family (defaults to --seed)")
    p.add_argument("--seed", type=int, help="64-bit run seed")


def _add_estimation(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--log", help="append a CSV run-log row to this file")
    p.add_argument("--dump-circuit", help="write the circuit JSON here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qautocorr",
                                     description="Boolean-function spectra and simulated quantum estimators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="classical spectra of a function")
    _add_source(p)
    for flag in ("walsh", "autocorr", "sigma", "degree", "anf"):
        p.add_argument(f"--{flag}", action="store_true")
    p.add_argument("--point", type=lambda s: int(s, 0))
    p.add_argument("--out", choices=("json", "csv"), default="json")
    p.add_argument("--save-table", help="also write the function as a truth-table file")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("hodj", help="run the HoDJ^k circuit")
    _add_source(p)
    p.add_argument("--points", help="comma-separated integer points a_1,...,a_k")
    p.add_argument("--bits", help="comma-separated bitstrings, x_1 first")
    p.add_argument("--verify", action="store_true", help="compare against the classical derivative spectrum")
    p.add_argument("--dump-circuit")
    p.set_defaults(func=cmd_hodj)

    p = sub.add_parser("sample", help="autocorrelation sampling with fixed-point amplification")
    _add_source(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--p-min", type=float, help="known lower bound on sigma_f / 2^n")
    p.add_argument("--dump-circuit")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="estimate one autocorrelation coefficient")
    _add_source(p)
    _add_estimation(p)
    p.add_argument("--point", type=lambda s: int(s, 0))
    p.add_argument("--bits")
    p.add_argument("--zero-guard", action="store_true", help="return exactly 0 when the coefficient vanishes")
    p.add_argument("--classical", action="store_true", help="classical sampling baseline (estimates acf(a))")
    p.add_argument("--literal-register", action="store_true", help="hold the point in a qubit register")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sigma", help="estimate the sum-of-squares indicator")
    _add_source(p)
    _add_estimation(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--quantum", action="store_true", help="amplitude estimation on the sampler (default)")
    mode.add_argument("--classical", action="store_true", help="classical Monte-Carlo baseline")
    p.set_defaults(func=cmd_sigma)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        thread_cap()
        return args.func(args)
    except QubitBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (TableFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
