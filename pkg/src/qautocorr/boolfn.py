"""Exact classical spectra of Boolean functions.

Truth tables follow a single index convention everywhere in the package:
bit ``j - 1`` of a table index is the input bit ``x_j`` (``x_1`` is the least
significant bit).  Spectra are normalized by ``2^-n`` so every Walsh and
autocorrelation value is a dyadic rational in ``[-1, 1]``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_CLASSICAL_N = 24
SPECTRUM_KINDS = ("walsh", "autocorrelation", "derivative-walsh")


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """Truth table of an ``n``-input, one-output Boolean function."""

    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_CLASSICAL_N:
            raise ValueError(f"n must be an integer in [1, {MAX_CLASSICAL_N}], got {self.n!r}")
        table = np.asarray(self.table)
        if table.shape != (1 << self.n,):
            raise ValueError(f"table must have length 2^n = {1 << self.n}, got shape {table.shape}")
        if not np.all((table == 0) | (table == 1)):
            raise ValueError("table entries must be 0 or 1")
        table = table.astype(np.uint8, copy=True)
        table.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_digest", hashlib.sha1(table.tobytes()).hexdigest())

    def __call__(self, x: int) -> int:
        return int(self.table[x])

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and self._digest == other._digest

    def __hash__(self):
        return hash((self.n, self._digest))

    @property
    def size(self) -> int:
        return 1 << self.n

    def signs(self) -> np.ndarray:
        """The +-1 vector ``(-1)^f(x)`` as int64."""
        return 1 - 2 * self.table.astype(np.int64)


@dataclass(frozen=True, eq=False)
class Spectrum:
    n: int
    kind: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in SPECTRUM_KINDS:
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (1 << self.n,):
            raise ValueError("spectrum length must be 2^n")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, y):
        return self.values[y]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class PointList:
    """An ordered list of ``k <= n`` points; duplicates are allowed."""

    n: int
    points: tuple[int, ...] = ()

    def __post_init__(self):
        points = tuple(int(p) for p in self.points)
        if len(points) > self.n:
            raise ValueError(f"at most n={self.n} points allowed, got {len(points)}")
        for p in points:
            if not 0 <= p < (1 << self.n):
                raise ValueError(f"point {p} is not an {self.n}-bit value")
        object.__setattr__(self, "points", points)

    @property
    def k(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def as_points(n: int, points) -> PointList:
    if isinstance(points, PointList):
        if points.n != n:
            raise ValueError(f"point list is for n={points.n}, function has n={n}")
        return points
    return PointList(n, tuple(points))


# -- transforms -------------------------------------------------------------

def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard butterfly over the last axis.

    Returns a new array; integer input stays integer (exact), float input
    stays float.  Applying it twice multiplies by the length.
    """
    a = np.array(values, copy=True)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :]
        v[..., 0, :] += hi
        v[..., 1, :] = lo - hi
        h *= 2
    return a


def walsh_spectrum(f: BooleanFunction) -> Spectrum:
    """Normalized Walsh spectrum ``(1/2^n) sum_x (-1)^(f(x) + y.x)``."""
    unnorm = fwht(f.signs())
    return Spectrum(f.n, "walsh", unnorm / float(f.size))


def _autocorrelation_fast(f: BooleanFunction) -> np.ndarray:
    # WHT -> square -> WHT; intermediate magnitudes reach 2^(3n), so stay in
    # int64 while that is exact.
    unnorm = fwht(f.signs())
    if 3 * f.n <= 62:
        acf = fwht(unnorm * unnorm)
        return acf / float(1 << (2 * f.n))
    squared = unnorm.astype(np.float64) ** 2
    return fwht(squared) / float(f.size) ** 2


def _autocorrelation_direct(f: BooleanFunction) -> np.ndarray:
    if f.n > 12:
        raise ValueError("direct autocorrelation is O(4^n); use n <= 12")
    s = f.signs()
    x = np.arange(f.size)
    out = np.empty(f.size, dtype=np.float64)
    for a in range(f.size):
        out[a] = int(np.dot(s, s[x ^ a])) / f.size
    return out


def autocorrelation_spectrum(f: BooleanFunction, method: str = "fast") -> Spectrum:
    """Normalized autocorrelation ``(1/2^n) sum_x (-1)^(f(x) + f(x ^ a))``.

    ``method="direct"`` evaluates the defining double sum (n <= 12) and is
    meant as an independent check on the default transform pipeline.
    """
    if method == "fast":
        values = _autocorrelation_fast(f)
    elif method == "direct":
        values = _autocorrelation_direct(f)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Spectrum(f.n, "autocorrelation", values)


def autocorrelation_at(f: BooleanFunction, a: int) -> float:
    s = f.signs()
    return int(np.dot(s, s[np.arange(f.size) ^ a])) / f.size


def derivative(f: BooleanFunction, points) -> BooleanFunction:
    """Higher-order derivative via the XOR over all sub-lists of ``points``."""
    pts = as_points(f.n, points)
    x = np.arange(f.size)
    table = np.zeros(f.size, dtype=np.uint8)
    for mask in range(1 << pts.k):
        shift = 0
        for i, p in enumerate(pts.points):
            if mask >> i & 1:
                shift ^= p
        table ^= f.table[x ^ shift]
    return BooleanFunction(f.n, table)


def derivative_walsh_spectrum(f: BooleanFunction, points) -> Spectrum:
    w = walsh_spectrum(derivative(f, points))
    return Spectrum(f.n, "derivative-walsh", w.values)


def sum_of_squares(f: BooleanFunction) -> float:
    """Sum-of-squares indicator ``sigma_f``; lies in ``[1, 2^n]``."""
    acf = autocorrelation_spectrum(f).values
    return float(np.dot(acf, acf))


def algebraic_normal_form(f: BooleanFunction) -> np.ndarray:
    """ANF coefficients by the binary Moebius transform (index = monomial mask)."""
    a = f.table.copy()
    h = 1
    while h < f.size:
        v = a.reshape(-1, 2, h)
        v[:, 1, :] ^= v[:, 0, :]
        h *= 2
    return a


def anf_monomials(f: BooleanFunction) -> list[int]:
    return [int(i) for i in np.flatnonzero(algebraic_normal_form(f))]


def degree(f: BooleanFunction) -> int:
    monomials = np.flatnonzero(algebraic_normal_form(f))
    if monomials.size == 0:
        return 0
    return int(max(bin(int(m)).count("1") for m in monomials))


# -- constructors -----------------------------------------------------------

def _parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    out = np.zeros_like(v)
    while np.any(v):
        out ^= v & 1
        v >>= 1
    return out


def make_function(family: str, n: int, *, w: int = 0, value: int = 0,
                  seed: int | None = None, table: Sequence[int] | None = None) -> BooleanFunction:
    """Build a function from a named family.

    Families: ``constant`` (``value``), ``linear`` (``x . w``), ``bent_quadratic``
    (``x1x2 + x3x4 + ...``, even n), ``and`` (product of all inputs),
    ``random`` (uniform table from ``seed``), ``from_table``.
    """
    size = 1 << n
    x = np.arange(size, dtype=np.int64)
    if family == "constant":
        if value not in (0, 1):
            raise ValueError("constant value must be 0 or 1")
        bits = np.full(size, value, dtype=np.uint8)
    elif family == "linear":
        if not 0 <= w < size:
            raise ValueError(f"w must be an {n}-bit value")
        bits = _parity(x & w).astype(np.uint8)
    elif family in ("bent_quadratic", "bent"):
        if n % 2:
            raise ValueError("bent_quadratic requires even n")
        bits = np.zeros(size, dtype=np.uint8)
        for i in range(0, n, 2):
            bits ^= ((x >> i) & (x >> (i + 1)) & 1).astype(np.uint8)
    elif family == "and":
        bits = (x == size - 1).astype(np.uint8)
    elif family == "random":
        if seed is None:
            raise ValueError("random family needs a seed")
        bits = np.random.default_rng(seed).integers(0, 2, size, dtype=np.uint8)
    elif family == "from_table":
        if table is None:
            raise ValueError("from_table needs a table")
        bits = np.asarray(table, dtype=np.uint8)
    else:
        raise ValueError(f"unknown family {family!r}")
    return BooleanFunction(n, bits)


def from_callable(n: int, func) -> BooleanFunction:
    return BooleanFunction(n, np.array([func(x) & 1 for x in range(1 << n)], dtype=np.uint8))


def points_from_bits(bitstrings: Iterable[str]) -> list[int]:
    """Convert bitstrings written ``x_1`` first into integers."""
    out = []
    for s in bitstrings:
        s = s.strip()
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {s!r}")
        out.append(sum(1 << i for i, ch in enumerate(s) if ch == "1"))
    return out
