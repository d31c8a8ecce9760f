"""Complete and incomplete exponential sums modulo a prime.

T(a, b; q) = sum_{n mod q} exp(2*pi*i*(a*n**k + b*n)/q). Phases are reduced
exactly in integer arithmetic before a root-of-unity table lookup, so no
floating-point angle ever grows with n or q.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import audit
from .modular import discrete_logs, is_prime
from .precision import DDPhase, RationalPhase, int_times_phase, power_phases, reduce_2pi

REL_TOL = 1e-9  # relative slack for magnitude comparisons at a threshold
HIST_BIN = 0.05  # histogram bin width in units of sqrt(q)
_INT64_SAFE_Q = 2**31


@dataclass(frozen=True)
class ExponentPattern:
    """Distinct positive exponents, highest first; k = exponents[0]."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        e = tuple(int(x) for x in self.exponents)
        if not e or any(x < 1 for x in e) or len(set(e)) != len(e):
            raise ValueError("exponents must be distinct positive integers")
        object.__setattr__(self, "exponents", tuple(sorted(e, reverse=True)))

    @property
    def k(self) -> int:
        return self.exponents[0]

    @classmethod
    def standard(cls, k: int) -> "ExponentPattern":
        """The pattern (k, 1) used for the two-variable table."""
        if k < 2:
            raise ValueError("k must be at least 2")
        return cls((k, 1))


def _require_prime(q: int) -> None:
    if not is_prime(q):
        raise ValueError(f"modulus {q} is not prime")


@lru_cache(maxsize=64)
def _roots(q: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(q) / q)


def _powmod_vec(n: np.ndarray, e: int, q: int) -> np.ndarray:
    out = np.ones_like(n)
    base = n % q
    while e:
        if e & 1:
            out = out * base % q
        base = base * base % q
        e >>= 1
    return out


def _residues(pattern: ExponentPattern, coeffs: Sequence[int], q: int) -> np.ndarray:
    """Residues of sum_i coeffs[i] * n**e_i mod q for n = 0 .. q-1."""
    n = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=np.int64)
    for c, e in zip(coeffs, pattern.exponents):
        acc = (acc + (int(c) % q) * _powmod_vec(n, e, q)) % q
    return acc


def complete_sum(pattern: ExponentPattern, coeffs: Sequence[int], q: int) -> complex:
    """sum_{n mod q} e(2*pi*P(n)/q) with P(n) = sum_i coeffs[i] n**e_i."""
    _require_prime(q)
    if len(coeffs) != len(pattern.exponents):
        raise ValueError("one coefficient per exponent is required")
    if q < _INT64_SAFE_Q:
        return complex(np.sum(_roots(q)[_residues(pattern, coeffs, q)]))
    total = 0j
    for n in range(q):
        r = sum(int(c) * pow(n, e, q) for c, e in zip(coeffs, pattern.exponents)) % q
        total += complex(np.exp(2j * np.pi * r / q))
    return total


def naive_sum(k: int, a1: int, b: int, q: int) -> complex:
    """Direct O(q) evaluation of T(a1, b; q); used as the reference for the FFT rows."""
    return complete_sum(ExponentPattern.standard(k), (a1, b), q)


def _row_values(k: int, q: int, a1s: np.ndarray) -> np.ndarray:
    """Complex rows T(a1, b; q) over all b, one row per entry of a1s."""
    mk = _powmod_vec(np.arange(q, dtype=np.int64), k, q)
    idx = (np.asarray(a1s, dtype=np.int64)[:, None] * mk[None, :]) % q
    v = _roots(q)[idx]
    # sum_m v[m] exp(+2 pi i b m / q) is q times the inverse DFT
    return np.fft.ifft(v, axis=1) * q


@dataclass
class SumTable:
    """|T(a1, b; q)| for all a1, b modulo q (row index a1, column index b)."""

    k: int
    q: int
    magnitudes: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a1", "b", "magnitude"])
        for a1 in range(self.q):
            for b in range(self.q):
                w.writerow([a1, b, f"{self.magnitudes[a1, b]:.12e}"])
        return buf.getvalue()


def sum_table(k: int, q: int, chunk_entries: int = 4_000_000) -> SumTable:
    """Full magnitude table, one inverse FFT per row."""
    _require_prime(q)
    if k < 2:
        raise ValueError("k must be at least 2")
    mags = np.empty((q, q), dtype=np.float64)
    rows = max(1, chunk_entries // q)
    for start in range(0, q, rows):
        a1s = np.arange(start, min(q, start + rows))
        mags[start : start + len(a1s)] = np.abs(_row_values(k, q, a1s))
    return SumTable(k, q, mags)


class DilationTable:
    """Compressed magnitude table using |T(r*u**k, b)| = |T(r, b/u)|.

    Only gcd(k, q-1) representative rows are transformed; every other row is a
    permutation of one of them.
    """

    def __init__(self, k: int, q: int):
        _require_prime(q)
        if k < 2:
            raise ValueError("k must be at least 2")
        self.k, self.q = k, q
        gen, logs = discrete_logs(q)
        order = q - 1
        self.g = math.gcd(k, order)
        self.reps = np.array([pow(gen, c, q) for c in range(self.g)], dtype=np.int64)
        self.rows = np.abs(_row_values(k, q, self.reps))

        e = logs[1:]
        c = e % self.g
        sub = order // self.g
        kinv = pow(k // self.g, -1, sub) if sub > 1 else 0
        j = ((e - c) // self.g) * kinv % sub if sub > 1 else np.zeros_like(e)
        self.cls = np.full(q, -1, dtype=np.int64)
        self.cls[1:] = c
        # u = gen**j, so u**-1 = gen**(-j)
        pw = np.empty(order, dtype=np.int64)
        pw[logs[1:]] = np.arange(1, q)
        self.uinv = np.zeros(q, dtype=np.int64)
        self.uinv[1:] = pw[(-j) % order]

    def class_sizes(self) -> np.ndarray:
        return np.full(self.g, (self.q - 1) // self.g, dtype=np.int64)

    def magnitude(self, a1, b) -> np.ndarray:
        a1 = np.asarray(a1, dtype=np.int64) % self.q
        b = np.asarray(b, dtype=np.int64) % self.q
        a1, b = np.broadcast_arrays(a1, b)
        out = np.where(b == 0, float(self.q), 0.0).astype(np.float64)
        nz = a1 != 0
        col = (b[nz] * self.uinv[a1[nz]]) % self.q
        out[nz] = self.rows[self.cls[a1[nz]], col]
        return out

    def row(self, a1: int) -> np.ndarray:
        return self.magnitude(np.full(self.q, a1), np.arange(self.q))


@lru_cache(maxsize=32)
def dilation_table(k: int, q: int) -> DilationTable:
    return DilationTable(k, q)


# ---------------------------------------------------------------------------
# Global checks on a table


@dataclass(frozen=True)
class ParsevalReport:
    q: int
    k: int
    total: float
    expected: float
    residual: float

    @property
    def ok(self) -> bool:
        return self.residual < 1e-8


def parseval_check(k: int, q: int, table: SumTable | None = None) -> ParsevalReport:
    """Compare sum |T|^2 over all (a1, b) with q**3."""
    table = table or sum_table(k, q)
    total = float(np.sum(table.magnitudes**2))
    expected = float(q) ** 3
    return ParsevalReport(q, k, total, expected, abs(total - expected) / expected)


@dataclass(frozen=True)
class WeilReport:
    q: int
    k: int
    applicable: bool
    max_ratio: float | None  # max over a1 != 0 of |T| / ((k-1) sqrt q)

    @property
    def ok(self) -> bool:
        return (not self.applicable) or self.max_ratio <= 1 + REL_TOL


def weil_margin(k: int, q: int, table: SumTable | None = None) -> WeilReport:
    if q <= k and k % q == 0:
        return WeilReport(q, k, False, None)
    table = table or sum_table(k, q)
    ratio = float(np.max(table.magnitudes[1:])) / ((k - 1) * math.sqrt(q))
    return WeilReport(q, k, True, ratio)


@dataclass
class CensusReport:
    q: int
    k: int
    alpha1: float
    alpha2: float
    count: int  # all (a1, b) mod q, the zero pair included
    count_nonzero: int
    fraction: float
    histogram: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.count >= self.alpha2 * self.q**2

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "k": self.k,
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "count": self.count,
            "count_nonzero": self.count_nonzero,
            "fraction": self.fraction,
            "bin_width": HIST_BIN,
            "histogram": self.histogram,
        }


def alpha2_for(k: int) -> float:
    return 1.0 / (4 * k * k)


def census(k: int, q: int, alpha1: float = 0.5, table: SumTable | None = None) -> CensusReport:
    """Count pairs with |T(a1, b)| >= alpha1 * sqrt(q)."""
    table = table or sum_table(k, q)
    ratio = table.magnitudes / math.sqrt(q)
    hit = ratio >= alpha1 * (1 - REL_TOL)
    count = int(np.count_nonzero(hit))
    nonzero = count - int(hit[0, 0])
    nbins = int(math.ceil(float(ratio.max()) / HIST_BIN + 1e-12)) + 1
    hist = np.bincount(np.minimum((ratio / HIST_BIN).astype(np.int64), nbins - 1).ravel(), minlength=nbins)
    return CensusReport(q, k, alpha1, alpha2_for(k), count, nonzero, count / q**2, [int(h) for h in hist])


# ---------------------------------------------------------------------------
# Good tuples


def good_bounds(k: int, n: int, q: int) -> tuple[float, float]:
    """Lower and upper bounds for prod_{j>=2} |T(a1, a_j)|."""
    s = q ** ((n - 1) / 2)
    return 0.5 ** (n - 1) * s, (k - 1) ** (n - 1) * s


def good_floor(k: int, n: int, q: int) -> float:
    """Guaranteed cardinality (alpha2/2)**n (1 - 2**-n) q**n, valid once q >= 16 k**2."""
    return (alpha2_for(k) / 2) ** n * (1 - 2.0**-n) * float(q) ** n


class GoodSet:
    """Tuples (a1, ..., an) mod q, a1 != 0, whose product of |T(a1, a_j)| lies in the good band."""

    def __init__(self, k: int, n: int, q: int, table: DilationTable | None = None):
        if n < 2:
            raise ValueError("n must be at least 2")
        self.k, self.n, self.q = k, n, q
        self.table = table or dilation_table(k, q)
        self.lower, self.upper = good_bounds(k, n, q)
        self.warning = None if q >= 16 * k * k else f"q={q} < 16k^2; the cardinality floor is not guaranteed"
        self.class_counts = np.array([self._count_row(r) for r in self.table.rows], dtype=np.int64)
        self.cardinality = int(np.sum(self.class_counts * self.table.class_sizes()))

    def _count_row(self, mags: np.ndarray) -> int:
        lo, hi = self.lower * (1 - REL_TOL), self.upper * (1 + REL_TOL)
        srt = np.sort(mags)
        prefix = np.ones(1)
        for _ in range(self.n - 2):
            prefix = (prefix[:, None] * mags[None, :]).ravel()
        prefix = prefix[prefix > 0]
        right = np.searchsorted(srt, hi / prefix, side="right")
        left = np.searchsorted(srt, lo / prefix, side="left")
        return int(np.sum(right - left))

    @property
    def floor(self) -> float:
        return good_floor(self.k, self.n, self.q)

    def products(self, tuples: np.ndarray) -> np.ndarray:
        t = np.atleast_2d(np.asarray(tuples, dtype=np.int64))
        out = np.ones(len(t))
        for j in range(1, self.n):
            out *= self.table.magnitude(t[:, 0], t[:, j])
        return out

    def contains(self, tuples: np.ndarray) -> np.ndarray:
        t = np.atleast_2d(np.asarray(tuples, dtype=np.int64))
        if t.shape[1] != self.n:
            raise ValueError(f"expected {self.n}-tuples")
        p = self.products(t)
        inside = (p >= self.lower * (1 - REL_TOL)) & (p <= self.upper * (1 + REL_TOL))
        return inside & (t[:, 0] % self.q != 0)

    def row_tuples(self, a1: int) -> np.ndarray:
        """All good tuples with the given first entry, lexicographic."""
        q = self.q
        if a1 % q == 0:
            return np.zeros((0, self.n), dtype=np.int64)
        rest = np.indices((q,) * (self.n - 1)).reshape(self.n - 1, -1).T
        t = np.column_stack([np.full(len(rest), a1), rest])
        return t[self.contains(t)]

    def iter_tuples(self) -> Iterator[np.ndarray]:
        for a1 in range(1, self.q):
            yield self.row_tuples(a1)

    def tuples(self) -> np.ndarray:
        rows = list(self.iter_tuples())
        return np.concatenate(rows) if rows else np.zeros((0, self.n), dtype=np.int64)


def good_set(k: int, n: int, q: int) -> GoodSet:
    _require_prime(q)
    return GoodSet(k, n, q)


# ---------------------------------------------------------------------------
# Incomplete sums


def _phase_residues(coeffs: Sequence[int], exponents: Sequence[int], q: int) -> np.ndarray:
    return _residues(ExponentPattern(tuple(exponents)), coeffs, q)


@dataclass(frozen=True)
class IncompleteSumReport:
    q: int
    H: int
    value: complex
    magnitude: float
    ratio: float  # |S| / (sqrt(q) log q)
    completion_bound: float

    @property
    def within_audit(self) -> bool:
        return self.ratio <= audit.INCOMPLETE_SUM_RATIO


def completion_bound(k: int, q: int, H: int) -> float:
    """(k-1) sqrt(q) (1/q) sum_h |sum_{n<=H} e(2 pi h n / q)|, an explicit bound via Weil."""
    h = np.arange(1, q)
    geo = np.abs(np.sin(np.pi * h * H / q) / np.sin(np.pi * h / q))
    return (k - 1) * math.sqrt(q) * (H + float(np.sum(geo))) / q


def incomplete_sum(coeffs: Sequence[int], exponents: Sequence[int], q: int, H: int) -> IncompleteSumReport:
    """sum_{1<=n<=H} e(2*pi*P(n)/q), evaluated through residue counts."""
    _require_prime(q)
    if H < 1:
        raise ValueError("H must be positive")
    pattern = ExponentPattern(tuple(exponents))
    if int(coeffs[list(exponents).index(pattern.k)]) % q == 0:
        raise ValueError("leading coefficient must be nonzero mod q")
    res = _phase_residues(coeffs, exponents, q)
    counts = np.full(q, H // q, dtype=np.int64)
    tail = H % q
    counts[np.arange(1, tail + 1) % q] += 1
    value = complex(np.sum(counts * _roots(q)[res]))
    mag = abs(value)
    return IncompleteSumReport(q, H, value, mag, mag / (math.sqrt(q) * math.log(q)), completion_bound(pattern.k, q, H))


# ---------------------------------------------------------------------------
# Sums with a rational top coefficient and a real linear coefficient


@dataclass(frozen=True)
class RationalTopReport:
    main_term: float  # floor(N/q) |T(a1, b; q)|
    direct: complex
    measured_error: float  # |direct| - main_term
    budget: float
    V: float

    @property
    def ok(self) -> bool:
        return abs(self.measured_error) <= self.budget


def linear_phases(n: np.ndarray, y: float) -> np.ndarray:
    """n*y mod 2*pi for integer n, exact for the float y."""
    hi, lo = int_times_phase(n, DDPhase(float(y)))
    return reduce_2pi(hi, lo)


def top_sum_direct(a1: int, q: int, k: int, y: float, M: int, N: int, chunk: int = 1 << 20) -> complex:
    total = 0j
    top = RationalPhase(a1, q)
    for start in range(M + 1, M + N + 1, chunk):
        n = np.arange(start, min(M + N + 1, start + chunk), dtype=np.int64)
        total += complex(np.sum(np.exp(1j * (power_phases(n, k, top) + linear_phases(n, y)))))
    return total


def prop_budget(q: int, N: int, V: float, C: float) -> float:
    rq, lq = math.sqrt(q), math.log(q)
    return C * (N * V * ((N // q) * rq + rq * lq) + rq * lq)


def rational_top_sum(a1: int, b: int, q: int, k: int, y: float, M: int, N: int) -> RationalTopReport:
    """Split sum_{M<n<=M+N} e(2 pi a1 n^k / q + y n) into full periods plus an error."""
    _require_prime(q)
    if a1 % q == 0:
        raise ValueError("a1 must be nonzero mod q")
    d = (y - 2 * math.pi * b / q) % (2 * math.pi)
    V = min(d, 2 * math.pi - d)
    main = (N // q) * abs(naive_sum(k, a1, b, q))
    direct = top_sum_direct(a1, q, k, y, M, N)
    return RationalTopReport(main, direct, abs(direct) - main, prop_budget(q, N, V, audit.TOP_SUM_C), V)
