"""Extended-precision phase reduction.

Large phases such as m**k * w are reduced mod 2*pi in double-double arithmetic
(vectorised over m); per-point scalars (coordinates, times, rescalings) are
carried as mpmath numbers at a fixed working precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

MP_DPS = 60

# 2*pi split into three doubles.
_TWO_PI = (6.283185307179586, 2.4492935982947064e-16, -5.989539619436679e-33)
TWO_PI = 2.0 * np.pi

# Beyond this magnitude a double-double product no longer resolves the phase to 1e-12.
SAFE_PHASE_LIMIT = 1e19

_SPLITTER = 134217729.0  # 2**27 + 1


class PrecisionLossError(ArithmeticError):
    """A phase argument is too large to be reduced reliably."""


@dataclass(frozen=True)
class RationalPhase:
    """The phase 2*pi*a/q, kept exact so that m**k * phase reduces by integer arithmetic."""

    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")
        object.__setattr__(self, "a", int(self.a) % int(self.q))
        object.__setattr__(self, "q", int(self.q))

    @property
    def value(self) -> float:
        return TWO_PI * self.a / self.q

    def as_mp(self):
        with mp.workdps(MP_DPS):
            return 2 * mp.pi * mp.mpf(self.a) / self.q


@dataclass(frozen=True)
class DDPhase:
    """A phase w = hi + lo with |lo| <= ulp(hi)/2."""

    hi: float
    lo: float = 0.0

    @classmethod
    def from_mp(cls, x) -> "DDPhase":
        with mp.workdps(MP_DPS):
            hi = float(x)
            lo = float(x - mp.mpf(hi))
        return cls(hi, lo)


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def int_times_phase(m: np.ndarray, w: DDPhase) -> tuple[np.ndarray, np.ndarray]:
    """Double-double product of exact integers m (int64) with w."""
    m = np.asarray(m, dtype=np.int64)
    mh = m.astype(np.float64)
    ml = (m - mh.astype(np.int64)).astype(np.float64)  # exact remainder
    p, e = _two_prod(mh, np.float64(w.hi))
    e = e + (mh * w.lo + ml * w.hi) + ml * w.lo
    return _two_sum(p, e)


def reduce_2pi(hi: np.ndarray, lo: np.ndarray | float = 0.0) -> np.ndarray:
    """(hi + lo) mod 2*pi in [0, 2*pi) for double-double input."""
    hi = np.asarray(hi, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    for _ in range(2):
        n = np.round(hi / _TWO_PI[0])
        p0, e0 = _two_prod(n, _TWO_PI[0])
        r, e = _two_sum(hi, -p0)
        e = e - e0 + lo - n * _TWO_PI[1] - n * _TWO_PI[2]
        hi, lo = _two_sum(r, e)
    out = np.mod(hi + lo, TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


def power_phases(m: np.ndarray, k: int, w) -> np.ndarray:
    """m**k * w mod 2*pi for integer m and w given as float, DDPhase or RationalPhase."""
    m = np.asarray(m, dtype=np.int64)
    if isinstance(w, RationalPhase):
        r = np.mod(m, w.q)
        acc = r.copy()
        for _ in range(k - 1):
            acc = acc * r % w.q
        return TWO_PI * ((w.a * acc) % w.q) / w.q
    if not isinstance(w, DDPhase):
        w = DDPhase(float(w))
    if m.size == 0:
        return np.zeros(0)
    mmax = int(np.max(np.abs(m)))
    if mmax**k >= 2**62:
        raise PrecisionLossError(f"m**k overflows the exact integer range (m up to {mmax}, k={k})")
    if float(mmax) ** k * abs(w.hi) > SAFE_PHASE_LIMIT:
        raise PrecisionLossError(
            f"m**k*|w| = {float(mmax) ** k * abs(w.hi):.3e} exceeds the safe range {SAFE_PHASE_LIMIT:.0e}"
        )
    mk = m.copy()
    for _ in range(k - 1):
        mk = mk * m
    hi, lo = int_times_phase(mk, w)
    return reduce_2pi(hi, lo)


def mp_mod_2pi(x) -> float:
    """Reduce an mpmath (or exact) scalar mod 2*pi and return a float in [0, 2*pi)."""
    with mp.workdps(MP_DPS):
        x = to_mp(x)
        two_pi = 2 * mp.pi
        r = x - two_pi * mp.floor(x / two_pi)
        out = float(r)
    return 0.0 if out >= TWO_PI else out


def to_mp(x):
    with mp.workdps(MP_DPS):
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        if isinstance(x, str):
            return mp.mpf(x)
        return mp.mpf(x)


def mp_str(x) -> str:
    """Round-trippable decimal string for an extended-precision scalar."""
    with mp.workdps(MP_DPS):
        return mp.nstr(to_mp(x), MP_DPS, strip_zeros=False)
