"""Boxes around rational points with good complete sums, their union, and the map back to physical space.

A box for prime q and tuple a = (a1, ..., an) is centred at 2 pi a / q with
half-widths c4/q in the first coordinate and c5 q^{-1-1/(n-1)} in the others.
Boxes live in R^n; for the sizes allowed here no box meets a 2 pi translate of
another, so the same numbers describe the union on the torus.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

import mpmath as mp
import numpy as np
from scipy.stats import beta

from . import audit
from .counterexample import ConstraintViolation, CounterexampleParams, one_dim_sum, rescaled_coordinate
from .expsum import GoodSet, dilation_table, naive_sum
from .modular import Q0, prime_window
from .precision import MP_DPS, RationalPhase, mp_str, to_mp
from .sweep import union_measure

TWO_PI = 2 * math.pi
DEFAULT_CAP_2D = 200_000
DEFAULT_CAP_ND = 10_000
BRUTE_FORCE_CAP = 3000


class CapExceeded(RuntimeError):
    pass


class NoAdmissibleShift(ValueError):
    pass


@dataclass(frozen=True)
class OmegaSpec:
    Q: int
    n: int
    k: int
    c4: float = 1 / 32
    c5: float = 1 / 32

    def half_widths(self, q) -> np.ndarray:
        """Half-widths per coordinate, shape (..., n)."""
        q = np.asarray(q, dtype=np.float64)
        h1 = self.c4 / q
        hj = self.c5 * q ** (-1 - 1 / (self.n - 1))
        return np.stack([h1] + [hj] * (self.n - 1), axis=-1)

    def box_measure(self, q) -> np.ndarray:
        return np.prod(2 * self.half_widths(q), axis=-1)


class ExplicitBoxes:
    """A finite list of tuples for one prime."""

    def __init__(self, q: int, n: int, tuples: np.ndarray):
        self.q, self.n = q, n
        t = np.unique(np.asarray(tuples, dtype=np.int64).reshape(-1, n) % q, axis=0)
        self._tuples = t
        self._codes = np.sort(self._encode(t))
        self.cardinality = len(t)

    def _encode(self, t: np.ndarray) -> np.ndarray:
        code = np.zeros(len(t), dtype=np.int64)
        for j in range(self.n):
            code = code * self.q + t[:, j]
        return code

    def contains(self, tuples: np.ndarray) -> np.ndarray:
        t = np.atleast_2d(np.asarray(tuples, dtype=np.int64))
        codes = self._encode(t % self.q)
        pos = np.searchsorted(self._codes, codes)
        pos = np.minimum(pos, max(len(self._codes) - 1, 0))
        return (len(self._codes) > 0) & (self._codes[pos] == codes)

    def tuples(self) -> np.ndarray:
        return self._tuples

    def iter_tuples(self) -> Iterator[np.ndarray]:
        yield self._tuples

    def row_counts(self) -> np.ndarray:
        return np.bincount(self._tuples[:, 0], minlength=self.q)

    def row_tuples(self, a1: int) -> np.ndarray:
        return self._tuples[self._tuples[:, 0] == a1]


@dataclass(frozen=True)
class Box:
    q: int
    a: tuple[int, ...]
    center: tuple[float, ...]
    half_widths: tuple[float, ...]

    @property
    def measure(self) -> float:
        return float(np.prod(2 * np.array(self.half_widths)))


def _good_row_counts(gs: GoodSet) -> np.ndarray:
    counts = np.zeros(gs.q, dtype=np.int64)
    counts[1:] = gs.class_counts[gs.table.cls[1:]]
    return counts


@dataclass
class BoxSystem:
    spec: OmegaSpec
    primes: list[int]
    sources: dict  # q -> GoodSet or ExplicitBoxes
    domain: tuple | None = None  # (lo, hi) region known to contain every box; None means the whole torus

    @property
    def counts(self) -> dict[int, int]:
        return {q: int(self.sources[q].cardinality) for q in self.primes}

    @property
    def box_count(self) -> int:
        return sum(self.counts.values())

    @property
    def total_measure(self) -> float:
        """Sum of the box measures (no overlaps removed)."""
        return float(sum(c * self.spec.box_measure(q) for q, c in self.counts.items()))

    @property
    def measure_range(self) -> tuple[float, float]:
        qs = [q for q, c in self.counts.items() if c]
        m = self.spec.box_measure(np.array(qs))
        return float(m.min()), float(m.max())

    @property
    def count_spread(self) -> float:
        """max_q |G(q)| / min_q |G(q)| over the primes in the window."""
        c = [v for v in self.counts.values()]
        return max(c) / min(c) if min(c) else math.inf

    def contains(self, q: int, tuples: np.ndarray) -> np.ndarray:
        return self.sources[q].contains(tuples)

    def box(self, q: int, a: Sequence[int]) -> Box:
        if q not in self.sources or not self.contains(q, np.array([a]))[0]:
            raise KeyError(f"no box for q = {q}, a = {tuple(a)}")
        a = tuple(int(v) % q for v in a)
        return Box(q, a, tuple(TWO_PI * v / q for v in a), tuple(float(h) for h in self.spec.half_widths(q)))

    def iter_boxes(self) -> Iterator[tuple[int, np.ndarray]]:
        for q in self.primes:
            for t in self.sources[q].iter_tuples():
                if len(t):
                    yield q, t

    def materialize(self, cap: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """(q per box, tuples) for every box, refusing when there are more than cap."""
        if cap is not None and self.box_count > cap:
            raise CapExceeded(f"{self.box_count} boxes exceed the cap {cap}; use the Monte Carlo estimate")
        qs, ts = [], []
        for q, t in self.iter_boxes():
            qs.append(np.full(len(t), q, dtype=np.int64))
            ts.append(t)
        if not ts:
            return np.zeros(0, dtype=np.int64), np.zeros((0, self.spec.n), dtype=np.int64)
        return np.concatenate(qs), np.concatenate(ts)

    def restrict(self, keep) -> "BoxSystem":
        """Explicit subsystem of the boxes for which keep(q, tuples) is True."""
        src = {}
        for q in self.primes:
            parts = [t[keep(q, t)] for t in self.sources[q].iter_tuples() if len(t)]
            t = np.concatenate(parts) if parts else np.zeros((0, self.spec.n), dtype=np.int64)
            src[q] = ExplicitBoxes(q, self.spec.n, t)
        return BoxSystem(self.spec, list(self.primes), src)

    def window(self, lo: Sequence[float], hi: Sequence[float]) -> "BoxSystem":
        """Explicit subsystem of boxes whose centres lie in prod_j [lo_j, hi_j] (subsets of [0, 2 pi))."""
        src = {}
        for q in self.primes:
            ranges = [np.arange(math.ceil(l * q / TWO_PI), math.floor(h * q / TWO_PI) + 1) for l, h in zip(lo, hi)]
            ranges = [r[(r >= 0) & (r < q)] for r in ranges]
            grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1).reshape(-1, self.spec.n)
            src[q] = ExplicitBoxes(q, self.spec.n, grid[self.contains(q, grid)] if len(grid) else grid)
        pad = self.spec.half_widths(min(self.primes))
        dom = (tuple(float(v) for v in np.asarray(lo) - pad), tuple(float(v) for v in np.asarray(hi) + pad))
        if any(b - a >= TWO_PI for a, b in zip(*dom)):
            dom = None
        return BoxSystem(self.spec, list(self.primes), src, dom)

    def to_lines(self, limit: int | None = None) -> str:
        buf = io.StringIO()
        written = 0
        for q, t in self.iter_boxes():
            for row in t:
                if limit is not None and written >= limit:
                    return buf.getvalue()
                buf.write(" ".join(str(int(v)) for v in (q, *row)) + "\n")
                written += 1
        return buf.getvalue()

    @classmethod
    def from_lines(cls, spec: OmegaSpec, text: str) -> "BoxSystem":
        rows: dict[int, list] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals = [int(v) for v in line.split()]
            if len(vals) != spec.n + 1:
                raise ValueError(f"expected q and {spec.n} residues per line")
            rows.setdefault(vals[0], []).append(vals[1:])
        primes = sorted(rows)
        return cls(spec, primes, {q: ExplicitBoxes(q, spec.n, np.array(rows[q])) for q in primes})


def build_omega(Q: int, n: int, k: int, c4: float = 1 / 32, c5: float = 1 / 32, threads: int = 1) -> BoxSystem:
    """All boxes for primes q in [Q/2, Q] and tuples in the good set G*(q)."""
    if Q <= max(32 * k * k, Q0):
        raise ConstraintViolation("Q_size", f"Q = {Q} must exceed max(32k^2, {Q0})")
    if not (0 < c4 < 1 / 16 and 0 < c5 < 1 / 16):
        raise ConstraintViolation("c4_c5", "c4 and c5 must lie in (0, 1/16)")
    if n < 2:
        raise ValueError("n must be at least 2")
    spec = OmegaSpec(Q, n, k, c4, c5)
    win = prime_window(Q)

    def make(q: int) -> GoodSet:
        return GoodSet(k, n, q, dilation_table(k, q))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        sets = list(pool.map(make, win.primes))
    return BoxSystem(spec, list(win.primes), dict(zip(win.primes, sets)))


# ---------------------------------------------------------------------------
# Pairwise intersections


def _bound(q, qq, h, hh) -> np.ndarray:
    """Centres 2 pi a/q and 2 pi a'/q' are closer than h + h' iff |a q' - a' q| < q q' (h + h') / (2 pi)."""
    return np.asarray(q, dtype=np.float64) * qq * (h + hh) / TWO_PI


def _coords_meet(a, q, aa, qq, h, hh) -> np.ndarray:
    m = np.asarray(a, dtype=np.int64) * qq - np.asarray(aa, dtype=np.int64) * q
    return np.abs(m) < _bound(q, qq, h, hh)


@dataclass
class OverlapReport:
    boxes: int
    pairs: int  # ordered intersecting pairs, each box with itself included
    cross_pairs: int  # unordered pairs of distinct intersecting boxes
    C1: float
    participants: dict = field(default_factory=dict, repr=False)  # q -> tuples meeting another box

    def to_dict(self) -> dict:
        return {"boxes": self.boxes, "pairs": self.pairs, "cross_pairs": self.cross_pairs, "C1": self.C1}


def _candidate_solutions(q: int, qq: int, bound: float) -> tuple[np.ndarray, np.ndarray]:
    """All (a, a') with 0 <= a < q, 0 <= a' < q' and |a q' - a' q| < bound."""
    mmax = int(math.ceil(bound)) - 1 if bound == math.ceil(bound) else int(math.floor(bound))
    m = np.arange(-mmax, mmax + 1, dtype=np.int64)
    m = m[np.abs(m) < bound]
    inv = pow(qq, -1, q)
    a = (m % q) * inv % q
    num = a * qq - m
    aa = num // q
    ok = (num % q == 0) & (aa >= 0) & (aa < qq)
    return a[ok], aa[ok]


def _cross_pairs(system: BoxSystem, q: int, qq: int) -> tuple[np.ndarray, np.ndarray]:
    """Intersecting tuple pairs between primes q != q', by solving the linear conditions per coordinate."""
    spec = system.spec
    hq, hqq = spec.half_widths(q), spec.half_widths(qq)
    per = [_candidate_solutions(q, qq, float(_bound(q, qq, hq[j], hqq[j]))) for j in range(spec.n)]
    if any(len(p[0]) == 0 for p in per):
        return np.zeros((0, spec.n), np.int64), np.zeros((0, spec.n), np.int64)
    grids = np.meshgrid(*[np.arange(len(p[0])) for p in per], indexing="ij")
    idx = [g.ravel() for g in grids]
    A = np.column_stack([per[j][0][idx[j]] for j in range(spec.n)])
    AA = np.column_stack([per[j][1][idx[j]] for j in range(spec.n)])
    ok = system.contains(q, A) & system.contains(qq, AA)
    return A[ok], AA[ok]


def overlap_census(system: BoxSystem) -> OverlapReport:
    """Count intersecting pairs arithmetically: distinct boxes for one prime never meet,
    and across primes each coordinate reduces to |a q' - a' q| < bound."""
    spec = system.spec
    for q in system.primes:
        if np.any(_bound(q, q, spec.half_widths(q), spec.half_widths(q)) >= q):
            raise ValueError("boxes are too wide for the same-prime separation argument")
    cross = 0
    part: dict[int, list] = {q: [] for q in system.primes}
    active = [q for q in system.primes if system.sources[q].cardinality]
    for i, q in enumerate(active):
        for qq in active[i + 1 :]:
            A, AA = _cross_pairs(system, q, qq)
            if len(A):
                cross += len(A)
                part[q].append(A)
                part[qq].append(AA)
    boxes = system.box_count
    participants = {q: np.unique(np.concatenate(v), axis=0) for q, v in part.items() if v}
    pairs = boxes + 2 * cross
    return OverlapReport(boxes, pairs, cross, pairs / boxes if boxes else math.nan, participants)


def overlap_census_bruteforce(system: BoxSystem, cap: int = BRUTE_FORCE_CAP) -> OverlapReport:
    """Reference census testing every pair of boxes directly."""
    qs, ts = system.materialize(cap)
    h = system.spec.half_widths(qs)
    N = len(qs)
    cross = 0
    for i in range(N):
        j = np.arange(i + 1, N)
        meet = np.ones(len(j), dtype=bool)
        for c in range(system.spec.n):
            meet &= _coords_meet(ts[i, c], qs[i], ts[j, c], qs[j], h[i, c], h[j, c])
        cross += int(np.count_nonzero(meet))
    pairs = N + 2 * cross
    return OverlapReport(N, pairs, cross, pairs / N if N else math.nan)


# ---------------------------------------------------------------------------
# Measure


def _box_bounds(spec: OmegaSpec, qs: np.ndarray, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    centre = TWO_PI * ts / qs[:, None]
    h = spec.half_widths(qs)
    return centre - h, centre + h


def union_measure_exact(system: BoxSystem, cap: int | None = None, census: OverlapReport | None = None) -> float:
    """Exact measure of the union.

    Boxes that meet no other box contribute their own measure; the rest are
    passed to a sweep. cap bounds the number of boxes in the sweep.
    """
    spec = system.spec
    if cap is None:
        cap = DEFAULT_CAP_2D if spec.n == 2 else DEFAULT_CAP_ND
    census = census or overlap_census(system)
    qs = [np.full(len(t), q, dtype=np.int64) for q, t in census.participants.items()]
    if not qs:
        return system.total_measure
    qs = np.concatenate(qs)
    if len(qs) > cap:
        raise CapExceeded(f"{len(qs)} overlapping boxes exceed the cap {cap}; use the Monte Carlo estimate")
    ts = np.concatenate(list(census.participants.values()))
    lo, hi = _box_bounds(spec, qs, ts)
    alone = system.total_measure - float(np.sum(spec.box_measure(qs)))
    return alone + union_measure(lo, hi)


def union_measure_sweep(system: BoxSystem, cap: int | None = None) -> float:
    """Plain sweep over every box, without the overlap decomposition."""
    spec = system.spec
    if cap is None:
        cap = DEFAULT_CAP_2D if spec.n == 2 else DEFAULT_CAP_ND
    qs, ts = system.materialize(cap)
    lo, hi = _box_bounds(spec, qs, ts)
    return union_measure(lo, hi)


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    ci: tuple[float, float]
    hits: int
    samples: int
    seed: int


def point_in_union(system: BoxSystem, y: np.ndarray) -> np.ndarray:
    """Membership of points of [0, 2 pi)^n, snapping each coordinate to the nearest a/q per prime."""
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    spec = system.spec
    hit = np.zeros(len(y), dtype=bool)
    for q in system.primes:
        if not system.sources[q].cardinality:
            continue
        h = spec.half_widths(q)
        a = np.rint(y * q / TWO_PI).astype(np.int64)
        d = y - TWO_PI * a / q
        near = np.all(np.abs(d) < h, axis=1) & ~hit
        if near.any():
            idx = np.flatnonzero(near)
            hit[idx] = system.contains(q, a[idx] % q)
    return hit


MC_CHUNK = 1 << 17


def union_measure_mc(
    system: BoxSystem, samples: int = 200_000, seed: int = 0, level: float = 0.99, threads: int = 1
) -> MCEstimate:
    """Hit-count estimate with a Clopper-Pearson interval.

    Samples are uniform on [0, 2 pi)^n, or on system.domain when the system
    records a smaller region containing all of its boxes. Each chunk of MC_CHUNK samples has its own generator spawned from seed, so the
    result does not depend on the thread count.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    n = system.spec.n
    if system.domain is None:
        lo, hi = np.zeros(n), np.full(n, TWO_PI)
    else:
        lo, hi = np.asarray(system.domain[0], dtype=float), np.asarray(system.domain[1], dtype=float)
    sizes = [min(MC_CHUNK, samples - s) for s in range(0, samples, MC_CHUNK)]
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(i: int) -> int:
        y = lo + (hi - lo) * np.random.default_rng(seqs[i]).random((sizes[i], n))
        return int(np.count_nonzero(point_in_union(system, y)))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        hits = sum(pool.map(run, range(len(sizes))))
    vol = float(np.prod(hi - lo))
    a = (1 - level) / 2
    lo = beta.ppf(a, hits, samples - hits + 1) if hits else 0.0
    hi = beta.ppf(1 - a, hits + 1, samples - hits) if hits < samples else 1.0
    return MCEstimate(vol * hits / samples, (vol * float(lo), vol * float(hi)), hits, samples, seed)


@dataclass
class MeasureReport:
    Q: int
    n: int
    k: int
    c4: float
    c5: float
    exact: float | None
    mc: float | None
    mc_ci: tuple | None
    boxes: int
    pairs: int
    C1: float
    total: float  # sum of box measures
    overlap_floor: float  # (B0 / (B1 C1)) * total
    count_spread: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mc_ci"] = list(self.mc_ci) if self.mc_ci else None
        return d


def measure_report(
    system: BoxSystem, mc_samples: int = 0, seed: int = 0, cap: int | None = None, threads: int = 1
) -> MeasureReport:
    census = overlap_census(system)
    try:
        exact = union_measure_exact(system, cap, census)
    except CapExceeded:
        exact = None
    mc = union_measure_mc(system, mc_samples, seed, threads=threads) if mc_samples else None
    B0, B1 = system.measure_range
    total = system.total_measure
    s = system.spec
    return MeasureReport(
        s.Q, s.n, s.k, s.c4, s.c5, exact,
        mc.estimate if mc else None, mc.ci if mc else None,
        census.boxes, census.pairs, census.C1, total, B0 / (B1 * census.C1) * total, system.count_spread,
    )


# ---------------------------------------------------------------------------
# Representatives in physical space


@dataclass
class OmegaPoint:
    q: int
    a: tuple[int, ...]
    y: tuple[float, ...]
    x: tuple  # mpmath scalars
    shifts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "a": list(self.a),
            "y": list(self.y),
            "x": [mp_str(v) for v in self.x],
            "shifts": list(self.shifts),
        }


def shift_counts(y: Sequence[float], params: CounterexampleParams) -> list[int]:
    """Number of admissible integer shifts per coordinate."""
    c1 = params.constants.c1
    with mp.workdps(MP_DPS):
        M1, L = params.M1, params.M2
        lo = mp.ceil((M1 * c1 / 2 - y[0]) / (2 * mp.pi))
        hi = mp.ceil((M1 * c1 - y[0]) / (2 * mp.pi))  # first excluded
        out = [int(hi - lo)]
        for yj in y[1:]:
            a = mp.ceil((-L * c1 - yj) / (2 * mp.pi))
            b = mp.floor((L * c1 - yj) / (2 * mp.pi))
            out.append(int(b - a + 1))
    return out


def _to_physical(y: Sequence[float], params: CounterexampleParams) -> tuple[tuple, tuple[int, ...]]:
    c1 = params.constants.c1
    with mp.workdps(MP_DPS):
        M1, L = params.M1, params.M2
        if M1 * c1 <= 2 * mp.pi or L * c1 <= 2 * mp.pi:
            raise NoAdmissibleShift(f"rescaling too small: M1 c1 = {mp.nstr(M1 * c1, 5)}, L c1 = {mp.nstr(L * c1, 5)}")
        lo = int(mp.ceil((M1 * c1 / 2 - y[0]) / (2 * mp.pi)))
        hi = int(mp.ceil((M1 * c1 - y[0]) / (2 * mp.pi))) - 1
        if hi < lo:
            raise NoAdmissibleShift(f"no shift puts x1 in (-c1, -c1/2] for M1 = {mp.nstr(M1, 6)}")
        K1 = (lo + hi) // 2
        x1 = -(mp.mpf(y[0]) + 2 * mp.pi * K1) / M1
        if not (-c1 < x1 <= -c1 / 2):
            raise NoAdmissibleShift(f"shift {K1} misses the x1 window for M1 = {mp.nstr(M1, 6)}")
        xs, shifts = [x1], [K1]
        for yj in y[1:]:
            K = 0 if yj <= math.pi else -1
            xs.append((mp.mpf(yj) + 2 * mp.pi * K) / L)
            shifts.append(K)
    return tuple(xs), tuple(shifts)


def _periodic_gap(a: float, b: float) -> float:
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def to_rescaled(x: Sequence, params: CounterexampleParams) -> tuple[float, ...]:
    """y1 = -M1 x1 mod 2 pi and y_j = L x_j mod 2 pi."""
    with mp.workdps(MP_DPS):
        y1 = rescaled_coordinate(-to_mp(x[0]), params.M1)
    return (y1,) + tuple(rescaled_coordinate(v, params.M2) for v in x[1:])


def sample_boxes(system: BoxSystem, count: int, seed: int = 0) -> list[tuple[int, np.ndarray]]:
    """Boxes drawn uniformly from the whole system (with replacement)."""
    rng = np.random.default_rng(seed)
    qs = np.array([q for q in system.primes if system.sources[q].cardinality])
    w = np.array([system.sources[q].cardinality for q in qs], dtype=np.float64)
    out = []
    for q in rng.choice(qs, size=count, p=w / w.sum()):
        q = int(q)
        src = system.sources[q]
        rows = _good_row_counts(src) if isinstance(src, GoodSet) else src.row_counts()
        a1 = int(rng.choice(q, p=rows / rows.sum()))
        cand = src.row_tuples(a1)
        out.append((q, cand[rng.integers(len(cand))]))
    return out


def map_to_omega_star(
    system: BoxSystem,
    params: CounterexampleParams,
    count: int,
    seed: int = 0,
    jitter: float = 0.0,
) -> list[OmegaPoint]:
    """Physical-space representatives of sampled boxes.

    jitter = 0 uses box centres; otherwise each coordinate moves uniformly by up
    to jitter times the half-width. The round trip x -> y is checked to 1e-12.
    """
    if not 0 <= jitter < 1:
        raise ValueError("jitter must lie in [0, 1)")
    rng = np.random.default_rng(seed + 1)
    out = []
    for q, a in sample_boxes(system, count, seed):
        centre = TWO_PI * a / q
        h = system.spec.half_widths(q)
        y = tuple(float(v) for v in centre + jitter * h * rng.uniform(-1, 1, size=len(a)))
        x, shifts = _to_physical(y, params)
        back = to_rescaled(x, params)
        gap = max(_periodic_gap(u, v) for u, v in zip(back, y))
        if gap > 1e-12:
            raise AssertionError(f"round trip error {gap:.3e}")
        out.append(OmegaPoint(q, tuple(int(v) for v in a), y, x, shifts))
    return out


@dataclass
class TimeChoice:
    t: object  # mpmath scalar
    tau: object
    s: float
    top: RationalPhase

    def to_dict(self) -> dict:
        return {"t": mp_str(self.t), "tau": mp_str(self.tau), "s": self.s, "top": [self.top.a, self.top.q]}


def choose_t(point: OmegaPoint, params: CounterexampleParams) -> TimeChoice:
    """t = -x1/(k R^{k-1}) + s/L^k with s = 2 pi a1/q - y1, so that L^k t = 2 pi a1/q mod 2 pi."""
    c, k = params.constants, params.k
    if not 2 * c.c4 < c.c2 * params.delta0 / k:
        raise ConstraintViolation("t_shift", "need 2 c4 < c2 delta0 / k")
    with mp.workdps(MP_DPS):
        s = 2 * mp.pi * point.a[0] / point.q - mp.mpf(point.y[0])
        if abs(s) >= mp.mpf(c.c4) / point.q:
            raise ConstraintViolation("y1_box", f"|s| = {mp.nstr(abs(s), 5)} >= c4/q; y1 is outside the box")
        tau = s / mp.mpf(params.L) ** k
        t = -point.x[0] / (k * params.R_mp ** (k - 1)) + tau
        if abs(tau) > params.tau_max:
            raise ConstraintViolation("t_window", f"|tau| = {mp.nstr(abs(tau), 5)} > {mp.nstr(params.tau_max, 5)}")
        if not 0 < t < 1:
            raise ConstraintViolation("t_range", "t must lie in (0, 1)")
        if t > params.t_max:
            raise ConstraintViolation("t_size", f"t = {mp.nstr(t, 5)} > {mp.nstr(params.t_max, 5)}")
        return TimeChoice(t, tau, float(s), RationalPhase(point.a[0], point.q))


@dataclass
class CoordinateCheck:
    S: complex
    main: complex  # floor((u - R/L)/q) T(a1, a_j; q)
    error: float
    budget: float

    @property
    def ok(self) -> bool:
        return self.error <= self.budget


@dataclass
class LowerBoundReport:
    S: float
    main: float  # floor(N/q)^{n-1} prod |T|
    floor: float  # 2^{-2(n-1)} (R/(L Q^{1/2}))^{n-1}
    E2_budget: float
    measured_E2: float  # |S| - main
    coordinates: list = field(default_factory=list)
    passed: bool = False
    E2_ratio: float = 0.0  # |measured_E2| / ((c5 + Q^{-Delta0/2}) (R/(L Q^{1/2}))^{n-1})

    @property
    def decomposition_ok(self) -> bool:
        return all(c.ok for c in self.coordinates)

    def to_dict(self) -> dict:
        return {
            "S": self.S,
            "main": self.main,
            "floor": self.floor,
            "E2_budget": self.E2_budget,
            "measured_E2": self.measured_E2,
            "E2_ratio": self.E2_ratio,
            "decomposition_ok": self.decomposition_ok,
            "passed": self.passed,
        }


def coordinate_budget(q: int, N: float, n: int, c5: float) -> float:
    V = c5 * q ** (-1 - 1 / (n - 1))
    rq, lq = math.sqrt(q), math.log(q)
    return audit.SJ_C * (N * V * (N / rq + rq * lq) + rq * lq)


def verify_lower_bound(point: OmegaPoint, choice: TimeChoice, params: CounterexampleParams) -> LowerBoundReport:
    """|S| against 2^{-2(n-1)} (R/(L Q^{1/2}))^{n-1} minus the frozen E2 budget, plus the
    per-coordinate full-period decomposition."""
    k, n, N = params.k, params.n, params.ratio
    q, a = point.q, point.a
    periods = math.floor(N / q)
    coords = []
    S = 1 + 0j
    main = 1.0
    for j, xj in enumerate(point.x[1:], start=1):
        yj = rescaled_coordinate(xj, params.M2)
        Sj = one_dim_sum(2 * N, yj, choice.top, N, k)
        T = naive_sum(k, a[0], a[j], q)
        coords.append(CoordinateCheck(Sj, periods * T, abs(Sj - periods * T), coordinate_budget(q, N, n, params.constants.c5)))
        S *= Sj
        main *= periods * abs(T)
    floor = 2.0 ** (-2 * (n - 1)) * params.scale
    unit = (params.constants.c5 + params.Q ** (-params.Delta0 / 2)) * params.scale
    rep = LowerBoundReport(abs(S), main, floor, audit.E2_C * unit, abs(S) - main, coords, E2_ratio=abs(abs(S) - main) / unit)
    rep.passed = abs(S) >= floor - rep.E2_budget
    return rep
