"""The data function, its evolution under exp(it(-Delta)^{k/2}), and the reduction checks.

f(x) = phi(S1 x1) e(R x1) Phi(x') sum_{R/L <= m_j < 2R/L} e(L m . x'),  e(t) = exp(i t).

The evolution factorises into a one-dimensional integral in the first
coordinate and, for each j >= 2, an integral against phi_hat of a mode sum.
Scalars that multiply huge frequencies (coordinates, times, R, L) are carried
in mpmath; per-mode phases are reduced with exact integers or double-double.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from numpy.polynomial.legendre import leggauss

from . import audit
from .bump import BumpProfile, build_bump, delta0_for
from .modular import Q0
from .precision import MP_DPS, DDPhase, RationalPhase, mp_mod_2pi, power_phases, to_mp
from .expsum import linear_phases

_CHUNK = 1 << 14
_LAMBDA_ATOL = 1e-14  # about 100 ulps of the integral of |phi_hat|


class ConstraintViolation(ValueError):
    """A parameter or space-time constraint failed; `name` identifies which one."""

    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.name = name
        self.detail = detail


class QuadratureBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Constants:
    c0: float = 0.1
    c1: float = 0.01
    c2: float = 0.4
    c3: float = 0.01
    c4: float = 1 / 32
    c5: float = 1 / 32


@dataclass(frozen=True)
class CounterexampleParams:
    """Scales of the construction. `ratio` is R/L; R = L * ratio is kept exact."""

    n: int
    k: int
    L: float
    ratio: float
    S1: float
    Q: int
    constants: Constants = field(default_factory=Constants)
    delta0: float = 0.4990234375
    mode: str = "desk"

    # -- constructors ------------------------------------------------------

    @classmethod
    def desk(
        cls,
        n: int,
        k: int,
        Q: int,
        ratio: int,
        S1: float,
        constants: Constants | None = None,
        L: float | None = None,
        delta0: float | None = None,
        profile: BumpProfile | None = None,
    ) -> "CounterexampleParams":
        """Independent knobs for R/L, S1 and Q. By default L is chosen so that the
        first rescaling factor is 5*pi/c1, enough for every y1 to have a preimage."""
        constants = constants or Constants()
        if delta0 is None:
            delta0 = delta0_for(constants.c0, profile or build_bump())
        if L is None:
            L = 5 * math.pi * k * float(ratio) ** (k - 1) / constants.c1
        return cls(n, k, float(L), float(ratio), float(S1), int(Q), constants, float(delta0), "desk")

    @classmethod
    def power_law(
        cls,
        n: int,
        k: int,
        R: float,
        lam: float,
        kappa: float,
        sigma: float,
        constants: Constants | None = None,
        delta0: float | None = None,
        profile: BumpProfile | None = None,
    ) -> "CounterexampleParams":
        """L = R^lam, Q = R^kappa (rounded), S1 = R^sigma."""
        constants = constants or Constants()
        if delta0 is None:
            delta0 = delta0_for(constants.c0, profile or build_bump())
        L = R**lam
        return cls(n, k, L, R / L, R**sigma, int(round(R**kappa)), constants, float(delta0), "power")

    # -- derived quantities ------------------------------------------------

    @property
    def R_mp(self):
        with mp.workdps(MP_DPS):
            return mp.mpf(self.L) * mp.mpf(self.ratio)

    @property
    def R(self) -> float:
        return float(self.R_mp)

    @property
    def m_lo(self) -> int:
        return math.ceil(self.ratio)

    @property
    def m_hi(self) -> int:
        """Exclusive upper end of the mode range, the first integer >= 2R/L."""
        return math.ceil(2 * self.ratio)

    @property
    def R_prime(self) -> int:
        return self.m_hi - 1

    @property
    def Delta0(self) -> float:
        return math.log(self.ratio) / math.log(self.Q) - 1

    @property
    def scale(self) -> float:
        """(R / (L Q^{1/2}))^{n-1}."""
        return (self.ratio / math.sqrt(self.Q)) ** (self.n - 1)

    @property
    def M1(self):
        """Rescaling L^k / (k R^{k-1}) of the first coordinate."""
        with mp.workdps(MP_DPS):
            return mp.mpf(self.L) ** self.k / (self.k * self.R_mp ** (self.k - 1))

    @property
    def M2(self):
        with mp.workdps(MP_DPS):
            return mp.mpf(self.L)

    @property
    def tau_max(self):
        c = self.constants
        with mp.workdps(MP_DPS):
            return c.c2 * self.delta0 / (self.k * self.S1 * self.R_mp ** (self.k - 1))

    @property
    def t_max(self):
        with mp.workdps(MP_DPS):
            return self.constants.c3 / (self.R_mp ** (self.k - 2) * mp.mpf(self.S1) ** 2)

    def with_constants(self, **kw) -> "CounterexampleParams":
        return replace(self, constants=replace(self.constants, **kw))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["R"] = self.R
        d["Delta0"] = self.Delta0
        return d

    # -- admissibility -----------------------------------------------------

    def violations(self) -> list[ConstraintViolation]:
        c, n, k = self.constants, self.n, self.k
        out = []

        def need(ok: bool, name: str, detail: str):
            if not ok:
                out.append(ConstraintViolation(name, detail))

        need(n >= 2 and k >= 2, "dims", f"need n >= 2 and k >= 2, got n={n}, k={k}")
        need(0 < c.c0 < 1, "c0", "c0 must lie in (0, 1)")
        need(c.c1 > 0 and c.c3 > 0, "c1_c3", "c1 and c3 must be positive")
        need(0 < c.c2 < 0.5, "c2", "c2 must lie in (0, 1/2)")
        need(0 < c.c4 < 1 / 16 and 0 < c.c5 < 1 / 16, "c4_c5", "c4 and c5 must lie in (0, 1/16)")
        need(self.L >= 4, "mode_separation", f"L = {self.L} < 4")
        need(self.Q > max(32 * k * k, Q0), "Q_size", f"Q = {self.Q} must exceed max(32k^2, {Q0})")
        need(self.ratio >= 1, "ratio", "R/L must be at least 1")
        if self.ratio > 1 and self.Q > 1:
            D = self.Delta0
            need(D > 0, "prime_scale", f"R/L = {self.ratio} must exceed Q^(1+Delta0) with Delta0 > 0 (Delta0 = {D:.4f})")
            need(D <= 1 / (n - 1) + 1e-12, "box_scale", f"R/L exceeds Q^(1+1/(n-1)); Delta0 = {D:.4f}")
        with mp.workdps(MP_DPS):
            R = self.R_mp
            tw = mp.mpf(self.L) ** k / (self.S1 * R ** (k - 1))
            need(tw >= mp.mpf(1) / self.Q, "time_window", f"L^k/(S1 R^(k-1)) = {mp.nstr(tw, 5)} < 1/Q")
            need(1 <= self.S1 <= mp.sqrt(R), "sigma_max", f"S1 = {self.S1} must lie in [1, R^(1/2)]")
            need(self.M1 * c.c1 > 2 * mp.pi, "rescale", f"M1 c1 = {mp.nstr(self.M1 * c.c1, 5)} <= 2 pi")
            need(self.L * c.c1 > 2 * math.pi, "rescale", f"L c1 = {self.L * c.c1:.4g} <= 2 pi")
            t_hi = (c.c1 + c.c2 * self.delta0 / self.S1) / (k * R ** (k - 1))
            need(t_hi <= self.t_max, "t_size", "the time window exceeds c3 / (R^(k-2) S1^2)")
        need(2 * c.c4 < c.c2 * self.delta0 / k, "t_shift", f"2 c4 = {2 * c.c4:.4g} >= c2 delta0 / k = {c.c2 * self.delta0 / k:.4g}")
        drift = c.c1 + 2 ** (k - 1) * (c.c1 + c.c2 * self.delta0 / self.S1)
        need(drift <= self.delta0, "xj_small", f"c1 + 2^(k-1)(c1 + c2 delta0/S1) = {drift:.4g} > delta0")
        return out

    def check(self) -> "CounterexampleParams":
        v = self.violations()
        if v:
            raise v[0]
        return self


# ---------------------------------------------------------------------------
# Norms


def l2_norm(params: CounterexampleParams, profile: BumpProfile | None = None) -> float:
    """||f||_2 = S1^{-1/2} (R/L)^{(n-1)/2} ||phi||_2^n (modes are orthogonal once L >= 4)."""
    if params.L < 4:
        raise ConstraintViolation("mode_separation", f"L = {params.L} < 4; modes overlap")
    profile = profile or build_bump()
    return params.S1**-0.5 * params.ratio ** ((params.n - 1) / 2) * profile.l2_norm**params.n


def hs_ratio_bounds(R: float, s: float, n: int, C: float | None = None) -> tuple[float, float]:
    """||f||_{H^s}/||f||_2 for f_hat supported in C^{-1} R <= |xi| <= C R."""
    C = 4 * math.sqrt(n) if C is None else C
    return (1 + (R / C) ** 2) ** (s / 2), (1 + (C * R) ** 2) ** (s / 2)


# ---------------------------------------------------------------------------
# Mode sums


def one_dim_sum(u: float, y: float, w, m_lo: float, k: int) -> complex:
    """sum_{m_lo <= m < u} e(m y + m^k w).

    w may be a float, a DDPhase or a RationalPhase (then the top phase is exact).
    """
    lo, hi = math.ceil(m_lo), math.ceil(u)
    total = 0j
    for s in range(lo, hi, _CHUNK):
        m = np.arange(s, min(hi, s + _CHUNK), dtype=np.int64)
        total += complex(np.sum(np.exp(1j * (linear_phases(m, y) + power_phases(m, k, w)))))
    return total


def _top_phase(t, params: CounterexampleParams, top: RationalPhase | None):
    """The phase L^k t mod 2 pi, exact when the caller supplies its rational value."""
    with mp.workdps(MP_DPS):
        theta = mp.mpf(params.L) ** params.k * to_mp(t)
        if top is None:
            r = theta - 2 * mp.pi * mp.floor(theta / (2 * mp.pi))
            return DDPhase.from_mp(r)
        gap = theta - top.as_mp()
        gap = gap - 2 * mp.pi * mp.nint(gap / (2 * mp.pi))
        if abs(gap) > mp.mpf(10) ** (-(MP_DPS // 2)):
            raise ValueError(f"L^k t differs from 2 pi {top.a}/{top.q} mod 2 pi by {mp.nstr(gap, 5)}")
        return top


def rescaled_coordinate(x, M) -> float:
    with mp.workdps(MP_DPS):
        return mp_mod_2pi(to_mp(x) * M)


def full_sum(x_prime: Sequence, t, params: CounterexampleParams, top: RationalPhase | None = None) -> complex:
    """prod_{j>=2} S(2R/L; x_j, t) with y_j = L x_j and the top phase L^k t."""
    w = _top_phase(t, params, top)
    out = 1 + 0j
    for xj in x_prime:
        yj = rescaled_coordinate(xj, params.M2)
        out *= one_dim_sum(2 * params.ratio, yj, w, params.ratio, params.k)
    return out


def partial_sums(x_prime: Sequence, t, params, top=None, us: Sequence[float] = ()) -> np.ndarray:
    """S(u; x_j, t) for each u in us and each coordinate, shape (len(x_prime), len(us))."""
    w = _top_phase(t, params, top)
    out = np.empty((len(x_prime), len(us)), dtype=complex)
    for i, xj in enumerate(x_prime):
        yj = rescaled_coordinate(xj, params.M2)
        for a, u in enumerate(us):
            out[i, a] = one_dim_sum(u, yj, w, params.ratio, params.k)
    return out


# ---------------------------------------------------------------------------
# Quadrature


def adaptive_gl(
    integrand: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    order: int,
    tol: float = 1e-10,
    max_order: int | None = None,
    rule: Callable[[int], tuple[np.ndarray, np.ndarray]] | None = None,
    atol: float | None = None,
) -> complex:
    """Gauss-Legendre with order doubling until two successive orders agree.

    rule(order) may supply (nodes, weights) in place of the plain rule on [a, b].
    Agreement means |change| <= max(tol |value|, atol); atol defaults to tol
    times the integral of |integrand|.
    """
    max_order = max_order or 16 * order
    prev = None
    while order <= max_order:
        if rule is None:
            u, w = leggauss(order)
            xs, ws = (b - a) / 2 * u + (a + b) / 2, w * (b - a) / 2
        else:
            xs, ws = rule(order)
        vals = integrand(xs)
        val = complex(np.sum(ws * vals))
        floor = tol * float(np.sum(np.abs(ws * vals))) if atol is None else atol
        if prev is not None and abs(val - prev) <= max(tol * abs(val), floor, 1e-300):
            return val
        prev = val
        order *= 2
    raise QuadratureBudgetError(f"quadrature did not converge by order {max_order}")


def oscillation_budget(t, params: CounterexampleParams) -> tuple[float, float]:
    """k 2^k R^{k-1} S1 |t| and k (2R)^{k-1} |t|: phase growth per unit of the integration variable."""
    k = params.k
    with mp.workdps(MP_DPS):
        t = abs(to_mp(t))
        R = params.R_mp
        return float(k * 2**k * R ** (k - 1) * params.S1 * t), float(k * (2 * R) ** (k - 1) * t)


def _lambda_factor(x1, t, params: CounterexampleParams, profile: BumpProfile, order: int, tol: float) -> complex:
    k, S1 = params.k, params.S1
    with mp.workdps(MP_DPS):
        x1, t, R = to_mp(x1), to_mp(t), params.R_mp
        const = mp_mod_2pi(R * x1 + R**k * t)
        beta = [float(S1 * (x1 + k * R ** (k - 1) * t))]
        beta += [float(mp.binomial(k, l) * R ** (k - l) * mp.mpf(S1) ** l * t) for l in range(2, k + 1)]

    def g(lam):
        ph = sum(b * lam ** (i + 1) for i, b in enumerate(beta))
        return np.exp(1j * ph)

    # one-dimensional and cheap, so converge relative to the value itself
    h = profile.hat_support
    val = adaptive_gl(g, -h, h, order, tol, rule=profile.hat_rule, atol=_LAMBDA_ATOL)
    return complex(np.exp(1j * const)) * val / (2 * math.pi)


def _mode_factor(xj, w, t, params: CounterexampleParams, profile: BumpProfile, order: int, tol: float) -> complex:
    k = params.k
    with mp.workdps(MP_DPS):
        xj_mp, t_mp = to_mp(xj), to_mp(t)
        yj = mp_mod_2pi(params.M2 * xj_mp)
        coef = [float(mp.binomial(k, l) * mp.mpf(params.L) ** (k - l) * t_mp) for l in range(1, k + 1)]
        xjf = float(xj_mp)
    m = np.arange(params.m_lo, params.m_hi, dtype=np.int64)
    base = linear_phases(m, yj) + power_phases(m, k, w)
    mf = m.astype(np.float64)
    gam = [c * mf ** (k - l) for l, c in zip(range(1, k + 1), coef)]

    def g(xi):
        acc = np.zeros(len(xi), dtype=complex)
        for s in range(0, len(m), _CHUNK):
            sl = slice(s, s + _CHUNK)
            ph = base[sl][None, :] + sum(gm[sl][None, :] * xi[:, None] ** (i + 1) for i, gm in enumerate(gam))
            acc += np.exp(1j * ph).sum(axis=1)
        return np.exp(1j * xi * xjf) * acc

    h = profile.hat_support
    return adaptive_gl(g, -h, h, order, tol, rule=profile.hat_rule) / (2 * math.pi)


def evaluate_Ttf(
    x: Sequence,
    t,
    params: CounterexampleParams,
    profile: BumpProfile | None = None,
    quad_order: int = 64,
    top: RationalPhase | None = None,
    tol: float = 1e-10,
) -> complex:
    """T_t f(x) through the factorised frequency integrals."""
    if quad_order < 64:
        raise ValueError("quad_order must be at least 64")
    profile = profile or build_bump()
    b1, b2 = oscillation_budget(t, params)
    if max(b1, b2) >= quad_order / 10:
        raise QuadratureBudgetError(f"oscillation {max(b1, b2):.3g} per unit exceeds quad_order/10 = {quad_order / 10}")
    w = _top_phase(t, params, top)
    out = _lambda_factor(x[0], t, params, profile, quad_order, tol)
    for xj in x[1:]:
        out *= _mode_factor(xj, w, t, params, profile, quad_order, tol)
    return out


def f_value(x: Sequence, params: CounterexampleParams, profile: BumpProfile | None = None) -> complex:
    """The data function evaluated directly in physical space."""
    profile = profile or build_bump()
    with mp.workdps(MP_DPS):
        x = [to_mp(v) for v in x]
        const = mp_mod_2pi(params.R_mp * x[0])
        out = complex(profile.phi(float(params.S1 * x[0]))) * complex(np.exp(1j * const))
    for xj in x[1:]:
        yj = rescaled_coordinate(xj, params.M2)
        out *= complex(profile.phi(float(xj))) * one_dim_sum(params.m_hi, yj, 0.0, params.m_lo, params.k)
    return out


# ---------------------------------------------------------------------------
# Reduction check


@dataclass
class ReductionReport:
    Ttf: float  # |T_t f(x)|
    S: float  # |full_sum|
    weights: list[float]  # phi at the shifted arguments
    lower: float  # (1 - c0)^n |S|
    budget: float
    measured_E1: float  # |T_t f| - prod(weights) |S|
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def time_checks(x: Sequence, t, params: CounterexampleParams) -> list[ConstraintViolation]:
    """The space-time conditions under which the reduction is claimed."""
    c, k = params.constants, params.k
    out = []
    with mp.workdps(MP_DPS):
        x1, t = to_mp(x[0]), to_mp(t)
        R = params.R_mp
        if not (-c.c1 < x1 <= -c.c1 / 2):
            out.append(ConstraintViolation("x1_window", f"x1 = {mp.nstr(x1, 6)} not in (-c1, -c1/2]"))
        if not (0 < t < 1):
            out.append(ConstraintViolation("t_range", "t must lie in (0, 1)"))
        tau = t + x1 / (k * R ** (k - 1))
        if abs(tau) > params.tau_max:
            out.append(ConstraintViolation("t_window", f"|tau| = {mp.nstr(abs(tau), 5)} > {mp.nstr(params.tau_max, 5)}"))
        if abs(t) > params.t_max:
            out.append(ConstraintViolation("t_size", f"|t| = {mp.nstr(t, 5)} > {mp.nstr(params.t_max, 5)}"))
        drift = k * (mp.mpf(params.L) * params.R_prime) ** (k - 1) * t
        for j, xj in enumerate(x[1:], start=2):
            v = abs(to_mp(xj) + drift)
            if v > params.delta0:
                out.append(ConstraintViolation("xj_small", f"|x_{j} + k (L R')^(k-1) t| = {mp.nstr(v, 5)} > delta0"))
    return out


def shifted_weights(x: Sequence, t, params: CounterexampleParams, profile: BumpProfile) -> list[float]:
    k = params.k
    with mp.workdps(MP_DPS):
        x = [to_mp(v) for v in x]
        t = to_mp(t)
        R = params.R_mp
        args = [params.S1 * (x[0] + k * R ** (k - 1) * t)]
        drift = k * (mp.mpf(params.L) * params.R_prime) ** (k - 1) * t
        args += [xj + drift for xj in x[1:]]
        return [float(profile.phi(float(a))) for a in args]


def verify_reduction(
    x: Sequence,
    t,
    params: CounterexampleParams,
    profile: BumpProfile | None = None,
    top: RationalPhase | None = None,
    quad_order: int = 64,
) -> ReductionReport:
    """Check |T_t f(x)| >= (1 - c0)^n |S| - C (c1 + c2 delta0)(R/(L Q^{1/2}))^{n-1}.

    Raises ConstraintViolation naming the first failed time or space condition.
    """
    profile = profile or build_bump()
    bad = time_checks(x, t, params)
    if bad:
        raise bad[0]
    c = params.constants
    T = abs(evaluate_Ttf(x, t, params, profile, quad_order, top))
    S = abs(full_sum(x[1:], t, params, top))
    wts = shifted_weights(x, t, params, profile)
    lower = (1 - c.c0) ** params.n * S
    budget = audit.E1_C * (c.c1 + c.c2 * params.delta0) * params.scale
    return ReductionReport(T, S, wts, lower, budget, T - float(np.prod(wts)) * S, T >= lower - budget)


def reports_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.12g}" if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Single-mode baseline


@dataclass
class BaselineReport:
    n: int
    k: int
    R: float
    S1: float
    mass: float  # measure of sampled x with |T_{t(x)} f(x)| >= 1/2
    norm: float  # ||f||_2
    ratio_proxy: float  # (mass / 2) / ||f||_2

    @property
    def ok(self) -> bool:
        return self.mass >= audit.BASELINE_MASS_MIN

    def to_dict(self) -> dict:
        return asdict(self) | {"ok": self.ok}


def _baseline_factors(x1: np.ndarray, xj: np.ndarray | None, k: int, R: float, S1: float, profile, order: int):
    """|lambda factor| and |mode factor| at t = -x1/(k R^{k-1}), constant phases dropped."""
    u, w = leggauss(order)
    h = profile.hat_support
    lam = h * u
    wt = h * w * profile.phi_hat(lam) / (2 * math.pi)
    # R^{k-l} S1^l t = -x1 S1^l R^{1-l} / k
    ph = sum(math.comb(k, l) * S1**l * R ** (1 - l) / k * np.outer(-x1, lam**l) for l in range(2, k + 1))
    F1 = np.abs(np.exp(1j * ph) @ wt) if k >= 2 else np.ones(len(x1))
    if xj is None:
        return F1, None
    # xi (x_j + k R^{k-1} t) + sum_{l>=2} C(k,l) R^{k-l} t xi^l, with k R^{k-1} t = -x1
    ph = np.multiply.outer(xj - x1, lam)
    for l in range(2, k + 1):
        ph = ph + math.comb(k, l) * R ** (1 - l) / k * np.multiply.outer(-x1 * np.ones_like(xj), lam**l)
    Fj = np.abs(np.exp(1j * ph) @ wt)
    return F1, Fj


def baseline_value(x: Sequence[float], k: int, R: float, S1: float, profile=None, order: int = 128) -> float:
    """|T_t f(x)| for the single-mode datum at the time t = -x1/(k R^{k-1}) (t = 0 when x1 = 0)."""
    profile = profile or build_bump()
    x = np.asarray(x, dtype=float)
    F1, _ = _baseline_factors(x[:1], None, k, R, S1, profile, order)
    out = float(F1[0])
    if len(x) > 1:
        _, Fj = _baseline_factors(x[:1], x[1:], k, R, S1, profile, order)
        out *= float(np.prod(Fj))
    return out


def baseline_quarter(n: int, k: int, R: float, profile=None, grid: int = 201, order: int = 128) -> BaselineReport:
    """Single-mode datum phi(S1 x1) e(R x1) prod phi(x_j) e(R x_j) with S1 = R^{1/2}.

    Samples x in the unit ball with x1 < 0 and measures where |T_{t(x)} f(x)| >= 1/2.
    """
    profile = profile or build_bump()
    S1 = math.sqrt(R)
    g = (np.arange(grid) + 0.5) / grid
    x1 = -g  # x1 in (-1, 0)
    cell = 1.0 / grid
    F1, _ = _baseline_factors(x1, None, k, R, S1, profile, order)
    if n == 1:
        mass = float(np.sum(F1 >= 0.5)) * cell
    else:
        if n != 2:
            raise ValueError("baseline sampling is implemented for n <= 2")
        x2 = 2 * g - 1
        X1, X2 = np.meshgrid(x1, x2, indexing="ij")
        _, Fj = _baseline_factors(X1, X2, k, R, S1, profile, order)
        val = F1[:, None] * Fj
        inside = X1**2 + X2**2 <= 1
        mass = float(np.sum((val >= 0.5) & inside)) * cell * (2 * cell)
    norm = S1**-0.5 * profile.l2_norm**n
    return BaselineReport(n, k, R, S1, mass, norm, 0.5 * mass / norm)
