"""Exponent bookkeeping for the parameter choice R, L = R^lam, Q = R^kappa, S1 = R^sigma.

The counterexample forces divergence for every Sobolev exponent below

    s(lam, kappa, sigma) = (n-1)/2 + sigma/2 - (kappa + lam)(n-1)/2,

so the best threshold comes from maximising s over the admissible polytope.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

INTERIOR_MARGIN = 1e-9
_FEAS_TOL = 1e-12


@dataclass(frozen=True)
class ExponentChoice:
    n: int
    k: int
    lam: Fraction
    kappa: Fraction
    sigma: Fraction
    s_star: Fraction
    slack: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "lambda": float(self.lam),
            "kappa": float(self.kappa),
            "sigma": float(self.sigma),
            "s_star": float(self.s_star),
            "s_star_exact": str(self.s_star),
            "slack": {k: float(v) for k, v in self.slack.items()},
        }


def _check(n: int, k: int) -> None:
    if n < 2 or k < 2:
        raise ValueError("need n >= 2 and k >= 2")


def objective(n: int, lam, kappa, sigma):
    exact = all(isinstance(v, (int, Fraction)) for v in (lam, kappa, sigma))
    half = Fraction(n - 1, 2) if exact else (n - 1) / 2
    return half + sigma / 2 - (kappa + lam) * half


def constraint_slacks(n: int, k: int, lam, kappa, sigma, delta0=None) -> dict:
    """Nonnegative slack means the constraint holds. delta0 defaults to its largest value 1/(n-1)."""
    delta0 = Fraction(1, n - 1) if delta0 is None else delta0
    return {
        "sigma_max": Fraction(1, 2) - sigma if isinstance(sigma, Fraction) else 0.5 - sigma,
        "time_window": k * lam + kappa - sigma - (k - 1),
        "mode_count": lam + kappa * Fraction(n, n - 1) - 1,
        "lam_floor": lam - Fraction(k - 1, k),
        "prime_scale": (1 - lam) - kappa * (1 + delta0),
    }


def solve_exponents(n: int, k: int) -> ExponentChoice:
    """Closed-form optimum: the time-window and mode-count constraints are active and sigma = 1/2."""
    _check(n, k)
    d = 2 * ((k - 1) * n + 1)
    sigma = Fraction(1, 2)
    lam = 1 - Fraction(n, d)
    kappa = Fraction(n - 1, d)
    s = Fraction(k * n, 2 * d)
    slack = constraint_slacks(n, k, lam, kappa, sigma)
    assert objective(n, lam, kappa, sigma) == s
    return ExponentChoice(n, k, lam, kappa, sigma, s, slack)


def threshold(n: int, k: int) -> Fraction:
    return solve_exponents(n, k).s_star


@dataclass(frozen=True)
class GridReport:
    n: int
    k: int
    step: float
    grid_max: float
    argmax: tuple[float, float, float]
    s_star: float

    @property
    def gap(self) -> float:
        return self.s_star - self.grid_max

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "step": self.step,
            "grid_max": self.grid_max,
            "grid_argmax": list(self.argmax),
            "s_star": self.s_star,
            "grid_gap": self.gap,
        }


def feasible_mask(n: int, k: int, lam, kappa, sigma) -> np.ndarray:
    """Admissibility on float grids. The prime-scale constraint needs some delta0 in (0, 1/(n-1)],
    which is possible exactly when kappa < 1 - lam."""
    return (
        (sigma > 0)
        & (sigma <= 0.5 + _FEAS_TOL)
        & (k * lam + kappa >= sigma + (k - 1) - _FEAS_TOL)
        & (lam + kappa * n / (n - 1) >= 1 - _FEAS_TOL)
        & (lam > (k - 1) / k + INTERIOR_MARGIN)
        & (lam < 1)
        & (kappa > 0)
        & (kappa < 1 - lam)
    )


def verify_optimality(n: int, k: int, step: float = 1e-3) -> GridReport:
    """Maximum of the objective over the grid points of the polytope.

    The objective is strictly decreasing in kappa, so for each (lam, sigma) on
    the grid only the smallest grid kappa meeting the lower-bound constraints can
    win. That candidate is then checked against the full constraint set.
    """
    _check(n, k)
    if step > 1e-3:
        raise ValueError("grid step must be at most 1e-3")
    m = int(round(1 / step))
    grid = np.arange(1, m) / m
    L, S = np.meshgrid(grid, grid, indexing="ij")
    need = np.maximum(S + (k - 1) - k * L, (1 - L) * (n - 1) / n)
    j = np.maximum(np.ceil((need - _FEAS_TOL) * m), 1)
    K = j / m
    ok = feasible_mask(n, k, L, K, S) & (j < m)
    if not ok.any():
        raise ValueError("no admissible grid point")
    val = np.where(ok, objective(n, L, K, S), -np.inf)
    i = int(np.argmax(val))
    arg = (float(L.flat[i]), float(K.flat[i]), float(S.flat[i]))
    return GridReport(n, k, step, float(val.flat[i]), arg, float(threshold(n, k)))
