"""The bump profile phi = |psi_check|^2 and its Fourier transform.

Fourier convention: f_hat(xi) = int f(x) e^{-i x xi} dx and
f(x) = (2 pi)^{-1} int f_hat(xi) e^{i x xi} d xi.

psi is a smooth bump supported in |xi| < 1/4 with (2 pi)^{-1} int psi = 1, so
phi(0) = 1, phi >= 0 and phi_hat = (2 pi)^{-1} psi * psi is supported in
|xi| <= 1/2.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

CACHE_VERSION = 1
PSI_RADIUS = 0.25
HAT_SUPPORT = 2 * PSI_RADIUS
DEFAULT_RESOLUTION = 1024
DEFAULT_RANGE = 64.0
_GL_NODES = 256


def _psi_shape(xi: np.ndarray) -> np.ndarray:
    xi = np.asarray(xi, dtype=np.float64)
    u2 = (xi / PSI_RADIUS) ** 2
    out = np.zeros_like(xi)
    m = u2 < 1
    out[m] = np.exp(-1.0 / (1.0 - u2[m]))
    return out


@lru_cache(maxsize=1)
def _psi_rule() -> tuple[np.ndarray, np.ndarray, float]:
    u, w = leggauss(_GL_NODES)
    xi, w = u * PSI_RADIUS, w * PSI_RADIUS
    c = 2 * np.pi / float(np.sum(w * _psi_shape(xi)))
    return xi, w, c


def psi(xi) -> np.ndarray:
    _, _, c = _psi_rule()
    return c * _psi_shape(xi)


def psi_check(x) -> np.ndarray:
    """(2 pi)^{-1} int psi(xi) e^{i x xi} d xi (real, psi is even)."""
    xi, w, c = _psi_rule()
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(x)
    for s in range(0, len(x), 4096):
        blk = x[s : s + 4096]
        out[s : s + 4096] = (np.cos(np.outer(blk, xi)) @ (w * c * _psi_shape(xi))) / (2 * np.pi)
    return out


def phi_direct(x) -> np.ndarray:
    return psi_check(x) ** 2


def phi_hat_direct(xi) -> np.ndarray:
    """(2 pi)^{-1} (psi * psi)(xi) by Gauss-Legendre on the overlap of the supports."""
    xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    u, w = leggauss(_GL_NODES)
    lo = np.maximum(-PSI_RADIUS, xi - PSI_RADIUS)
    hi = np.minimum(PSI_RADIUS, xi + PSI_RADIUS)
    half = np.maximum(hi - lo, 0.0) / 2
    eta = (lo + hi)[:, None] / 2 + half[:, None] * u[None, :]
    vals = psi(eta) * psi(xi[:, None] - eta)
    return (vals @ w) * half / (2 * np.pi)


@dataclass
class BumpProfile:
    resolution: int
    X: float
    x_grid: np.ndarray
    phi_samples: np.ndarray
    xi_grid: np.ndarray
    phi_hat_samples: np.ndarray

    def __post_init__(self):
        self._phi = CubicSpline(self.x_grid, self.phi_samples)
        self._hat = CubicSpline(self.xi_grid, self.phi_hat_samples)
        self._rules: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def phi(self, x) -> np.ndarray:
        """phi from the table inside [-X, X], by direct quadrature outside."""
        x = np.asarray(x, dtype=np.float64)
        out = np.asarray(self._phi(x), dtype=np.float64)
        far = np.abs(x) > self.X
        if np.any(far):
            out = np.array(out, copy=True)
            out[far] = phi_direct(x[far])
        return out

    def phi_hat(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=np.float64)
        out = np.asarray(self._hat(xi), dtype=np.float64)
        return np.where(np.abs(xi) < HAT_SUPPORT, out, 0.0)

    def hat_rule(self, order: int) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes on the support of phi_hat with weights times phi_hat.

        phi_hat is evaluated by direct quadrature rather than from the spline, so
        integrals against it are not limited by the table's interpolation error.
        """
        rule = self._rules.get(order)
        if rule is None:
            u, w = leggauss(order)
            xs = HAT_SUPPORT * u
            rule = (xs, HAT_SUPPORT * w * phi_hat_direct(xs))
            self._rules[order] = rule
        return rule

    @property
    def hat_support(self) -> float:
        return HAT_SUPPORT

    @property
    def l2_norm(self) -> float:
        """||phi||_{L^2(R)}; the tail beyond X contributes below 1e-9."""
        h = 1.0 / self.resolution
        return math.sqrt(float(np.trapezoid(self.phi_samples**2, dx=h)))

    @property
    def hat_l1_norm(self) -> float:
        h = 1.0 / self.resolution
        return float(np.trapezoid(np.abs(self.phi_hat_samples), dx=h))

    @property
    def hat_l2_norm(self) -> float:
        h = 1.0 / self.resolution
        return math.sqrt(float(np.trapezoid(self.phi_hat_samples**2, dx=h)))

    def tail_sup(self, upto: float | None = None, samples: int = 4001) -> float:
        """Largest sampled |phi(x)| for X <= |x| <= upto."""
        upto = upto or 4 * self.X
        return float(np.max(phi_direct(np.linspace(self.X, upto, samples))))

    # -- cache -------------------------------------------------------------

    def _checksums(self) -> dict:
        return {
            name: hashlib.sha256(np.ascontiguousarray(getattr(self, name)).tobytes()).hexdigest()
            for name in ("phi_samples", "phi_hat_samples")
        }

    def save(self, path: str | Path) -> None:
        header = {
            "version": CACHE_VERSION,
            "resolution": self.resolution,
            "X": self.X,
            "checksums": self._checksums(),
        }
        with open(path, "wb") as fh:
            np.savez(
                fh,
                header=np.frombuffer(json.dumps(header, sort_keys=True).encode(), dtype=np.uint8),
                phi=self.phi_samples,
                phi_hat=self.phi_hat_samples,
            )

    @classmethod
    def load(cls, path: str | Path) -> "BumpProfile":
        with np.load(path) as data:
            header = json.loads(bytes(data["header"]).decode())
            phi, hat = data["phi"], data["phi_hat"]
        if header.get("version") != CACHE_VERSION:
            raise ValueError(f"bump cache version {header.get('version')} != {CACHE_VERSION}")
        r, X = int(header["resolution"]), float(header["X"])
        prof = cls(r, X, _x_grid(r, X), phi, _xi_grid(r), hat)
        if prof._checksums() != header["checksums"]:
            raise ValueError("bump cache checksum mismatch")
        return prof


def _x_grid(resolution: int, X: float) -> np.ndarray:
    return np.linspace(-X, X, int(round(2 * X * resolution)) + 1)


def _xi_grid(resolution: int) -> np.ndarray:
    return np.linspace(-1.0, 1.0, 2 * resolution + 1)


@lru_cache(maxsize=4)
def build_bump(resolution: int = DEFAULT_RESOLUTION, X: float = DEFAULT_RANGE) -> BumpProfile:
    """Tabulate phi on [-X, X] and phi_hat on [-1, 1] at `resolution` samples per unit."""
    if resolution < 256:
        raise ValueError("resolution must be at least 256 samples per unit")
    xg = _x_grid(resolution, X)
    half = xg[xg >= 0]
    vals = phi_direct(half)
    phi = np.concatenate([vals[:0:-1], vals])
    xig = _xi_grid(resolution)
    return BumpProfile(resolution, X, xg, phi, xig, phi_hat_direct(xig))


def delta0_for(c0: float, profile) -> float:
    """Largest grid point delta < 1/2 with phi(y) >= 1 - c0/2 for all grid |y| <= delta."""
    if not 0 < c0 < 1:
        raise ValueError("c0 must lie in (0, 1)")
    r = profile.resolution
    j = np.arange(0, int(math.ceil(r / 2)))
    y = j / r
    y = y[y < 0.5]
    vals = np.minimum(profile.phi(y), profile.phi(-y))
    bad = np.flatnonzero(vals < 1 - c0 / 2)
    last = (bad[0] - 1) if bad.size else len(y) - 1
    if last < 0:
        raise ValueError("phi drops below 1 - c0/2 at the origin")
    return float(y[last])
