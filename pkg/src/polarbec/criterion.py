"""Decay-exponent machinery: the sup-ratio test and the functional iteration.

A candidate function h on [0, 1] with h(0) = h(1) = 0 and h > 0 inside
certifies a polarization speed: if

    sup over xi in (0,1) of [h(xi^2) + h(2 xi - xi^2)] / (2 h(xi)) = r < 1

then the interior probability mass P(a < Z_n < b) decays like 2^(-n/mu)
with mu <= mu* = -1/log2(r).  The same doubling map drives a functional
iteration whose decay rate gives a direct numerical estimate of mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateFitError, InvalidCandidateError

ENDPOINT_TOL = 1e-12


def binary_entropy(p: float) -> float:
    """H2(p) in bits, with the limit value 0 at p in {0, 1}."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy domain is [0, 1], got {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    q = 1.0 - p
    return -(p * math.log2(p) + q * math.log2(q))


def binary_entropy_inv(y: float, tol: float = 1e-12) -> float:
    """The unique p in [0, 1/2] with H2(p) = y, by bisection."""
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"binary_entropy_inv domain is [0, 1], got {y!r}")
    # float H2 plateaus at 1.0 on a ~1e-8 wide interval around 1/2, so the
    # endpoints are returned exactly instead of bisected
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_section_max(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10
) -> tuple[float, float]:
    """Maximize a unimodal f on [a, b]; returns (argmax, value)."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
        else:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass(frozen=True)
class GridFunction:
    """Piecewise-linear function on [0, 1] given by samples at grid nodes."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if g.ndim != 1 or g.shape != v.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if g.size < 2 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing with >= 2 nodes")
        if g[0] != 0.0 or g[-1] != 1.0:
            raise ValueError("grid must cover [0, 1] endpoint to endpoint")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)


@dataclass(frozen=True)
class CandidateH:
    """Candidate decay function: built-in power family or a tabulated curve.

    The power family is h(xi) = (xi (1 - xi))**alpha with 0 < alpha < 1.
    """

    alpha: float | None = None
    table: GridFunction | None = None

    def __post_init__(self) -> None:
        if (self.alpha is None) == (self.table is None):
            raise ValueError("specify exactly one of alpha or table")
        if self.alpha is not None and not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    @classmethod
    def power(cls, alpha: float) -> "CandidateH":
        return cls(alpha=alpha)

    @classmethod
    def tabulated(cls, table: GridFunction) -> "CandidateH":
        return cls(table=table)

    def __call__(self, xi):
        if self.alpha is not None:
            x = np.asarray(xi, dtype=np.float64)
            out = (x * (1.0 - x)) ** self.alpha
            return out if out.ndim else float(out)
        return self.table(xi)


class SupRatio(NamedTuple):
    ratio: float
    argmax: float
    left_limit: float
    right_limit: float


def _ratio_at(h: CandidateH, xi):
    return (h(xi * xi) + h(2.0 * xi - xi * xi)) / (2.0 * h(xi))


def ratio_curve(h: CandidateH, grid_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Ratio samples on the open uniform grid xi = k/grid_size, 0 < k < grid_size."""
    xi = np.arange(1, grid_size) / grid_size
    hx = np.asarray(h(xi))
    if np.any(hx <= 0.0) or not np.all(np.isfinite(hx)):
        bad = xi[np.argmin(hx)]
        raise InvalidCandidateError(
            f"candidate must be positive on (0, 1); failed near xi={bad:.6g}"
        )
    for endpoint in (0.0, 1.0):
        if abs(float(h(endpoint))) > ENDPOINT_TOL:
            raise InvalidCandidateError(
                f"candidate must vanish at xi={endpoint}, got {float(h(endpoint)):.3g}"
            )
    return xi, (h(xi * xi) + h(2.0 * xi - xi * xi)) / (2.0 * hx)


def _quadratic_extrapolate(xs: np.ndarray, ys: np.ndarray, x0: float) -> float:
    # Lagrange through three points; the curves here are smooth near the ends.
    total = 0.0
    for i in range(3):
        term = ys[i]
        for k in range(3):
            if k != i:
                term *= (x0 - xs[k]) / (xs[i] - xs[k])
        total += term
    return total


def sup_ratio(h: CandidateH, grid_size: int = 4096) -> SupRatio:
    """Supremum of the one-step ratio over the open unit interval.

    Grid scan plus golden-section refinement around the grid argmax.  The
    endpoints are 0/0; the reported one-sided limits are quadratic
    extrapolations from the three nearest samples.
    """
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    xi, ratios = ratio_curve(h, grid_size)
    k = int(np.argmax(ratios))
    lo = xi[k - 1] if k > 0 else xi[0] / 2.0
    hi = xi[k + 1] if k + 1 < xi.size else 0.5 * (xi[-1] + 1.0)
    argmax, refined = golden_section_max(lambda x: float(_ratio_at(h, x)), lo, hi)
    best = max(refined, float(ratios[k]))
    if refined < ratios[k]:
        argmax = float(xi[k])
    return SupRatio(
        ratio=best,
        argmax=argmax,
        left_limit=_quadratic_extrapolate(xi[:3], ratios[:3], 0.0),
        right_limit=_quadratic_extrapolate(xi[-3:], ratios[-3:], 1.0),
    )


def mu_star_from_ratio(r: float) -> float:
    """Certified exponent mu* = -1/log2(r) for a contraction ratio r."""
    if r >= 1.0:
        raise ValueError(f"ratio must be below 1, got {r!r}")
    if r <= 2.0 ** -0.5:
        raise ValueError(
            f"ratio must exceed 2**-1/2 so that mu* > 2, got {r!r}"
        )
    return -1.0 / math.log2(r)


def iterate_g(
    a: float, b: float, n_steps: int, grid_size: int = 8192
) -> list[GridFunction]:
    """Functional iteration g_{k+1}(xi) = [g_k(xi^2) + g_k(2 xi - xi^2)] / 2.

    g_0 is the indicator of the open interval (a, b) sampled on a uniform
    grid; off-grid lookups interpolate linearly.  Returns g_0 .. g_n_steps.

    grid_size counts intervals, not nodes, so dyadic query points such as
    z0 = 0.5 fall exactly on grid nodes.
    """
    if not 0.0 < a < b < 1.0:
        raise ValueError("require 0 < a < b < 1")
    if grid_size < 4096:
        raise ValueError("grid_size must be at least 4096")
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    grid = np.linspace(0.0, 1.0, grid_size + 1)
    sq = grid * grid
    dbl = 2.0 * grid - sq
    values = ((grid > a) & (grid < b)).astype(np.float64)
    out = [GridFunction(grid, values)]
    for _ in range(n_steps):
        values = 0.5 * (
            np.interp(sq, grid, values) + np.interp(dbl, grid, values)
        )
        out.append(GridFunction(grid, values))
    return out


def estimate_mu(
    iterates: Sequence[GridFunction], z0: float, fit_fraction: float = 0.5
) -> float:
    """Decay exponent mu from a least-squares fit of -log2 g_n(z0) vs n.

    Only the trailing fit_fraction of the iterates enters the fit, skipping
    the transient where g_n still remembers the indicator shape.
    """
    if len(iterates) < 10:
        raise ValueError("need at least 10 iterates for a stable fit")
    ys = np.array([float(g(z0)) for g in iterates])
    start = int(len(ys) * (1.0 - fit_fraction))
    window = ys[start:]
    if np.any(window <= 0.0):
        raise DegenerateFitError(
            "interior mass underflowed to 0 inside the fit window"
        )
    ns = np.arange(start, len(ys), dtype=np.float64)
    neglog = -np.log2(window)
    slope = np.polyfit(ns, neglog, 1)[0]
    if slope <= 1e-12:
        raise DegenerateFitError(f"no usable decay, slope {slope:.3g}")
    return 1.0 / slope
