"""The achievable (error exponent, gap exponent) plane.

A point (beta_p, 1/mu_p) is achievable when

    (1 - pi) / (mu_p - mu_star * pi) + H2(beta_p * mu_p / (mu_p - mu_star * pi)) < 1

holds for every pi in [0, 1].  beta_p is the block-error exponent (error
probability 2**-2**(beta_p * n)) and 1/mu_p the gap exponent (gap to
capacity 2**(-n/mu_p)); mu_star is the certified polarization exponent.

The module also carries the interpolation curve parametrized by gamma, the
numeric checks behind its containment in the region, and the reference
boundary for mu_star = 3.627 used as regression data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .criterion import binary_entropy, binary_entropy_inv, golden_section_max

# Proxy for "no constraint on the gap exponent" when sweeping 1/mu_p to 0.
INFINITE_MU = 1e12

# Strict inequality over a compact range; require at least this much room
# so bisection does not chatter on the boundary.
ACHIEVABILITY_SLACK = 1e-12


class FrontierPoint(NamedTuple):
    beta_p: float
    inv_mu_p: float


class AchievabilityResult(NamedTuple):
    achievable: bool
    worst_margin: float
    worst_pi: float


@dataclass(frozen=True)
class RegionQuery:
    """One membership question about the achievable region."""

    beta_p: float
    mu_p: float
    mu_star: float
    pi_grid: int = 2048

    def __post_init__(self) -> None:
        if self.mu_star <= 2.0:
            raise ValueError(f"mu_star must exceed 2, got {self.mu_star!r}")
        if self.mu_p <= self.mu_star:
            raise ValueError(
                f"mu_p must exceed mu_star, got {self.mu_p!r} <= {self.mu_star!r}"
            )
        if self.beta_p < 0.0:
            raise ValueError(f"beta_p must be nonnegative, got {self.beta_p!r}")
        if self.pi_grid < 16:
            raise ValueError("pi_grid too coarse")


def _entropy_term(arg: float) -> float:
    # Arguments above 1 leave H2's domain; penalize linearly so the
    # condition stays total and monotone for bisection.
    if arg > 1.0:
        return 1.0 + (arg - 1.0)
    return binary_entropy(arg)


def _entropy_term_arr(args: np.ndarray) -> np.ndarray:
    out = np.empty_like(args)
    over = args > 1.0
    out[over] = args[over]  # 1 + (arg - 1)
    a = args[~over]
    with np.errstate(divide="ignore", invalid="ignore"):
        e = -(a * np.log2(a) + (1.0 - a) * np.log2(1.0 - a))
    out[~over] = np.nan_to_num(e, nan=0.0)  # 0*log 0 limits at a in {0, 1}
    return out


def _lhs(beta_p: float, mu_p: float, mu_star: float, pi: float) -> float:
    denom = mu_p - mu_star * pi
    return (1.0 - pi) / denom + _entropy_term(beta_p * mu_p / denom)


def is_achievable(q: RegionQuery) -> AchievabilityResult:
    """Check the region condition over a pi grid plus local refinement."""
    pis = np.linspace(0.0, 1.0, q.pi_grid)
    denom = q.mu_p - q.mu_star * pis
    lhs = (1.0 - pis) / denom + _entropy_term_arr(q.beta_p * q.mu_p / denom)
    k = int(np.argmax(lhs))
    lo = pis[max(k - 1, 0)]
    hi = pis[min(k + 1, q.pi_grid - 1)]
    worst_pi, worst = golden_section_max(
        lambda p: _lhs(q.beta_p, q.mu_p, q.mu_star, p), lo, hi
    )
    if lhs[k] > worst:
        worst_pi, worst = float(pis[k]), float(lhs[k])
    margin = 1.0 - worst
    return AchievabilityResult(margin > ACHIEVABILITY_SLACK, margin, worst_pi)


def max_beta(
    mu_p: float,
    mu_star: float,
    tol: float = 1e-9,
    pi_grid: int = 2048,
) -> float:
    """Largest achievable error exponent at a fixed gap exponent, by bisection.

    Achievability is monotone in beta_p (the entropy term only grows), so
    bisection on [0, 1/2] is exact up to tol.
    """
    lo, hi = 0.0, 0.5
    if not is_achievable(RegionQuery(lo, mu_p, mu_star, pi_grid)).achievable:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_achievable(RegionQuery(mid, mu_p, mu_star, pi_grid)).achievable:
            lo = mid
        else:
            hi = mid
    return lo


def trace_frontier(mu_star: float, samples: int = 53) -> list[FrontierPoint]:
    """Sweep the gap exponent from 1/mu_star down to 0 and record max_beta.

    The top endpoint needs mu_p strictly above mu_star, so it is nudged by
    a relative 1e-9; the bottom endpoint uses INFINITE_MU as the proxy for
    an unconstrained gap.  Output is sorted by inv_mu_p descending.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if mu_star <= 2.0:
        raise ValueError(f"mu_star must exceed 2, got {mu_star!r}")
    top = 1.0 / (mu_star * (1.0 + 1e-9))
    points = []
    for k in range(samples):
        inv = top * (samples - 1 - k) / (samples - 1)
        mu_p = (1.0 / inv) if inv > 0.0 else INFINITE_MU
        points.append(FrontierPoint(max_beta(mu_p, mu_star), 1.0 / mu_p if inv > 0.0 else 0.0))
    return points


def gamma_tradeoff(gamma: float, mu_star: float) -> FrontierPoint:
    """Interpolation curve: gamma in (1/(1+mu_star), 1) trades gap for error.

    beta_p = gamma * H2inv((gamma (mu_star + 1) - 1) / (gamma mu_star)) and
    mu_p = mu_star / (1 - gamma).
    """
    if mu_star <= 2.0:
        raise ValueError(f"mu_star must exceed 2, got {mu_star!r}")
    if not 1.0 / (1.0 + mu_star) < gamma < 1.0:
        raise ValueError(
            f"gamma must lie in (1/(1+mu_star), 1) = "
            f"({1.0 / (1.0 + mu_star):.6f}, 1), got {gamma!r}"
        )
    arg = (gamma * (mu_star + 1.0) - 1.0) / (gamma * mu_star)
    beta_p = gamma * binary_entropy_inv(arg)
    mu_p = mu_star / (1.0 - gamma)
    return FrontierPoint(beta_p, 1.0 / mu_p)


def conjectured_intercept(mu_star: float) -> float:
    """x-intercept 1/(mu_star * theta) of the conjectured straight segment.

    theta = -log2(2**(1 - 1/mu_star) - 1) comes from the hypothesized
    power-of-log behavior of the eigenfunction near 0; for mu_star = 3.627
    this evaluates to about 0.44696.
    """
    if mu_star <= 1.0:
        raise ValueError("mu_star must exceed 1")
    theta = -math.log2(2.0 ** (1.0 - 1.0 / mu_star) - 1.0)
    return 1.0 / (mu_star * theta)


@dataclass(frozen=True)
class CorollaryReport:
    """Outcome of the two numeric corollary checks."""

    mu_star: float
    beta_star: float
    segment_min_margin: float
    segment_argmin_xi: float
    containment_margins: tuple[tuple[float, float], ...]  # (gamma, margin)

    @property
    def segment_ok(self) -> bool:
        return self.segment_min_margin > 0.0

    @property
    def containment_ok(self) -> bool:
        return all(m > 0.0 for _, m in self.containment_margins)

    @property
    def passed(self) -> bool:
        return self.segment_ok and self.containment_ok

    def as_dict(self) -> dict:
        return {
            "mu_star": self.mu_star,
            "beta_star": self.beta_star,
            "segment_check": {
                "min_margin": self.segment_min_margin,
                "argmin_xi": self.segment_argmin_xi,
                "ok": self.segment_ok,
            },
            "containment_check": {
                "per_gamma": [
                    {"gamma": g, "margin": m} for g, m in self.containment_margins
                ],
                "ok": self.containment_ok,
            },
            "passed": self.passed,
        }


DEFAULT_CONTAINMENT_GAMMAS = (0.30, 0.50, 0.70, 0.90, 0.99)


def verify_corollaries(
    mu_star: float = 3.627,
    grid: int = 10_000,
    beta_star: float = 0.4469,
    gammas: tuple[float, ...] = DEFAULT_CONTAINMENT_GAMMAS,
) -> CorollaryReport:
    """Run the two numeric checks that reduce the region to known regimes.

    (a) the straight-segment inequality (1 - xi)/mu_star + H2(beta_star xi) < 1
        on a uniform xi grid over [0, 1];
    (b) the interpolation curve's points all lie inside the region.
    """
    if grid < 1000:
        raise ValueError("grid must be at least 1000")
    xis = np.linspace(0.0, 1.0, grid)
    lhs = np.array(
        [(1.0 - x) / mu_star + binary_entropy(beta_star * x) for x in xis]
    )
    k = int(np.argmax(lhs))
    margins = 1.0 - lhs
    containment = []
    for g in gammas:
        pt = gamma_tradeoff(g, mu_star)
        res = is_achievable(RegionQuery(pt.beta_p, 1.0 / pt.inv_mu_p, mu_star))
        containment.append((g, res.worst_margin))
    return CorollaryReport(
        mu_star=mu_star,
        beta_star=beta_star,
        segment_min_margin=float(margins[k]),
        segment_argmin_xi=float(xis[k]),
        containment_margins=tuple(containment),
    )


# Boundary of the achievable region for mu_star = 3.627, as (beta_p, inv_mu_p)
# pairs sorted by inv_mu_p descending.  Regression data for trace/max_beta.
REFERENCE_BOUNDARY_3627: tuple[tuple[float, float], ...] = (
    (0.397560615940892, 0.0304942511446948),
    (0.408687551008228, 0.0241938247074105),
    (0.414395185864106, 0.0212492019676073),
    (0.41884800577141, 0.0190864774858869),
    (0.422639670594639, 0.0173375279181456),
    (0.426004630944888, 0.0158565973092125),
    (0.429064277330748, 0.014568028642948),
    (0.43189116104289, 0.0134264910850402),
    (0.434532763048766, 0.0124022438252995),
    (0.437022179406831, 0.0114745044435068),
    (0.439383577845581, 0.0106280589201336),
    (0.44163524970571, 0.00985136361705596),
    (0.44379143821705, 0.00913540709442582),
    (0.445863494254992, 0.00847298986167024),
    (0.447860639339929, 0.00785824839856242),
    (0.449790487683765, 0.00728632915246918),
    (0.451659414256492, 0.00675315845313478),
    (0.453472821008394, 0.00625527591887812),
    (0.455235333720022, 0.00578971114489503),
    (0.456950950380316, 0.00535389065774242),
    (0.458623154934287, 0.00494556651057623),
    (0.460255005798812, 0.0045627606585394),
    (0.46184920567094, 0.00420372104328875),
    (0.463408157247476, 0.00386688650283846),
    (0.464934008185885, 0.00355085842622566),
    (0.466428687740426, 0.00325437763126255),
    (0.467893936887402, 0.00297630533076069),
    (0.469331333299157, 0.0027156073360036),
    (0.470742312205696, 0.00247134084675097),
    (0.472128183942937, 0.00224264332692893),
    (0.473490148809463, 0.00202872307596161),
    (0.474829309720156, 0.00182885118921182),
    (0.476146683043664, 0.00164235466449761),
    (0.477443207932787, 0.00146861046044328),
    (0.478719754396506, 0.00130704035023392),
    (0.479977130315291, 0.0011571064438959),
    (0.481216087564151, 0.0010183072755169),
    (0.48243732737850, 0.00089017437031046),
    (0.483641505074225, 0.00077226922126171),
    (0.484829234215362, 0.000664180616477294),
    (0.486001090304469, 0.000565522269682278),
    (0.487157614063861, 0.000475930711003692),
    (0.488299314359456, 0.000395063405138396),
    (0.489426670814881, 0.000322597066850953),
    (0.490540136154829, 0.000258226149079616),
    (0.491640138311252, 0.000201661482394013),
    (0.492727082321111, 0.000152629047575281),
    (0.493801352040403, 0.000110868865647052),
    (0.494863311695878, 0.0000761339917631317),
    (0.495913307292242, 0.0000481896015981413),
    (0.496951667892789, 0.000026812158981532),
    (0.49797870678435, 0.0000117886576083289),
    (0.498994722541618, 0.00000291592746097554),
)


def discretization_margin(
    beta_p: float,
    mu_p: float,
    mu_star: float,
    pockets: int,
    pi_grid: int = 512,
) -> float:
    """Worst-case margin of the region condition under pocket discretization.

    Splitting the level range into `pockets` pockets perturbs each occurrence
    of pi by up to 9/pockets independently; the condition must survive every
    perturbation for pi in [-1/pockets, 1 + 1/pockets].  Positive result
    means the pocket count is fine enough for the targeted point.
    """
    if pockets < 1:
        raise ValueError("pockets must be at least 1")
    d = 9.0 / pockets
    worst = math.inf
    for pi in np.linspace(-1.0 / pockets, 1.0 + 1.0 / pockets, pi_grid):
        denom = mu_p - mu_star * (pi + d)  # worst denominator for both terms
        if denom <= 0.0:
            return -math.inf
        first = (1.0 - (pi - d)) / denom
        lo_arg = beta_p * mu_p / (mu_p - mu_star * (pi - d))
        hi_arg = beta_p * mu_p / denom
        ent = max(_entropy_term(lo_arg), _entropy_term(hi_arg))
        if lo_arg < 0.5 < hi_arg:
            ent = 1.0
        worst = min(worst, 1.0 - (first + ent))
    return worst
