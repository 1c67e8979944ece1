"""Channel selection: classical single-threshold and multi-pocket constructions.

The classical construction picks the best channels of the full level-n
table.  The multi-pocket construction works in three phases per pocket
level m:

    recruit  keep level-m channels with erasure below p_ub * 2**(-D m),
             skipping descendants of channels already recruited by a
             lower pocket;
    train    expand every recruit to all its level-n descendants;
    retain   keep descendants squared at least ceil(beta_p * n) times
             during the n - m trained steps, then drop any whose final
             erasure still exceeds 2**(-2**(beta_p * n)).

Pocket levels are spread over [n0/D, n0] with n0 = <n mu_star / mu_p>,
so the survivors inherit both the gap decay of the recruit levels and
the error decay of the squaring quota.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .erasure import (
    DEFAULT_MAX_LEVEL,
    ChannelPath,
    LogErasure,
    RootChannel,
    _complement_log2_arr,
    extend_log_table,
    level_log_table,
)
from .errors import EmptyCodeError, InfeasibleTargetError, LevelTooLargeError

# ceil() guard against float noise like 3.0000000000000004 from beta_p * n
_CEIL_SLACK = 1e-9


def _round_nearest(x: float) -> int:
    # Round to nearest; exact halves go down. With half-up rounding the
    # derived level count stalls between n=20 and n=22 at the reference
    # parameters and the gap sequence loses monotonicity.
    return int(math.ceil(x - 0.5))


def squaring_quota(beta_p: float, n: int) -> int:
    return int(math.ceil(beta_p * n - _CEIL_SLACK))


@dataclass(frozen=True)
class Pocket:
    """One recruit level: members are level-m path integers, post exclusion."""

    level: int
    threshold_log: float  # recruit bound as -log2 of p_ub * 2**(-D m)
    members: np.ndarray

    @property
    def weight(self) -> float:
        return self.members.size * 2.0 ** -self.level


@dataclass(frozen=True)
class PocketStats:
    level: int
    recruited_weight: float
    retained_weight: float

    @property
    def discarded_weight(self) -> float:
        return self.recruited_weight - self.retained_weight


@dataclass(frozen=True)
class ConstructionReport:
    capacity: float
    rate: float
    union_bound_log: float
    pocket_stats: tuple[PocketStats, ...]
    n0: int
    quota: int

    @property
    def gap(self) -> float:
        return self.capacity - self.rate


@dataclass(eq=False)
class CodeSpec:
    """A selected set of level-n synthetic channels with per-channel stats.

    Columns are aligned arrays sorted by the 1-based channel index j.
    squaring_count counts squarings since the channel's pocket level
    (for the classical construction the pocket level is 0, so it is the
    total squaring count along the path).
    """

    n: int
    z0: float
    indices: np.ndarray  # uint64, 1-based, strictly increasing
    l_era: np.ndarray
    l_rel: np.ndarray
    squaring_count: np.ndarray
    source_pocket: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        m = self.indices.size
        for name in ("l_era", "l_rel", "squaring_count", "source_pocket"):
            if getattr(self, name).shape != (m,):
                raise ValueError(f"column {name} misaligned")
        if m and (self.indices[0] < 1 or self.indices[-1] > (1 << self.n)):
            raise ValueError("channel index out of range")
        if m and np.any(np.diff(self.indices.astype(np.int64)) <= 0):
            raise ValueError("indices must be strictly increasing")

    def __len__(self) -> int:
        return int(self.indices.size)

    @property
    def rate(self) -> float:
        return self.indices.size / float(1 << self.n)

    def paths(self) -> list[ChannelPath]:
        return [ChannelPath.from_index(self.n, int(j)) for j in self.indices]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CodeSpec):
            return NotImplemented
        return (
            self.n == other.n
            and self.z0 == other.z0
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.l_era, other.l_era)
            and np.array_equal(self.squaring_count, other.squaring_count)
            and np.array_equal(self.source_pocket, other.source_pocket)
            and self.params == other.params
        )


def union_bound(spec: CodeSpec) -> float:
    """-log2 of the summed erasure probabilities, max-shifted and compensated."""
    if len(spec) == 0:
        raise ValueError("union bound of an empty selection")
    le = spec.l_era[np.isfinite(spec.l_era)]
    if le.size == 0:
        return math.inf
    m0 = float(np.min(le))
    total = math.fsum(np.exp2(m0 - le).tolist())
    return m0 - math.log2(total)


def select_classical(
    root: RootChannel,
    n: int,
    *,
    rate: float | None = None,
    max_sum_erasure: float | None = None,
    max_level: int = DEFAULT_MAX_LEVEL,
    table: tuple[np.ndarray, np.ndarray] | None = None,
) -> CodeSpec:
    """Pick the best level-n channels, by count or by union-bound budget.

    Exactly one target may be given.  Rate mode keeps the <rate * 2**n>
    smallest-erasure channels; budget mode adds channels in increasing
    erasure order while the running erasure sum stays within the budget.
    Ties prefer the smaller channel index.  A precomputed (l_era, l_rel)
    level table may be supplied to skip the enumeration.
    """
    if (rate is None) == (max_sum_erasure is None):
        raise ValueError("specify exactly one of rate or max_sum_erasure")
    if table is None:
        le, lr = level_log_table(root, n, max_level=max_level)
    else:
        le, lr = table
        if le.shape != (1 << n,) or lr.shape != (1 << n,):
            raise ValueError("supplied table does not match level n")
    size = 1 << n
    order = np.lexsort((np.arange(size), -le))  # erasure ascending, then j
    if rate is not None:
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"rate must lie in [0, 1], got {rate!r}")
        count = _round_nearest(rate * size)
        params = {"mode": "classical", "rate": rate}
    else:
        if max_sum_erasure <= 0.0:
            raise InfeasibleTargetError(
                f"erasure budget must be positive, got {max_sum_erasure!r}"
            )
        running = np.cumsum(np.exp2(-le[order]))
        count = int(np.searchsorted(running, max_sum_erasure, side="right"))
        if count == 0:
            raise InfeasibleTargetError(
                f"best channel already exceeds the budget {max_sum_erasure!r}"
            )
        params = {"mode": "classical", "max_sum_erasure": max_sum_erasure}
    chosen = np.sort(order[:count])
    return CodeSpec(
        n=n,
        z0=root.z0,
        indices=chosen.astype(np.uint64) + 1,
        l_era=le[chosen],
        l_rel=lr[chosen],
        squaring_count=_popcount(chosen),
        source_pocket=np.zeros(count, dtype=np.int64),
        params=params,
    )


def _popcount(paths: np.ndarray) -> np.ndarray:
    return np.bitwise_count(paths.astype(np.uint64)).astype(np.int64)


def pocket_levels(n0: int, pockets: int) -> list[int]:
    """Recruit levels <k n0 / D> for k = 1..D, merged when rounding collides."""
    out: list[int] = []
    for k in range(1, pockets + 1):
        m = _round_nearest(k * n0 / pockets)
        if not out or m != out[-1]:
            out.append(m)
    return out


def construct_multipocket(
    root: RootChannel,
    n: int,
    beta_p: float,
    mu_p: float,
    mu_star: float,
    pockets: int = 8,
    p_ub: float = 2.0 ** -10,
    *,
    levels: Sequence[int] | None = None,
    max_level: int = DEFAULT_MAX_LEVEL,
) -> tuple[CodeSpec, ConstructionReport]:
    """Run recruit, train, retain over the pocket levels.

    `levels` overrides the derived pocket levels (the walkthrough configs
    pin them at fixed fractions of n); thresholds still use the pocket
    count D = len(levels).
    """
    if mu_star <= 2.0:
        raise ValueError(f"mu_star must exceed 2, got {mu_star!r}")
    if mu_p <= mu_star:
        raise ValueError(f"mu_p must exceed mu_star, got {mu_p!r}")
    if not 0.0 <= beta_p <= 0.5:
        raise ValueError(f"beta_p must lie in [0, 1/2], got {beta_p!r}")
    if pockets < 1:
        raise ValueError(f"pockets must be at least 1, got {pockets!r}")
    if not 0.0 < p_ub < 1.0:
        raise ValueError(f"p_ub must lie in (0, 1), got {p_ub!r}")
    if n < 1:
        raise ValueError("n must be positive")

    n0 = _round_nearest(n * mu_star / mu_p)
    if levels is None:
        if n0 < pockets:
            raise ValueError(
                f"n too small: <n mu_star / mu_p> = {n0} is below {pockets} pockets"
            )
        realized = pocket_levels(n0, pockets)
    else:
        realized = [int(m) for m in levels]
        if not realized or any(
            not 1 <= m <= n for m in realized
        ) or any(b <= a for a, b in zip(realized, realized[1:])):
            raise ValueError("levels must be strictly increasing within [1, n]")
    if max(realized) > max_level:
        raise LevelTooLargeError(
            f"pocket level {max(realized)} exceeds the configured maximum {max_level}"
        )

    d_count = pockets if levels is None else len(realized)
    quota = squaring_quota(beta_p, n)
    final_le_min = 2.0 ** (beta_p * n) if beta_p > 0.0 else None

    z = root.erasure()
    table_le = np.array([z.l_era])
    table_lr = np.array([z.l_rel])
    table_level = 0

    recruited: list[Pocket] = []
    stats: list[PocketStats] = []
    sel_paths: list[np.ndarray] = []
    sel_le: list[np.ndarray] = []
    sel_lr: list[np.ndarray] = []
    sel_sq: list[np.ndarray] = []
    sel_m: list[np.ndarray] = []

    for m in realized:
        table_le, table_lr = extend_log_table(table_le, table_lr, m - table_level)
        table_level = m
        threshold_log = d_count * m - math.log2(p_ub)
        mask = table_le > threshold_log
        for earlier in recruited:
            shift = m - earlier.level
            mask &= ~np.isin(
                np.arange(1 << m, dtype=np.uint64) >> np.uint64(shift),
                earlier.members,
            )
        members = np.nonzero(mask)[0].astype(np.uint64)
        pocket = Pocket(level=m, threshold_log=threshold_log, members=members)
        recruited.append(pocket)

        steps = n - m
        if members.size:
            desc_le, desc_lr = extend_log_table(
                table_le[members.astype(np.intp)],
                table_lr[members.astype(np.intp)],
                steps,
            )
            offsets = np.tile(
                np.arange(1 << steps, dtype=np.uint64), members.size
            )
            sq = _popcount(offsets)
            keep = sq >= quota
            if final_le_min is not None:
                keep &= desc_le >= final_le_min
            paths = (
                np.repeat(members, 1 << steps) << np.uint64(steps)
            ) + offsets
            sel_paths.append(paths[keep])
            sel_le.append(desc_le[keep])
            sel_lr.append(desc_lr[keep])
            sel_sq.append(sq[keep])
            sel_m.append(np.full(int(keep.sum()), m, dtype=np.int64))
            retained_weight = int(keep.sum()) * 2.0 ** -n
        else:
            retained_weight = 0.0
        stats.append(
            PocketStats(
                level=m,
                recruited_weight=pocket.weight,
                retained_weight=retained_weight,
            )
        )

    total = sum(p.size for p in sel_paths)
    if total == 0:
        raise EmptyCodeError(
            f"no channel survives (n={n}, beta_p={beta_p}, mu_p={mu_p}, "
            f"mu_star={mu_star}, pockets={pockets}, p_ub={p_ub}); "
            "lower beta_p or mu_p, or raise n"
        )
    paths = np.concatenate(sel_paths)
    order = np.argsort(paths, kind="stable")
    paths = paths[order]
    spec = CodeSpec(
        n=n,
        z0=root.z0,
        indices=paths + 1,
        l_era=np.concatenate(sel_le)[order],
        l_rel=np.concatenate(sel_lr)[order],
        squaring_count=np.concatenate(sel_sq)[order],
        source_pocket=np.concatenate(sel_m)[order],
        params={
            "mode": "multipocket",
            "beta_p": beta_p,
            "mu_p": mu_p,
            "mu_star": mu_star,
            "pockets": d_count,
            "p_ub": p_ub,
        },
    )
    report = ConstructionReport(
        capacity=root.capacity,
        rate=spec.rate,
        union_bound_log=union_bound(spec),
        pocket_stats=tuple(stats),
        n0=n0,
        quota=quota,
    )
    return spec, report


def pocket_weights(
    report: ConstructionReport,
) -> list[tuple[int, float, float, float]]:
    """Per-pocket accounting rows (level, recruited, retained, lost_fraction)."""
    rows = []
    for s in report.pocket_stats:
        lost = (
            s.discarded_weight / s.recruited_weight if s.recruited_weight > 0 else 0.0
        )
        rows.append((s.level, s.recruited_weight, s.retained_weight, lost))
    return rows


# --------------------------------------------------------------------------
# Text format: header lines, then one `j= m= sq= lera=` line per channel.


def save_codespec(spec: CodeSpec, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(f"n={spec.n}\n")
        fh.write(f"z0={spec.z0!r}\n")
        params = " ".join(f"{k}={v}" for k, v in spec.params.items())
        fh.write(f"params={params}\n")
        for j, m, sq, lera in zip(
            spec.indices, spec.source_pocket, spec.squaring_count, spec.l_era
        ):
            fh.write(f"j={j} m={m} sq={sq} lera={float(lera)!r}\n")


def _parse_param(token: str):
    key, _, raw = token.partition("=")
    if raw == "None":
        return key, None
    try:
        return key, int(raw)
    except ValueError:
        pass
    try:
        return key, float(raw)
    except ValueError:
        return key, raw


def load_codespec(path: str) -> CodeSpec:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if len(lines) < 3 or not lines[0].startswith("n=") or not lines[1].startswith("z0="):
        raise ValueError(f"{path}: malformed header")
    n = int(lines[0][2:])
    z0 = float(lines[1][3:])
    params = dict(_parse_param(tok) for tok in lines[2][len("params="):].split())
    js, ms, sqs, les = [], [], [], []
    for ln in lines[3:]:
        fields = dict(tok.split("=", 1) for tok in ln.split())
        js.append(int(fields["j"]))
        ms.append(int(fields["m"]))
        sqs.append(int(fields["sq"]))
        les.append(float(fields["lera"]))
    le = np.array(les, dtype=np.float64)
    return CodeSpec(
        n=n,
        z0=z0,
        indices=np.array(js, dtype=np.uint64),
        l_era=le,
        l_rel=_complement_log2_arr(le),
        squaring_count=np.array(sqs, dtype=np.int64),
        source_pocket=np.array(ms, dtype=np.int64),
        params=params,
    )
