"""Log-domain erasure arithmetic for synthetic BEC channels.

Synthetic channels created by the polar transform have erasure probabilities
that reach doubly exponential extremes (2**-2**k and 1 - 2**-2**k), far
outside float64 range.  Each channel therefore carries the pair

    l_era = -log2(Z)        bits of erasure suppression
    l_rel = -log2(1 - Z)    bits of reliability suppression

redundantly.  The two one-step transforms are exact on one field each:

    worse  child:  1 - Z' = (1 - Z)**2   =>  l_rel doubles exactly
    better child:  Z'' = Z**2            =>  l_era doubles exactly

and the other field is recomputed through a complement transform that stays
accurate at both ends of [0, 1].
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import LevelTooLargeError

LN2 = math.log(2.0)

# Above this many bits the complement is replaced by its first-order
# expansion 2**-x / ln 2; the neglected quadratic term is below 2**-80.
COMPLEMENT_CUTOFF = 40.0

# Full enumeration of level n touches 2**(n+1) nodes; past this the caller
# should work with pocket prefixes instead.
DEFAULT_MAX_LEVEL = 26

CACHE_MAGIC = b"PLZT"
CACHE_VERSION = 1


def complement_log2(x: float) -> float:
    """-log2(1 - 2**-x) for x >= 0, stable at both ends.

    x == 0 maps to inf (the complement event is impossible) and x == inf
    maps to 0.  Two exact branches: below 1 the expm1 form avoids the
    1 - 2**-x cancellation; from 1 up the log1p form avoids taking the log
    of a value crowding 1.  Above COMPLEMENT_CUTOFF the first-order
    expansion is used; it underflows to 0.0 beyond x ~ 1074, which is the
    correct float64 limit for a probability indistinguishable from 1.

    The branch structure and operation order must stay identical to
    _complement_log2_arr: construction compares scalar folds against
    vectorized tables bit for bit.
    """
    if x == 0.0:
        return math.inf
    if math.isinf(x):
        return 0.0
    # np kernels, not math.*: C libm and numpy's SIMD loops disagree in the
    # last ulp for pow/log1p, which would break scalar-vs-table equality.
    if x > COMPLEMENT_CUTOFF:
        return float(np.exp2(-x) / LN2)
    if x >= 1.0:
        return float(-np.log1p(-np.exp2(-x)) / LN2)
    return float(-np.log(-np.expm1(-x * LN2)) / LN2)


def _complement_log2_arr(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    zero = x == 0.0
    low = (x > 0.0) & (x < 1.0)
    mid = (x >= 1.0) & (x <= COMPLEMENT_CUTOFF)
    big = x > COMPLEMENT_CUTOFF
    out[zero] = np.inf
    xl = x[low]
    out[low] = -np.log(-np.expm1(-xl * LN2)) / LN2
    out[mid] = -np.log1p(-np.exp2(-x[mid])) / LN2
    out[big] = np.exp2(-x[big]) / LN2
    return out


@dataclass(frozen=True)
class LogErasure:
    """Erasure probability of one channel, stored as the (l_era, l_rel) pair."""

    l_era: float
    l_rel: float

    @classmethod
    def from_prob(cls, z: float) -> "LogErasure":
        if not 0.0 <= z <= 1.0:
            raise ValueError(f"erasure probability must lie in [0, 1], got {z!r}")
        l_era = math.inf if z == 0.0 else -math.log2(z)
        l_rel = math.inf if z == 1.0 else -math.log1p(-z) / LN2
        return cls(l_era, l_rel)

    @property
    def prob(self) -> float:
        """Linear-domain erasure probability (underflows to 0.0 when tiny)."""
        return 2.0 ** -self.l_era

    @property
    def reliability(self) -> float:
        """Linear-domain probability of successful transmission, 1 - Z."""
        return 2.0 ** -self.l_rel


def polar_worse(z: LogErasure) -> LogErasure:
    """One polarization step toward the degraded child: Z' = 1 - (1 - Z)**2."""
    l_rel = 2.0 * z.l_rel
    return LogErasure(complement_log2(l_rel), l_rel)


def polar_better(z: LogErasure) -> LogErasure:
    """One polarization step toward the upgraded child: Z'' = Z**2."""
    l_era = 2.0 * z.l_era
    return LogErasure(l_era, complement_log2(l_era))


def polarize_prob(z, bit: int):
    """One polarization step in the probability domain.

    Pure arithmetic on whatever number type ``z`` is (float, Fraction,
    Decimal), so exact types stay exact.  Only usable while Z is far from
    the float extremes; the log-domain pair is the general tool.
    """
    return z * z if bit else z + z - z * z


@dataclass(frozen=True)
class RootChannel:
    """The underlying BEC, described by its erasure probability z0."""

    z0: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.z0 <= 1.0:
            raise ValueError(f"z0 must lie in [0, 1], got {self.z0!r}")

    @property
    def capacity(self) -> float:
        return 1.0 - self.z0

    def erasure(self) -> LogErasure:
        return LogErasure.from_prob(self.z0)


@dataclass(frozen=True)
class ChannelPath:
    """Position of a synthetic channel in the polarization tree.

    ``path`` lists one bit per level: 0 descends to the worse (degraded)
    child, 1 to the better (upgraded) child.  Reading the path as a binary
    number, most significant bit first, gives index - 1, so the channel
    index is j = 1 + sum(path[i] * 2**(level - 1 - i)).
    """

    level: int
    path: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        if len(self.path) != self.level:
            raise ValueError("path length must equal level")
        if any(b not in (0, 1) for b in self.path):
            raise ValueError("path bits must be 0 or 1")

    @classmethod
    def from_index(cls, level: int, index: int) -> "ChannelPath":
        if not 1 <= index <= 1 << level:
            raise ValueError(f"index must lie in [1, 2**{level}], got {index}")
        p = index - 1
        bits = tuple((p >> (level - 1 - i)) & 1 for i in range(level))
        return cls(level, bits)

    @property
    def index(self) -> int:
        """1-based channel index j at this level."""
        return 1 + self.path_int

    @property
    def path_int(self) -> int:
        j = 0
        for b in self.path:
            j = (j << 1) | b
        return j

    @property
    def squaring_count(self) -> int:
        """Number of erasure-squaring (better) steps along the path."""
        return sum(self.path)

    def prefix(self, level: int) -> "ChannelPath":
        if not 0 <= level <= self.level:
            raise ValueError("prefix level out of range")
        return ChannelPath(level, self.path[:level])

    def is_descendant_of(self, other: "ChannelPath") -> bool:
        return (
            other.level <= self.level
            and self.path[: other.level] == other.path
        )


def channel_erasure(root: RootChannel, channel: ChannelPath) -> LogErasure:
    """Erasure of the synthetic channel reached by following ``channel``."""
    le = root.erasure()
    for bit in channel.path:
        le = polar_better(le) if bit else polar_worse(le)
    return le


def level_erasures(
    root: RootChannel, n: int, *, max_level: int = DEFAULT_MAX_LEVEL
) -> Iterator[tuple[ChannelPath, LogErasure]]:
    """Stream all 2**n level-n channels in index order (j = 1 .. 2**n).

    Depth-first with the worse child visited first, so paths appear in
    ascending binary order without materializing the level.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > max_level:
        raise LevelTooLargeError(f"level {n} exceeds the configured maximum {max_level}")
    stack: list[tuple[int, int, LogErasure]] = [(0, 0, root.erasure())]
    while stack:
        depth, path_int, le = stack.pop()
        if depth == n:
            bits = tuple((path_int >> (n - 1 - i)) & 1 for i in range(n))
            yield ChannelPath(n, bits), le
            continue
        stack.append((depth + 1, 2 * path_int + 1, polar_better(le)))
        stack.append((depth + 1, 2 * path_int, polar_worse(le)))


def extend_log_table(
    l_era: np.ndarray, l_rel: np.ndarray, steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Expand a vector of channels ``steps`` levels down the tree.

    Children of entry i land at 2*i (worse) and 2*i + 1 (better), so each
    parent's descendants stay contiguous and the per-parent offset equals the
    extension path read as a binary number.
    """
    le = np.asarray(l_era, dtype=np.float64)
    lr = np.asarray(l_rel, dtype=np.float64)
    for _ in range(steps):
        nle = np.empty(2 * le.size)
        nlr = np.empty(2 * le.size)
        nlr[0::2] = 2.0 * lr
        nle[0::2] = _complement_log2_arr(nlr[0::2])
        nle[1::2] = 2.0 * le
        nlr[1::2] = _complement_log2_arr(nle[1::2])
        le, lr = nle, nlr
    return le, lr


def level_log_table(
    root: RootChannel, n: int, *, max_level: int = DEFAULT_MAX_LEVEL
) -> tuple[np.ndarray, np.ndarray]:
    """Materialize (l_era, l_rel) for all level-n channels in index order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > max_level:
        raise LevelTooLargeError(
            f"materializing level {n} exceeds the configured maximum {max_level}"
        )
    z = root.erasure()
    return extend_log_table(
        np.array([z.l_era]), np.array([z.l_rel]), n
    )


def linear_erasures(l_era: np.ndarray) -> np.ndarray:
    """Linear-domain erasure probabilities; doubly-tiny entries underflow to 0."""
    return np.exp2(-np.asarray(l_era, dtype=np.float64))


# ---------------------------------------------------------------------------
# Optional on-disk cache of level tables, keyed by (z0, m).

_HEADER = struct.Struct("<4sIdI")


def write_level_cache(
    path: str, z0: float, m: int, l_era: np.ndarray, l_rel: np.ndarray
) -> None:
    if l_era.shape != (1 << m,) or l_rel.shape != (1 << m,):
        raise ValueError("table shape does not match level")
    records = np.empty((1 << m, 2), dtype="<f8")
    records[:, 0] = l_era
    records[:, 1] = l_rel
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, z0, m))
        fh.write(records.tobytes())


def read_level_cache(path: str) -> tuple[float, int, np.ndarray, np.ndarray]:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, z0, m = _HEADER.unpack(header)
        if magic != CACHE_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != CACHE_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        body = fh.read()
    expected = (1 << m) * 16
    if len(body) != expected:
        raise ValueError(f"{path}: expected {expected} record bytes, got {len(body)}")
    records = np.frombuffer(body, dtype="<f8").reshape(1 << m, 2)
    return z0, m, records[:, 0].copy(), records[:, 1].copy()


def _cache_filename(z0: float, m: int) -> str:
    (bits,) = struct.unpack("<Q", struct.pack("<d", z0))
    return f"plzt-m{m:02d}-{bits:016x}.bin"


def cached_level_table(
    root: RootChannel,
    m: int,
    cache_dir: str | None,
    *,
    max_level: int = DEFAULT_MAX_LEVEL,
) -> tuple[np.ndarray, np.ndarray]:
    """Like level_log_table, backed by the PLZT file cache when a dir is given."""
    if cache_dir is None:
        return level_log_table(root, m, max_level=max_level)
    path = os.path.join(cache_dir, _cache_filename(root.z0, m))
    if os.path.exists(path):
        z0, stored_m, le, lr = read_level_cache(path)
        if z0 == root.z0 and stored_m == m:
            return le, lr
    le, lr = level_log_table(root, m, max_level=max_level)
    os.makedirs(cache_dir, exist_ok=True)
    write_level_cache(path, root.z0, m, le, lr)
    return le, lr
