"""Butterfly encoding, successive-cancellation decoding, and simulation.

Bits travel as int8 arrays.  A partial codeword marks erased positions with
ERASED (-1); an erasure pattern is a bool array, True where the symbol was
lost.  Input position i of the encoder feeds the synthetic channel with
index j = i + 1: the first half of the input block rides the worse subtree.

On the BEC the decoder never guesses, so whether a block decodes depends on
the erasure pattern alone.  simulate() exploits that through a vectorized
resolution profile; exact_block_error() deliberately does not, running the
actual message-passing decoder on every pattern so the two stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .construction import CodeSpec
from .erasure import RootChannel
from .errors import DecodingInconsistencyError, LevelTooLargeError

ERASED = np.int8(-1)

# two-sided 95% normal quantile
WILSON_Z95 = 1.959963984540054

# exact_block_error enumerates 2**(2**n) patterns
EXACT_ENUM_MAX_LEVEL = 4


def _as_bits(seq, what: str) -> np.ndarray:
    bits = np.asarray(seq, dtype=np.int8)
    if bits.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ValueError(f"{what} entries must be 0 or 1")
    return bits


def polar_encode(u) -> np.ndarray:
    """Multiply by the n-fold Kronecker power of [[1,0],[1,1]] over GF(2).

    The in-place butterfly runs adjacent pairs first; the stages commute, so
    any order realizes the same matrix.
    """
    x = _as_bits(u, "input block").copy()
    size = x.size
    if size == 0 or size & (size - 1):
        raise ValueError("input length must be a power of two")
    width = 2
    while width <= size:
        view = x.reshape(-1, width)
        view[:, : width // 2] ^= view[:, width // 2 :]
        width *= 2
    return x


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of one decoding attempt.

    first_failure is the 1-based index of the earliest selected channel whose
    input could not be resolved, or None on success.
    """

    info_bits: np.ndarray | None
    first_failure: int | None = None

    @property
    def ok(self) -> bool:
        return self.info_bits is not None


class _Unresolved(Exception):
    def __init__(self, position: int):
        self.position = position


def sc_decode_bec(erased, received, spec: CodeSpec, frozen_values) -> DecodeResult:
    """Three-valued successive-cancellation decoding over the erasure channel.

    erased: bool mask over codeword positions.  received: bit array; entries
    under the mask are ignored.  frozen_values: bits for every channel not in
    spec.indices, in ascending channel order.

    A selected channel resolving to "unknown" aborts decoding with that
    channel recorded; a received value contradicting a frozen constraint
    raises DecodingInconsistencyError, since the channel never flips bits.
    """
    size = 1 << spec.n
    mask = np.asarray(erased, dtype=bool)
    if mask.shape != (size,):
        raise ValueError("erasure pattern length does not match the code")
    y = np.asarray(received, dtype=np.int8).copy()
    if y.shape != (size,):
        raise ValueError("received block length does not match the code")
    y[mask] = ERASED
    good = y[~mask]
    if good.size and (good.min() < 0 or good.max() > 1):
        raise ValueError("received entries must be 0 or 1 outside erasures")

    template = np.full(size, ERASED, dtype=np.int8)
    info_pos = spec.indices.astype(np.int64) - 1
    frozen_pos = np.setdiff1d(np.arange(size, dtype=np.int64), info_pos)
    frozen_bits = _as_bits(frozen_values, "frozen values")
    if frozen_bits.size != frozen_pos.size:
        raise ValueError(
            f"expected {frozen_pos.size} frozen values, got {frozen_bits.size}"
        )
    template[frozen_pos] = frozen_bits

    u_hat = np.empty(size, dtype=np.int8)
    cursor = 0

    def resolve(y_block: np.ndarray) -> np.ndarray:
        # Returns the re-encoded (codeword-domain) bits of the subtree once
        # every input below it is decided.
        nonlocal cursor
        if y_block.size == 1:
            i = cursor
            cursor += 1
            forced = template[i]
            if forced >= 0:
                if y_block[0] >= 0 and y_block[0] != forced:
                    raise DecodingInconsistencyError(
                        f"channel {i + 1} observed {int(y_block[0])}"
                        f" but is frozen to {int(forced)}"
                    )
                u_hat[i] = forced
            else:
                if y_block[0] < 0:
                    raise _Unresolved(i)
                u_hat[i] = y_block[0]
            return u_hat[i : i + 1].copy()
        half = y_block.size // 2
        yl, yr = y_block[:half], y_block[half:]
        both = (yl >= 0) & (yr >= 0)
        # check node: parity known only when both halves are
        minus = np.where(both, yl ^ yr, ERASED).astype(np.int8)
        cx = resolve(minus)
        from_left = np.where(yl >= 0, yl ^ cx, ERASED).astype(np.int8)
        conflict = both & (from_left != yr)
        if conflict.any():
            t = int(np.argmax(conflict))
            raise DecodingInconsistencyError(
                f"inconsistent pair at codeword offset {t}"
            )
        # variable node: either side pins the value
        plus = np.where(yr >= 0, yr, from_left).astype(np.int8)
        dx = resolve(plus)
        return np.concatenate([cx ^ dx, dx])

    try:
        resolve(y)
    except _Unresolved as stop:
        return DecodeResult(info_bits=None, first_failure=stop.position + 1)
    return DecodeResult(info_bits=u_hat[info_pos].copy())


def _resolution_profile(known: np.ndarray) -> np.ndarray:
    """Which inputs resolve, given each earlier input as decoded correctly.

    known: (..., 2**n) bool, True where the symbol arrived.  The worse-side
    input of a pair needs both observations; once it is supplied, the better
    side needs either.  Equivalent to running sc_decode_bec without the
    early abort, but vectorized across leading axes.
    """
    width = known.shape[-1]
    if width == 1:
        return known.copy()
    half = width // 2
    kl, kr = known[..., :half], known[..., half:]
    return np.concatenate(
        [_resolution_profile(kl & kr), _resolution_profile(kl | kr)], axis=-1
    )


def exact_block_error(spec: CodeSpec, root: RootChannel) -> float:
    """Block error probability by full erasure-pattern enumeration.

    Runs the real decoder on each of the 2**(2**n) patterns and weights by
    z0**erased * (1-z0)**received, summed with compensation.  Failure is
    pattern-determined, so the per-popcount failure counts are exact
    integers and the only rounding is in the final weighting.
    """
    if spec.n > EXACT_ENUM_MAX_LEVEL:
        raise LevelTooLargeError(
            f"exact enumeration is limited to n <= {EXACT_ENUM_MAX_LEVEL}"
        )
    z0 = root.z0
    size = 1 << spec.n
    if len(spec) == 0:
        return 0.0
    zeros = np.zeros(size, dtype=np.int8)
    frozen = np.zeros(size - len(spec), dtype=np.int8)
    fail_by_received = [0] * (size + 1)
    for pattern in range(1 << size):
        erased = (pattern >> np.arange(size)) & 1
        result = sc_decode_bec(erased.astype(bool), zeros, spec, frozen)
        if not result.ok:
            fail_by_received[size - pattern.bit_count()] += 1
    terms = [
        count * z0 ** (size - k) * (1.0 - z0) ** k
        for k, count in enumerate(fail_by_received)
        if count
    ]
    return math.fsum(terms)


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z95) -> tuple[float, float]:
    """Score confidence interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= errors <= trials:
        raise ValueError("errors must lie in [0, trials]")
    p = errors / trials
    zz = z * z
    denom = 1.0 + zz / trials
    center = (p + zz / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + zz / (4.0 * trials * trials)) / denom
    # the score interval contains p by construction; rounding must not undo that
    return min(p, max(0.0, center - half)), max(p, min(1.0, center + half))


@dataclass(frozen=True)
class SimResult:
    """Monte-Carlo tally; batches holds (errors, trials) per processed chunk."""

    trials: int
    block_errors: int
    batches: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.block_errors <= self.trials:
            raise ValueError("error count outside [0, trials]")

    @property
    def estimate(self) -> float:
        return self.block_errors / self.trials

    @property
    def wilson_ci95(self) -> tuple[float, float]:
        return wilson_interval(self.block_errors, self.trials)


def simulate(
    spec: CodeSpec, root: RootChannel, trials: int, seed: int, *, batch: int = 4096
) -> SimResult:
    """Monte-Carlo block error rate at erasure rate z0.

    The all-zero codeword is transmitted; on a symmetric channel under SC
    the failure event depends only on the erasure pattern, so this loses no
    generality.  Each trial draws its pattern from a counter-based stream
    keyed (seed, trial_index), making the tally independent of batching or
    execution order.  Failures are detected with the resolution profile,
    which agrees with sc_decode_bec by construction (and by test).
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if batch < 1:
        raise ValueError("batch must be positive")
    z0 = root.z0
    size = 1 << spec.n
    info_pos = spec.indices.astype(np.int64) - 1
    total = 0
    batches: list[tuple[int, int]] = []
    for start in range(0, trials, batch):
        count = min(batch, trials - start)
        known = np.empty((count, size), dtype=bool)
        for t in range(count):
            gen = np.random.Generator(np.random.Philox(key=[seed, start + t]))
            known[t] = gen.random(size) >= z0
        if info_pos.size:
            resolved = _resolution_profile(known)
            failures = int((~resolved[:, info_pos]).any(axis=1).sum())
        else:
            failures = 0
        total += failures
        batches.append((failures, count))
    return SimResult(trials=trials, block_errors=total, batches=tuple(batches))
