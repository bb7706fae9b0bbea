"""Information sets and non-catastrophic rate-compatible pattern families.

Reliability ordering uses density evolution under the Gaussian
approximation, tracking the mean channel LLR through the polarization
levels.  Families are built either greedily (satisfy every information
channel with as few transmitted positions as possible, then grow) or from
the seed sequence of disjoint-support index sums (reciprocal prefixes).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import hamming_weight
from .errors import (
    ConstructionViolationError,
    InfeasibleRateError,
    ZeroInInfoSetError,
)
from .patterns import (
    ChannelModel,
    PuncturingPattern,
    is_reciprocal,
    z_capacity_many,
    z_spectrum,
)

# two-piece approximation of E[tanh(L/2)] for L ~ N(m, 2m)
_PHI_ALPHA = 0.4527
_PHI_BETA = 0.0218
_PHI_GAMMA = 0.86
_PHI_AT_TEN = float(np.exp(-_PHI_ALPHA * 10.0**_PHI_GAMMA + _PHI_BETA))


def _phi(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    small = x < 10.0
    xs = np.where(small, x, 10.0)
    lo = np.exp(-_PHI_ALPHA * xs**_PHI_GAMMA + _PHI_BETA)
    xl = np.where(small, 10.0, x)
    hi = np.sqrt(np.pi / xl) * np.exp(-xl / 4.0) * (1.0 - 10.0 / (7.0 * xl))
    return np.where(small, lo, hi)


def _phi_inverse(y: np.ndarray) -> np.ndarray:
    """Inverse of the decreasing map `_phi`, piecewise closed form / bisection."""
    y = np.asarray(y, dtype=float)
    closed = np.clip(y, None, 1.0) >= _PHI_AT_TEN
    ys = np.where(closed, np.clip(y, 1e-300, 1.0), 0.5)
    out = ((_PHI_BETA - np.log(ys)) / _PHI_ALPHA) ** (1.0 / _PHI_GAMMA)
    if not closed.all():
        yl = np.where(closed, _PHI_AT_TEN, y)
        lo = np.full_like(yl, 10.0)
        hi = -4.0 * np.log(np.clip(yl, 1e-300, None)) + 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            above = _phi(mid) > yl
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out = np.where(closed, out, 0.5 * (lo + hi))
    return out


def _check_mean(m: np.ndarray) -> np.ndarray:
    """Mean after a check (minus) combination of two i.i.d. inputs."""
    p = _phi(m)
    arg = p * (2.0 - p)
    # below the double-precision floor, fall back to the dominant
    # exponential term of the large-mean asymptote
    tiny = arg < 1e-290
    safe = np.where(tiny, 0.5, arg)
    out = _phi_inverse(safe)
    return np.where(tiny, m - 4.0 * np.log(2.0), out)


def channel_llr_means(n: int, design_snr_db: float) -> np.ndarray:
    """Gaussian-approximation LLR means of all N polarized channels.

    ``design_snr_db`` is Es/N0 of the binary-input AWGN design channel.
    """
    if n < 0:
        raise ValueError("stage count must be nonnegative")
    es_n0 = 10.0 ** (design_snr_db / 10.0)
    means = np.array([4.0 * es_n0])
    for _ in range(n):
        nxt = np.empty(2 * means.size)
        nxt[0::2] = _check_mean(means)
        nxt[1::2] = 2.0 * means
        means = nxt
    return means


@dataclass(frozen=True)
class ReliabilityOrder:
    """Channel indices sorted most reliable first."""

    n: int
    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(1 << self.n)):
            raise ValueError("order must be a permutation of all channel indices")


def reliability_order(n: int, design_snr_db: float = 0.0) -> ReliabilityOrder:
    """Deterministic reliability ranking by DE/GA means, ties by index."""
    if n < 1:
        raise ValueError("need at least one polarization stage")
    means = channel_llr_means(n, design_snr_db)
    ranked = np.argsort(-means, kind="stable")
    return ReliabilityOrder(n=n, order=tuple(int(i) for i in ranked))


def info_set(order: ReliabilityOrder, k: int, excluded: Iterable[int] = ()) -> tuple[int, ...]:
    """The k best-ranked channels outside ``excluded``, ascending."""
    banned = set(int(i) for i in excluded)
    size = 1 << order.n
    if k > size - len(banned):
        raise ValueError(f"cannot pick {k} channels with {len(banned)} excluded")
    picked = []
    for idx in order.order:
        if len(picked) == k:
            break
        if idx not in banned:
            picked.append(idx)
    return tuple(sorted(picked))


def greedy_base_pattern(
    info: Iterable[int],
    n: int,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    paper_literal: bool = False,
) -> PuncturingPattern:
    """Greedy minimum-ish weight pattern with capacity 1 on every info channel.

    Channels are processed in ascending Hamming-weight order; for each one
    the lowest-index zero position whose addition turns the channel on is
    set.  When no single addition works, a uniformly random zero position
    is set and the same channel is retried (``paper_literal=True`` instead
    moves on, which can leave the channel unsatisfied).
    """
    size = 1 << n
    channels = sorted(set(int(i) for i in info))
    if not channels:
        raise ValueError("info set must be nonempty")
    if channels[0] < 0 or channels[-1] >= size:
        raise ValueError(f"info set not within [0, {size})")
    if rng is None:
        rng = np.random.default_rng(seed)
    ordered = sorted(channels, key=lambda i: (hamming_weight(i), i))
    mask = np.zeros(size, dtype=np.uint8)
    for ch in ordered:
        while True:
            zeros_idx = np.flatnonzero(mask == 0)
            if zeros_idx.size == 0:
                break  # all-ones already satisfies every channel
            candidates = np.repeat(mask[None, :], zeros_idx.size, axis=0)
            candidates[np.arange(zeros_idx.size), zeros_idx] = 1
            hits = np.flatnonzero(z_capacity_many(ch, candidates) == 1)
            if hits.size:
                mask[zeros_idx[hits[0]]] = 1
                break
            mask[int(rng.choice(zeros_idx))] = 1
            if paper_literal:
                break
    return PuncturingPattern(mask)


def greedy_rc_family(
    info: Iterable[int],
    n: int,
    transmit_lengths: Sequence[int],
    seed: int = 0,
    model: ChannelModel = ChannelModel.UCM,
    paper_literal: bool = False,
) -> "RcFamily":
    """Nested non-catastrophic family grown from the greedy base pattern.

    ``transmit_lengths`` lists the per-rate N_p values, strictly increasing
    toward lower rates (highest rate first); each family pattern has
    exactly the requested weight.
    """
    size = 1 << n
    channels = tuple(sorted(set(int(i) for i in info)))
    lengths = [int(v) for v in transmit_lengths]
    if not lengths:
        raise ValueError("need at least one transmit length")
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ValueError("transmit lengths must be strictly increasing")
    if lengths[-1] > size:
        raise InfeasibleRateError(f"transmit length {lengths[-1]} exceeds N={size}")
    if lengths[0] < len(channels):
        raise InfeasibleRateError(
            f"transmit length {lengths[0]} below the {len(channels)} information channels"
        )
    rng = np.random.default_rng(seed)
    base = greedy_base_pattern(channels, n, rng=rng, paper_literal=paper_literal)
    if base.weight > lengths[0]:
        raise InfeasibleRateError(
            f"greedy base pattern needs {base.weight} transmitted positions, "
            f"more than the highest-rate length {lengths[0]}"
        )
    mask = base.mask.copy()
    patterns = []
    for target in lengths:
        delta = target - int(mask.sum())
        if delta:
            zeros_idx = np.flatnonzero(mask == 0)
            mask[rng.choice(zeros_idx, size=delta, replace=False)] = 1
        patterns.append(PuncturingPattern(mask.copy()))
    family = RcFamily(
        n=n,
        info_set=channels,
        model=ChannelModel(model),
        method="greedy",
        seed=seed,
        patterns=tuple(patterns),
    )
    family.verify()
    return family


def boxplus(first: Iterable[int], second: Iterable[int]) -> set[int]:
    """XOR-combinations of support-disjoint index pairs, deduplicated."""
    return {i ^ j for i in second for j in first if (i & j) == 0}


@dataclass(frozen=True)
class SeedSequence:
    """Puncture-location ladder grouped by nondecreasing Hamming weight."""

    entries: tuple[int, ...]
    levels: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.entries)


def seed_sequence(info: Iterable[int], n: int) -> SeedSequence:
    """Ordered candidate zero locations for the reciprocal construction.

    Level 0 is {0}; level 1 holds the weight-1 indices outside the info
    set; each further level adds one disjoint weight-1 index.  Levels are
    sorted ascending and concatenated.
    """
    size = 1 << n
    a = set(int(i) for i in info)
    if any(i < 0 or i >= size for i in a):
        raise ValueError(f"info set not within [0, {size})")
    if 0 in a:
        raise ZeroInInfoSetError("channel 0 cannot carry information here")
    level_one = sorted(set(1 << t for t in range(n)) - a)
    levels = [(0,), tuple(level_one)]
    seen = {0, *level_one}
    prev = level_one
    for _ in range(2, n + 1):
        cur = sorted(boxplus(prev, level_one) - a - seen)
        levels.append(tuple(cur))
        seen.update(cur)
        prev = cur
    entries = tuple(i for level in levels for i in level)
    return SeedSequence(entries=entries, levels=tuple(levels))


def reciprocal_rc_family(
    info: Iterable[int],
    n: int,
    zero_counts: Sequence[int],
    model: ChannelModel = ChannelModel.UCM,
    seed: int = 0,
) -> "RcFamily":
    """Family whose zero sets are prefixes of the seed sequence.

    ``zero_counts`` may come in any order; patterns are emitted
    most-punctured (highest rate) first.  Every member is verified
    non-catastrophic; reciprocity is reported via :meth:`RcFamily.report`
    rather than assumed.
    """
    size = 1 << n
    channels = tuple(sorted(set(int(i) for i in info)))
    counts = sorted((int(c) for c in zero_counts), reverse=True)
    if not counts:
        raise ValueError("need at least one zero count")
    if len(set(counts)) != len(counts):
        raise ValueError("zero counts must be distinct")
    if counts[-1] < 0:
        raise ValueError("zero counts must be nonnegative")
    if counts[0] > size - len(channels):
        raise InfeasibleRateError(
            f"puncturing {counts[0]} positions leaves fewer than "
            f"{len(channels)} transmitted coordinates"
        )
    seq = seed_sequence(channels, n)
    if counts[0] > len(seq):
        raise InfeasibleRateError(
            f"seed sequence has only {len(seq)} elements, cannot puncture {counts[0]}"
        )
    patterns = tuple(
        PuncturingPattern.from_zeros(n, seq.entries[:c]) for c in counts
    )
    family = RcFamily(
        n=n,
        info_set=channels,
        model=ChannelModel(model),
        method="reciprocal",
        seed=seed,
        patterns=patterns,
    )
    family.verify()
    return family


@dataclass(frozen=True)
class RcFamily:
    """Nested puncturing patterns sharing one information set.

    Patterns are ordered by decreasing rate: the first member punctures
    the most positions, and every zero set contains the next one.
    """

    n: int
    info_set: tuple[int, ...]
    model: ChannelModel
    method: str
    seed: int
    patterns: tuple[PuncturingPattern, ...]

    def verify(self) -> None:
        """Raise ConstructionViolationError unless the family invariants hold."""
        info = list(self.info_set)
        for pos, pat in enumerate(self.patterns):
            if pat.weight < len(info):
                raise ConstructionViolationError(
                    f"pattern {pos} transmits {pat.weight} < K={len(info)} positions"
                )
            spectrum = z_spectrum(pat.mask)
            dead = [i for i in info if spectrum[i] == 0]
            if dead:
                raise ConstructionViolationError(
                    f"pattern {pos} is catastrophic for channels {dead}"
                )
        for prev, nxt in zip(self.patterns, self.patterns[1:]):
            if not set(prev.zero_set) >= set(nxt.zero_set):
                raise ConstructionViolationError("zero sets are not nested")

    def report(self) -> list[dict]:
        """Per-pattern verification summary (non-catastrophy and reciprocity)."""
        rows = []
        for pos, pat in enumerate(self.patterns):
            spectrum = z_spectrum(pat.mask)
            rows.append(
                {
                    "pattern_id": pos,
                    "np": pat.weight,
                    "zeros": len(pat.zero_set),
                    "non_catastrophic": bool(
                        all(spectrum[i] == 1 for i in self.info_set)
                    ),
                    "reciprocal": is_reciprocal(pat, self.model),
                }
            )
        return rows

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "K": len(self.info_set),
            "info_set": list(self.info_set),
            "model": self.model.value,
            "method": self.method,
            "seed": self.seed,
            "patterns": [
                {"np": pat.weight, "zeros": list(pat.zero_set)}
                for pat in self.patterns
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RcFamily":
        n = int(obj["n"])
        patterns = tuple(
            PuncturingPattern.from_zeros(n, entry["zeros"])
            for entry in obj["patterns"]
        )
        return cls(
            n=n,
            info_set=tuple(sorted(int(i) for i in obj["info_set"])),
            model=ChannelModel(obj["model"]),
            method=str(obj["method"]),
            seed=int(obj["seed"]),
            patterns=patterns,
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "RcFamily":
        return cls.from_json(json.loads(Path(path).read_text()))
