"""Puncturing patterns and boolean capacity analysis of polarized channels.

A pattern is a length-N transmit mask (1 = transmitted, 0 = punctured).
Under the perfect-channel model, the capacity of polarized channel i is a
monotone boolean function of the mask, computed by halving the channel
index while splitting the mask into its even/odd position subsequences:
an even index combines the two half-results with AND, an odd one with OR.
"""

from __future__ import annotations

from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import bit_permute, bit_reverse, dominates_ones, dominates_zeros


class ChannelModel(str, Enum):
    """Stochastic model assigned to punctured positions.

    UCM treats them as sent over a zero-capacity channel (decoder LLR 0);
    DCM pins them to a pre-agreed zero (decoder LLR +inf).
    """

    UCM = "ucm"
    DCM = "dcm"


class PuncturingPattern:
    """Length-N transmit mask with its derived zero-location set."""

    def __init__(self, mask):
        arr = np.asarray(mask, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0 or arr.size & (arr.size - 1):
            raise ValueError("mask length must be a positive power of two")
        if np.any(arr > 1):
            raise ValueError("mask entries must be 0 or 1")
        arr = arr.copy()
        arr.setflags(write=False)
        self.mask = arr
        self.n = int(arr.size).bit_length() - 1

    @classmethod
    def from_zeros(cls, n: int, zeros: Iterable[int]) -> "PuncturingPattern":
        size = 1 << n
        mask = np.ones(size, dtype=np.uint8)
        for z in zeros:
            if not 0 <= z < size:
                raise ValueError(f"zero location {z} out of range for n={n}")
            mask[z] = 0
        return cls(mask)

    @classmethod
    def from_string(cls, text: str) -> "PuncturingPattern":
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"pattern string must be over 0/1, got {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_json(cls, obj: dict) -> "PuncturingPattern":
        return cls.from_zeros(int(obj["n"]), obj["zeros"])

    @property
    def size(self) -> int:
        return self.mask.size

    @property
    def weight(self) -> int:
        """Transmitted length N_p, the number of ones."""
        return int(self.mask.sum())

    @cached_property
    def zero_set(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.mask == 0))

    @cached_property
    def transmitted_positions(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.mask))

    def complement(self) -> "PuncturingPattern":
        return PuncturingPattern(1 - self.mask)

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.mask)

    def to_json(self) -> dict:
        return {"n": self.n, "zeros": list(self.zero_set)}

    def __eq__(self, other) -> bool:
        return isinstance(other, PuncturingPattern) and np.array_equal(
            self.mask, other.mask
        )

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __repr__(self) -> str:
        return f"PuncturingPattern({self.to_string()!r})"


def _as_mask(pattern) -> np.ndarray:
    if isinstance(pattern, PuncturingPattern):
        return pattern.mask
    return np.asarray(pattern, dtype=np.uint8)


def z_spectrum(mask) -> np.ndarray:
    """Boolean capacities of all N polarized channels; accepts (..., N) masks."""
    m = _as_mask(mask)
    if m.shape[-1] == 1:
        return m.copy()
    even = z_spectrum(m[..., 0::2])
    odd = z_spectrum(m[..., 1::2])
    out = np.empty_like(m)
    out[..., 0::2] = even & odd
    out[..., 1::2] = even | odd
    return out


def _z_rec(i: int, m: np.ndarray) -> np.ndarray:
    if m.shape[-1] == 1:
        return m[..., 0]
    even = _z_rec(i >> 1, m[..., 0::2])
    odd = _z_rec(i >> 1, m[..., 1::2])
    return (even & odd) if i % 2 == 0 else (even | odd)


def z_capacity(i: int, pattern) -> int:
    """Boolean capacity of polarized channel ``i`` under the given mask."""
    m = _as_mask(pattern)
    if not 0 <= i < m.shape[-1]:
        raise ValueError(f"channel index {i} out of range")
    return int(_z_rec(i, m))


def z_capacity_many(i: int, masks) -> np.ndarray:
    """Vectorized :func:`z_capacity` over a (batch, N) array of masks."""
    m = np.asarray(masks, dtype=np.uint8)
    if not 0 <= i < m.shape[-1]:
        raise ValueError(f"channel index {i} out of range")
    return _z_rec(i, m)


def ucm_zero_set(pattern) -> tuple[int, ...]:
    """Channels with zero boolean capacity; these must be frozen under UCM."""
    spectrum = z_spectrum(_as_mask(pattern))
    return tuple(int(i) for i in np.flatnonzero(spectrum == 0))


def dcm_frozen_set(pattern) -> tuple[int, ...]:
    """Channels that must carry dependent frozen bits under DCM.

    Evaluated as the channels whose boolean capacity is 1 on the
    complemented mask.
    """
    spectrum = z_spectrum(1 - _as_mask(pattern))
    return tuple(int(i) for i in np.flatnonzero(spectrum == 1))


def is_reciprocal(pattern, model: ChannelModel) -> bool:
    """Whether the zero set equals the model's induced frozen set.

    Checked through the covering characterization: under UCM the zero set
    must contain index 0 and be closed downward under the ones-domination
    order; under DCM it must contain index N-1 and be closed under
    zeros-domination.  The empty pattern is reciprocal under both models.
    """
    pat = pattern if isinstance(pattern, PuncturingPattern) else PuncturingPattern(pattern)
    zeros = set(pat.zero_set)
    if not zeros:
        return True
    size = pat.size
    model = ChannelModel(model)
    if model is ChannelModel.UCM:
        if 0 not in zeros:
            return False
        covered = dominates_ones
    else:
        if size - 1 not in zeros:
            return False
        covered = dominates_zeros
    for i in zeros:
        for j in range(size):
            if covered(i, j) and j not in zeros:
                return False
    return True


def permuted_pattern(pattern: PuncturingPattern, perm: Sequence[int]) -> PuncturingPattern:
    """Pattern whose zero set is the digit-permuted image of the input's."""
    if len(perm) != pattern.n:
        raise ValueError(f"permutation length {len(perm)} != n={pattern.n}")
    zeros = [bit_permute(z, perm) for z in pattern.zero_set]
    return PuncturingPattern.from_zeros(pattern.n, zeros)


def qup_pattern(n: int, s: int) -> PuncturingPattern:
    """Quasi-uniform puncturing: bit-reversed image of zeros {0..s-1}."""
    if not 0 <= s <= (1 << n):
        raise ValueError(f"puncture count {s} out of range for n={n}")
    return PuncturingPattern.from_zeros(n, [bit_reverse(i, n) for i in range(s)])


def rqup_pattern(n: int, s: int) -> PuncturingPattern:
    """Reverse QUP: bit-reversed image of the top-index block {N-s..N-1}."""
    size = 1 << n
    if not 0 <= s <= size:
        raise ValueError(f"puncture count {s} out of range for n={n}")
    return PuncturingPattern.from_zeros(n, [bit_reverse(i, n) for i in range(size - s, size)])
