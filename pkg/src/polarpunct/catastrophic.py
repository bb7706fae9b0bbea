"""Catastrophic puncturing patterns: membership, enumeration, weight polynomials.

A pattern is catastrophic for channel i when the channel's boolean capacity
is zero, which forces a block error no matter how good the physical channel
is.  Pattern sets are built by the same even/odd tree recursion as the
capacity functions; the weight distribution tracks only zero counts and so
scales far beyond enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .core import generator_matrix, hamming_weight, binary_expansion
from .errors import EnumerationCapError
from .patterns import PuncturingPattern, z_capacity, z_spectrum

DEFAULT_ENUMERATION_CAP = 4


def is_catastrophic(pattern, info_set, require_all: bool = False) -> bool:
    """Whether the pattern kills an information channel.

    Default is the exists-reading: one dead channel in ``info_set`` already
    guarantees block errors.  ``require_all`` switches to the strict
    all-dead reading.
    """
    info = sorted(set(int(i) for i in info_set))
    if not info:
        return False
    mask = pattern.mask if isinstance(pattern, PuncturingPattern) else np.asarray(pattern, dtype=np.uint8)
    size = mask.shape[-1]
    if info[0] < 0 or info[-1] >= size:
        raise ValueError(f"info set not within [0, {size})")
    spectrum = z_spectrum(mask)
    dead = spectrum[info] == 0
    return bool(dead.all()) if require_all else bool(dead.any())


def rank_noncatastrophic_check(i: int, pattern) -> bool:
    """Rank-increment certificate: channel i is non-catastrophic iff
    restricting G_N to the transmitted columns, row i is independent of
    the rows below it."""
    pat = pattern if isinstance(pattern, PuncturingPattern) else PuncturingPattern(pattern)
    size = pat.size
    if not 0 <= i < size:
        raise ValueError(f"channel index {i} out of range")
    return bool(noncatastrophic_rank_profile(pat)[i])


def noncatastrophic_rank_profile(pattern) -> np.ndarray:
    """Rank-increment verdicts for all channels in one elimination sweep.

    Processes rows of G_N bottom-up, masking out punctured columns; channel
    i passes when its masked row is independent of the span of rows below.
    """
    pat = pattern if isinstance(pattern, PuncturingPattern) else PuncturingPattern(pattern)
    size = pat.size
    g = generator_matrix(pat.n)
    col_mask = 0
    for j in pat.transmitted_positions:
        col_mask |= 1 << j
    out = np.zeros(size, dtype=bool)
    basis: dict[int, int] = {}
    for i in range(size - 1, -1, -1):
        cur = g.rows[i] & col_mask
        while cur:
            lead = cur.bit_length() - 1
            if lead in basis:
                cur ^= basis[lead]
            else:
                basis[lead] = cur
                out[i] = True
                break
    return out


@dataclass(frozen=True)
class CatastrophicSet:
    """All catastrophic patterns for one channel, packed as integers.

    Bit j of a member word is the mask value p_j.
    """

    channel: int
    n: int
    patterns: frozenset[int]

    def __len__(self) -> int:
        return len(self.patterns)

    def __contains__(self, pattern) -> bool:
        if isinstance(pattern, int):
            return pattern in self.patterns
        mask = pattern.mask if isinstance(pattern, PuncturingPattern) else np.asarray(pattern)
        word = int(sum(int(b) << j for j, b in enumerate(mask)))
        return word in self.patterns

    def pattern_strings(self) -> list[str]:
        size = 1 << self.n
        strings = [
            "".join("1" if (w >> j) & 1 else "0" for j in range(size))
            for w in self.patterns
        ]
        return sorted(strings)


def _spread(word: int, nbits: int) -> int:
    """Place bit t of ``word`` at position 2t."""
    out = 0
    for t in range(nbits):
        out |= ((word >> t) & 1) << (2 * t)
    return out


def enumerate_catastrophic(i: int, n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> CatastrophicSet:
    """Exhaustive catastrophic set for channel ``i`` at stage count ``n``.

    Built by the binary-tree recursion over the digits of ``i``: an OR
    level interleaves pairs drawn from the child set, an AND level pairs a
    child member with a free half.  Desk-scale only; the set size reaches
    2^N - 1 for channel 0.
    """
    if not 0 <= i < (1 << n):
        raise ValueError(f"channel index {i} out of range for n={n}")
    if n > cap:
        raise EnumerationCapError(
            f"n={n} exceeds the enumeration cap ({cap}); raise `cap` to force"
        )
    members = {0}
    half_bits = 1
    for bit in binary_expansion(i, n):
        if bit:
            members = {
                _spread(q, half_bits) | (_spread(r, half_bits) << 1)
                for q in members
                for r in members
            }
        else:
            free = range(1 << half_bits)
            left = {
                _spread(q, half_bits) | (_spread(r, half_bits) << 1)
                for q in members
                for r in free
            }
            right = {
                _spread(q, half_bits) | (_spread(r, half_bits) << 1)
                for q in free
                for r in members
            }
            members = left | right
        half_bits *= 2
    return CatastrophicSet(channel=i, n=n, patterns=frozenset(members))


@dataclass(frozen=True)
class ZeroWeightPolynomial:
    """Counts of catastrophic patterns by number of punctured positions.

    ``coeffs[s]`` is the number of catastrophic patterns with exactly s
    zeros; the sequence always has length ``block_length + 1``.
    """

    coeffs: tuple[int, ...]
    block_length: int

    def __post_init__(self):
        if len(self.coeffs) != self.block_length + 1:
            raise ValueError("coefficient sequence must cover degrees 0..N")
        if any(c < 0 for c in self.coeffs):
            raise ValueError("coefficients are pattern counts and must be >= 0")

    @classmethod
    def single_position(cls) -> "ZeroWeightPolynomial":
        # base case: a lone punctured position, the polynomial z
        return cls(coeffs=(0, 1), block_length=1)

    def min_zeros(self) -> int | None:
        for s, c in enumerate(self.coeffs):
            if c:
                return s
        return None

    def total(self) -> int:
        return sum(self.coeffs)

    def to_pairs(self) -> list[list[int]]:
        return [[s, c] for s, c in enumerate(self.coeffs) if c]


def _poly_mul(a: tuple[int, ...], b: tuple[int, ...]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for s, ca in enumerate(a):
        if ca:
            for t, cb in enumerate(b):
                if cb:
                    out[s + t] += ca * cb
    return out


def _binomial_coeffs(m: int) -> tuple[int, ...]:
    return tuple(comb(m, s) for s in range(m + 1))


def poly_or(a: ZeroWeightPolynomial, b: ZeroWeightPolynomial) -> ZeroWeightPolynomial:
    """OR node: zero sets concatenate, so counts convolve."""
    coeffs = _poly_mul(a.coeffs, b.coeffs)
    return ZeroWeightPolynomial(tuple(coeffs), a.block_length + b.block_length)


def poly_and(a: ZeroWeightPolynomial, b: ZeroWeightPolynomial) -> ZeroWeightPolynomial:
    """AND node: one side catastrophic, the other free, minus the overlap.

    The free side ranges over all patterns of the sibling half, hence the
    (1+z) power uses the sibling's block length.
    """
    n_out = a.block_length + b.block_length
    first = _poly_mul(a.coeffs, _binomial_coeffs(b.block_length))
    second = _poly_mul(b.coeffs, _binomial_coeffs(a.block_length))
    overlap = _poly_mul(a.coeffs, b.coeffs)
    coeffs = [f + s - o for f, s, o in zip(first, second, overlap)]
    return ZeroWeightPolynomial(tuple(coeffs), n_out)


def weight_distribution(i: int, n: int) -> ZeroWeightPolynomial:
    """Zero-count distribution of channel i's catastrophic patterns.

    Doubles the block length once per digit of ``i`` (MSB first), applying
    the AND rule for a 0 digit and the OR rule for a 1 digit.
    """
    if not 0 <= i < (1 << n):
        raise ValueError(f"channel index {i} out of range for n={n}")
    if n > 20:
        raise ValueError("polynomial degree 2^n exceeds the n<=20 cap")
    poly = ZeroWeightPolynomial.single_position()
    for bit in binary_expansion(i, n):
        poly = poly_or(poly, poly) if bit else poly_and(poly, poly)
    return poly


def min_catastrophic_zeros(i: int) -> int:
    """Patterns with fewer than 2^wt(i) zeros cannot kill channel i."""
    if i < 0:
        raise ValueError("channel index must be nonnegative")
    return 1 << hamming_weight(i)
