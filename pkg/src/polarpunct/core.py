"""Index arithmetic, GF(2) linear algebra, and the polar transform.

Indices are 0-based throughout.  Binary expansions are stored MSB-first,
so ``binary_expansion(5, 3) == (1, 0, 1)``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import SingularMatrixError

# Explicit generator matrices are refused above this stage count; a dense
# G_N at n = 20 already packs 2^40 bits.
MAX_GENERATOR_STAGES = 20


def binary_expansion(index: int, n: int) -> tuple[int, ...]:
    """MSB-first binary digits of ``index`` using ``n`` positions."""
    if n < 0:
        raise ValueError(f"stage count must be nonnegative, got {n}")
    if not 0 <= index < (1 << n):
        raise ValueError(f"index {index} out of range for n={n}")
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def expansion_to_index(bits: Sequence[int]) -> int:
    """Inverse of :func:`binary_expansion`."""
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"digits must be 0/1, got {b!r}")
        index = (index << 1) | b
    return index


def hamming_weight(index: int) -> int:
    """Number of ones in the binary expansion of ``index``."""
    if index < 0:
        raise ValueError("index must be nonnegative")
    return int(index).bit_count()


def bit_permute(index: int, perm: Sequence[int]) -> int:
    """Permute the binary digits of ``index``.

    ``perm`` maps output digit position k (MSB-first) to the source digit
    position ``perm[k]``; it must be a permutation of ``range(len(perm))``.
    """
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {perm!r}")
    digits = binary_expansion(index, n)
    return expansion_to_index(tuple(digits[p] for p in perm))


def bit_reverse(index: int, n: int) -> int:
    """Digit-reversed image of ``index`` within an ``n``-digit window."""
    return expansion_to_index(binary_expansion(index, n)[::-1])


def dominates_ones(i: int, j: int) -> bool:
    """True when every one-digit of ``j`` is also a one-digit of ``i``."""
    if i < 0 or j < 0:
        raise ValueError("indices must be nonnegative")
    return (j & ~i) == 0


def dominates_zeros(i: int, j: int) -> bool:
    """True when every zero-digit of ``j`` is also a zero-digit of ``i``.

    Equivalently, the one-digits of ``i`` are a subset of those of ``j``,
    which makes the relation independent of the digit-window width.
    """
    return dominates_ones(j, i)


class Gf2Matrix:
    """Binary matrix with rows packed into Python integers (bit j = column j)."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[int], ncols: int):
        self.rows = list(rows)
        self.ncols = ncols
        mask = (1 << ncols) - 1
        if any(r < 0 or r & ~mask for r in self.rows):
            raise ValueError("row word has bits outside the column range")

    @classmethod
    def from_dense(cls, array) -> "Gf2Matrix":
        a = np.asarray(array, dtype=np.uint8) & 1
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        rows = [int(sum(int(v) << j for j, v in enumerate(row))) for row in a]
        return cls(rows, a.shape[1])

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((len(self.rows), self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def submatrix(self, row_idx: Iterable[int], col_idx: Iterable[int]) -> "Gf2Matrix":
        cols = list(col_idx)
        packed = []
        for i in row_idx:
            r = self.rows[i]
            packed.append(sum(((r >> c) & 1) << k for k, c in enumerate(cols)))
        return Gf2Matrix(packed, len(cols))

    def rank(self) -> int:
        return _rank_of_rows(self.rows)

    def inverse(self) -> "Gf2Matrix":
        """Inverse over GF(2); raises :class:`SingularMatrixError` if singular."""
        n = self.ncols
        if len(self.rows) != n:
            raise SingularMatrixError(f"matrix is {self.shape}, not square")
        a = list(self.rows)
        inv = [1 << i for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if (a[r] >> col) & 1), None)
            if pivot is None:
                raise SingularMatrixError(f"rank-deficient at column {col}")
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            for r in range(n):
                if r != col and (a[r] >> col) & 1:
                    a[r] ^= a[col]
                    inv[r] ^= inv[col]
        return Gf2Matrix(inv, n)

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        out = []
        for r in self.rows:
            acc = 0
            w = r
            while w:
                j = (w & -w).bit_length() - 1
                acc ^= other.rows[j]
                w &= w - 1
            out.append(acc)
        return Gf2Matrix(out, other.ncols)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Gf2Matrix)
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.ncols, tuple(self.rows)))

    def __repr__(self) -> str:
        return f"Gf2Matrix(shape={self.shape})"


def _rank_of_rows(rows: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for row in rows:
        cur = row
        while cur:
            lead = cur.bit_length() - 1
            if lead in basis:
                cur ^= basis[lead]
            else:
                basis[lead] = cur
                break
    return len(basis)


def gf2_rank(m: Gf2Matrix) -> int:
    """Rank of ``m`` over GF(2); 0 for an empty matrix."""
    return m.rank()


def gf2_solve_right(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    """Solve X A = B for X, i.e. compute ``B @ a.inverse()``."""
    return b @ a.inverse()


@lru_cache(maxsize=8)
def generator_matrix(n: int) -> Gf2Matrix:
    """The rate-one generator G_N, the n-fold Kronecker power of [[1,0],[1,1]]."""
    if n < 0:
        raise ValueError("stage count must be nonnegative")
    if n > MAX_GENERATOR_STAGES:
        raise ValueError(
            f"n={n} exceeds the explicit-matrix cap ({MAX_GENERATOR_STAGES})"
        )
    rows = [1]
    for level in range(n):
        half = 1 << level
        rows = rows + [r | (r << half) for r in rows]
    return Gf2Matrix(rows, 1 << n)


def polar_encode(u) -> np.ndarray:
    """Map input bits to the codeword u G_N via the in-place butterfly.

    Accepts a length-N vector or a (batch, N) array; N must be a power of two.
    """
    x = np.array(u, dtype=np.uint8, copy=True) & 1
    n_len = x.shape[-1]
    if n_len == 0 or n_len & (n_len - 1):
        raise ValueError(f"length {n_len} is not a power of two")
    size = n_len
    while size >= 2:
        half = size // 2
        view = x.reshape(-1, size)
        view[:, :half] ^= view[:, half:]
        size = half
    return x
