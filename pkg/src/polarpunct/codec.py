"""Encoding, CRC handling, and successive-cancellation (list) decoding.

The decoders run on the natural-order transform (no bit reversal): the top
split of the decode tree pairs LLR positions t and t+N/2.  Frozen bits are
forced to zero; under DCM that is only valid for reciprocal patterns, where
the dependent frozen values are provably all-zero.

An information decision made on an exactly-zero LLR carries no information
(zero-capacity channel) and is flagged as a guess; the simulator counts
such frames as errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .core import generator_matrix, polar_encode
from .errors import NonReciprocalDcmError
from .patterns import (
    ChannelModel,
    PuncturingPattern,
    dcm_frozen_set,
    is_reciprocal,
    ucm_zero_set,
)

DEFAULT_LLR_SAT = 300.0

# widths used in the experiments; register starts at zero, no final xor
CRC_POLYS = {5: 0x05, 8: 0x07}


@dataclass(frozen=True)
class CrcConfig:
    width: int
    poly: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("CRC width must be positive")
        if not 0 < self.poly < (1 << self.width):
            raise ValueError("polynomial must fit the register width")

    @classmethod
    def of_width(cls, width: int) -> "CrcConfig":
        if width not in CRC_POLYS:
            raise ValueError(f"no default polynomial for width {width}")
        return cls(width=width, poly=CRC_POLYS[width])


def _crc_register(bits: np.ndarray, crc: CrcConfig) -> np.ndarray:
    """Run the MSB-first shift register over the last axis; returns (...,) words."""
    reg = np.zeros(bits.shape[:-1], dtype=np.int64)
    mask = (1 << crc.width) - 1
    for k in range(bits.shape[-1]):
        feedback = (bits[..., k].astype(np.int64) ^ (reg >> (crc.width - 1))) & 1
        reg = ((reg << 1) & mask) ^ (feedback * crc.poly)
    return reg


def crc_remainder(message, crc: CrcConfig) -> np.ndarray:
    """CRC bits for ``message``, MSB of the register first."""
    bits = np.asarray(message, dtype=np.uint8)
    reg = int(_crc_register(bits, crc))
    return np.array(
        [(reg >> (crc.width - 1 - t)) & 1 for t in range(crc.width)], dtype=np.uint8
    )


def crc_attach(message, crc: CrcConfig | None) -> np.ndarray:
    """Message with its CRC appended; identity when no CRC is configured."""
    bits = np.asarray(message, dtype=np.uint8)
    if crc is None:
        return bits.copy()
    return np.concatenate([bits, crc_remainder(bits, crc)])


def crc_check(bits, crc: CrcConfig) -> bool:
    """Whether a message-plus-CRC block is consistent."""
    return int(_crc_register(np.asarray(bits, dtype=np.uint8), crc)) == 0


def dcm_frozen_values(u_known, e_set: Iterable[int], b_set: Iterable[int], n: int) -> np.ndarray:
    """Frozen values on E forcing the codeword to vanish on B.

    Solves u_E = u_{E^c} G(E^c, B) G(E, B)^{-1}; ``u_known`` holds the bits
    on the complement of E in ascending index order.
    """
    size = 1 << n
    e_list = sorted(set(int(i) for i in e_set))
    b_list = sorted(set(int(i) for i in b_set))
    if len(e_list) != len(b_list):
        raise ValueError(f"|E|={len(e_list)} and |B|={len(b_list)} must match")
    known = np.asarray(u_known, dtype=np.uint8)
    ec_list = [i for i in range(size) if i not in set(e_list)]
    if known.shape[-1] != len(ec_list):
        raise ValueError(f"expected {len(ec_list)} known bits, got {known.shape[-1]}")
    if not e_list:
        return np.zeros(known.shape[:-1] + (0,), dtype=np.uint8)
    g = generator_matrix(n)
    solver = g.submatrix(ec_list, b_list) @ g.submatrix(e_list, b_list).inverse()
    return (known @ solver.to_dense()) % 2


class PolarCodeSpec:
    """Code parameters: mother length, unfrozen set, model, pattern, CRC.

    ``info_set`` is the full unfrozen set; when a CRC is configured its
    bits occupy the last ``crc.width`` positions of the set, so the
    message length is ``len(info_set) - crc.width``.
    """

    def __init__(
        self,
        n: int,
        info_set: Iterable[int],
        model: ChannelModel = ChannelModel.UCM,
        pattern: PuncturingPattern | None = None,
        crc: CrcConfig | int | None = None,
        llr_sat: float = DEFAULT_LLR_SAT,
        strict: bool = True,
    ):
        self.n = int(n)
        self.size = 1 << self.n
        self.info_set = tuple(sorted(set(int(i) for i in info_set)))
        self.model = ChannelModel(model)
        self.pattern = pattern if pattern is not None else PuncturingPattern.from_zeros(self.n, [])
        if isinstance(crc, int):
            crc = CrcConfig.of_width(crc)
        self.crc = crc
        self.llr_sat = float(llr_sat)
        if self.pattern.size != self.size:
            raise ValueError("pattern length does not match the mother code")
        if self.info_set and not (0 <= self.info_set[0] and self.info_set[-1] < self.size):
            raise ValueError("info set outside the channel index range")
        if len(self.info_set) > self.pattern.weight:
            raise ValueError(
                f"{len(self.info_set)} unfrozen bits exceed the "
                f"{self.pattern.weight} transmitted coordinates"
            )
        if self.crc is not None and self.crc.width >= max(len(self.info_set), 1):
            raise ValueError("CRC cannot fill the whole info set")
        if self.model is ChannelModel.UCM:
            forced = ucm_zero_set(self.pattern)
        else:
            forced = dcm_frozen_set(self.pattern)
        self.forced_frozen = forced
        self.dead_info_channels = tuple(sorted(set(self.info_set) & set(forced)))
        if self.dead_info_channels:
            if self.model is ChannelModel.DCM:
                raise ValueError(
                    f"info channels {self.dead_info_channels} are constrained "
                    "by the pattern under DCM; encoding is undefined"
                )
            if strict:
                raise ValueError(
                    f"info channels {self.dead_info_channels} have zero capacity "
                    "under this pattern (pass strict=False to simulate anyway)"
                )

    @property
    def transmitted_length(self) -> int:
        return self.pattern.weight

    @property
    def message_length(self) -> int:
        return len(self.info_set) - (self.crc.width if self.crc else 0)

    @cached_property
    def frozen_set(self) -> tuple[int, ...]:
        info = set(self.info_set)
        return tuple(i for i in range(self.size) if i not in info)

    @cached_property
    def _info_positions(self) -> np.ndarray:
        return np.array(self.info_set, dtype=np.int64)

    @cached_property
    def _dcm_reciprocal(self) -> bool:
        return is_reciprocal(self.pattern, ChannelModel.DCM)

    @cached_property
    def _dcm_solver(self) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
        """(E positions, E^c positions, dense solve matrix) or None when B is empty."""
        if self.model is not ChannelModel.DCM or not self.pattern.zero_set:
            return None
        e_list = list(dcm_frozen_set(self.pattern))
        b_list = list(self.pattern.zero_set)
        ec_list = [i for i in range(self.size) if i not in set(e_list)]
        g = generator_matrix(self.n)
        solver = g.submatrix(ec_list, b_list) @ g.submatrix(e_list, b_list).inverse()
        return (
            np.array(e_list, dtype=np.int64),
            np.array(ec_list, dtype=np.int64),
            solver.to_dense(),
        )

    def decoder_frozen(self) -> tuple[np.ndarray, np.ndarray]:
        """(frozen mask, frozen values) as seen by the decoder."""
        if self.model is ChannelModel.DCM and not self._dcm_reciprocal:
            raise NonReciprocalDcmError(
                "DCM decoding needs message-independent frozen values, which "
                "only reciprocal patterns provide; this pattern is not reciprocal"
            )
        mask = np.ones(self.size, dtype=bool)
        mask[self._info_positions] = False
        return mask, np.zeros(self.size, dtype=np.uint8)


def encode_to_mother(spec: PolarCodeSpec, message) -> np.ndarray:
    """Full length-N codeword(s) before puncturing; accepts (m,) or (batch, m)."""
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape[-1] != spec.message_length:
        raise ValueError(
            f"expected {spec.message_length} message bits, got {msg.shape[-1]}"
        )
    single = msg.ndim == 1
    msg = np.atleast_2d(msg)
    if spec.crc is not None:
        reg = _crc_register(msg, spec.crc)
        shifts = spec.crc.width - 1 - np.arange(spec.crc.width)
        tail = ((reg[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
        bits = np.concatenate([msg, tail], axis=1)
    else:
        bits = msg
    u = np.zeros((msg.shape[0], spec.size), dtype=np.uint8)
    u[:, spec._info_positions] = bits
    if spec._dcm_solver is not None:
        e_pos, ec_pos, solver = spec._dcm_solver
        u[:, e_pos] = (u[:, ec_pos] @ solver) % 2
    x = polar_encode(u)
    return x[0] if single else x


def encode(spec: PolarCodeSpec, message) -> np.ndarray:
    """Transmitted codeword(s): the mother codeword on the unpunctured positions."""
    x = encode_to_mother(spec, message)
    keep = np.array(spec.pattern.transmitted_positions, dtype=np.int64)
    return x[..., keep]


def assign_llrs(received, pattern: PuncturingPattern, model: ChannelModel, sat: float = DEFAULT_LLR_SAT) -> np.ndarray:
    """Place received LLRs at transmitted positions; fill punctured ones.

    Punctured positions get 0 under UCM (no information) and +sat under
    DCM (known to be the pre-agreed zero).
    """
    values = np.asarray(received, dtype=float)
    if values.shape[-1] != pattern.weight:
        raise ValueError(
            f"expected {pattern.weight} received values, got {values.shape[-1]}"
        )
    model = ChannelModel(model)
    fill = 0.0 if model is ChannelModel.UCM else float(sat)
    out = np.full(values.shape[:-1] + (pattern.size,), fill, dtype=float)
    out[..., np.array(pattern.transmitted_positions, dtype=np.int64)] = values
    return out


@dataclass
class DecodeResult:
    """Decoder output: bits on the unfrozen set plus bookkeeping."""

    info_bits: np.ndarray
    path_metric: float
    crc_ok: bool | None
    guessed: bool

    def message(self, spec: PolarCodeSpec) -> np.ndarray:
        return self.info_bits[: spec.message_length]


def _f_minsum(a, b):
    # sign(a)sign(b)min(|a|,|b|); a zero either side yields exactly 0
    return np.copysign(np.minimum(np.abs(a), np.abs(b)), a * b)


def _f_exact(a, b):
    prod = np.tanh(a / 2.0) * np.tanh(b / 2.0)
    return 2.0 * np.arctanh(np.clip(prod, -1.0 + 1e-15, 1.0 - 1e-15))


def _g_update(a, b, left_bits):
    return b + (1.0 - 2.0 * left_bits) * a


def sc_decode(llrs, spec: PolarCodeSpec, exact: bool = False) -> DecodeResult:
    """Plain successive cancellation over a length-N LLR frame."""
    alpha = np.asarray(llrs, dtype=float)
    if alpha.shape != (spec.size,):
        raise ValueError(f"expected {spec.size} LLRs, got {alpha.shape}")
    frozen_mask, frozen_vals = spec.decoder_frozen()
    f_node = _f_exact if exact else _f_minsum
    u_hat = np.zeros(spec.size, dtype=np.uint8)
    state = {"metric": 0.0, "guessed": False}

    def descend(node_llr: np.ndarray, pos: int) -> np.ndarray:
        if node_llr.size == 1:
            a = float(node_llr[0])
            hard = 1 if a < 0.0 else 0
            if frozen_mask[pos]:
                u = int(frozen_vals[pos])
            else:
                if a == 0.0:
                    state["guessed"] = True
                u = hard
            if u != hard:
                state["metric"] += abs(a)
            u_hat[pos] = u
            return np.array([u], dtype=np.uint8)
        half = node_llr.size // 2
        a_left, a_right = node_llr[:half], node_llr[half:]
        beta_left = descend(f_node(a_left, a_right), pos)
        beta_right = descend(_g_update(a_left, a_right, beta_left), pos + half)
        return np.concatenate([beta_left ^ beta_right, beta_right])

    descend(alpha, 0)
    info_bits = u_hat[spec._info_positions]
    crc_ok = crc_check(info_bits, spec.crc) if spec.crc else None
    return DecodeResult(
        info_bits=info_bits,
        path_metric=state["metric"],
        crc_ok=crc_ok,
        guessed=state["guessed"],
    )


def _scl_paths(llr: np.ndarray, frozen_mask, frozen_vals, list_size: int, exact: bool):
    """Batched list decoding core.

    Returns (bits (B, L, N), metrics (B, L), guessed (B,)).  Path buffers
    are permuted lazily: prune permutations are composed per level and
    applied on the next read, and decisions are reconstructed at the end by
    backtracking through per-position parent pointers.
    """
    batch, size = llr.shape
    n = size.bit_length() - 1
    n_paths = int(list_size)
    f_node = _f_exact if exact else _f_minsum

    alphas = [np.zeros((batch, n_paths, 1 << d)) for d in range(n + 1)]
    alphas[n][:] = llr[:, None, :]
    betas = [np.zeros((batch, n_paths, 1 << d), dtype=np.uint8) for d in range(n + 1)]
    bleft = [np.zeros((batch, n_paths, 1 << max(d - 1, 0)), dtype=np.uint8) for d in range(n + 1)]
    pend_a: list[np.ndarray | None] = [None] * (n + 1)
    pend_b: list[np.ndarray | None] = [None] * (n + 1)

    metrics = np.full((batch, n_paths), np.inf)
    metrics[:, 0] = 0.0
    parent_hist = np.zeros((batch, n_paths, size), dtype=np.int64)
    bit_hist = np.zeros((batch, n_paths, size), dtype=np.uint8)
    guessed = np.zeros(batch, dtype=bool)
    identity = np.broadcast_to(np.arange(n_paths, dtype=np.int64), (batch, n_paths))

    def gather(arr: np.ndarray, idx: np.ndarray) -> np.ndarray:
        return np.take_along_axis(arr, idx[:, :, None], axis=1)

    def read_alpha(level: int) -> np.ndarray:
        pend = pend_a[level]
        if pend is not None:
            alphas[level] = gather(alphas[level], pend)
            pend_a[level] = None
        return alphas[level]

    def read_bleft(level: int) -> np.ndarray:
        pend = pend_b[level]
        if pend is not None:
            bleft[level] = gather(bleft[level], pend)
            pend_b[level] = None
        return bleft[level]

    def compose_pending(parent: np.ndarray, pos: int) -> None:
        # Only the live buffer per ancestor level needs the permutation: in
        # the left subtree the node's alpha is still awaiting its g-read; in
        # the right subtree only the stored left-half bits are.  Everything
        # else is rewritten before its next read.
        for level in range(1, n + 1):
            if (pos >> (level - 1)) & 1:
                pend = pend_b[level]
                pend_b[level] = parent.copy() if pend is None else np.take_along_axis(pend, parent, axis=1)
            else:
                pend = pend_a[level]
                pend_a[level] = parent.copy() if pend is None else np.take_along_axis(pend, parent, axis=1)

    def leaf(pos: int) -> None:
        nonlocal metrics
        a = read_alpha(0)[:, :, 0]
        if frozen_mask[pos]:
            val = int(frozen_vals[pos])
            mismatch = (a < 0.0) != bool(val)
            metrics = metrics + np.where(mismatch, np.abs(a), 0.0)
            betas[0][:, :, 0] = val
            parent_hist[:, :, pos] = identity
            bit_hist[:, :, pos] = val
            return
        guessed[a[:, 0] == 0.0] = True
        pm0 = metrics + np.where(a < 0.0, -a, 0.0)
        pm1 = metrics + np.where(a < 0.0, 0.0, a)
        cand = np.concatenate([pm0, pm1], axis=1)
        keep = np.argsort(cand, axis=1, kind="stable")[:, :n_paths]
        parent = keep % n_paths
        metrics = np.take_along_axis(cand, keep, axis=1)
        compose_pending(parent, pos)
        bit = (keep // n_paths).astype(np.uint8)
        parent_hist[:, :, pos] = parent
        bit_hist[:, :, pos] = bit
        betas[0][:, :, 0] = bit

    def descend(level: int, pos: int) -> None:
        if level == 0:
            leaf(pos)
            return
        half = 1 << (level - 1)
        node = read_alpha(level)
        alphas[level - 1] = f_node(node[:, :, :half], node[:, :, half:])
        pend_a[level - 1] = None
        descend(level - 1, pos)
        bleft[level][:] = betas[level - 1]
        pend_b[level] = None
        node = read_alpha(level)
        alphas[level - 1] = _g_update(node[:, :, :half], node[:, :, half:], bleft[level])
        pend_a[level - 1] = None
        descend(level - 1, pos + half)
        left_bits = read_bleft(level)
        betas[level][:, :, :half] = left_bits ^ betas[level - 1]
        betas[level][:, :, half:] = betas[level - 1]

    descend(n, 0)

    bits = np.zeros((batch, n_paths, size), dtype=np.uint8)
    cursor = identity.copy()
    for pos in range(size - 1, -1, -1):
        bits[:, :, pos] = np.take_along_axis(bit_hist[:, :, pos], cursor, axis=1)
        cursor = np.take_along_axis(parent_hist[:, :, pos], cursor, axis=1)
    return bits, metrics, guessed


def scl_decode_batch(llrs, spec: PolarCodeSpec, list_size: int = 8, exact: bool = False):
    """CRC-aided list decoding of a (batch, N) LLR array.

    Returns (info_bits (batch, |A|), metrics (batch,), crc_ok (batch,) or
    None, guessed (batch,)).  Among CRC-passing paths the best metric wins;
    if none pass, the best path overall is returned.
    """
    llr = np.atleast_2d(np.asarray(llrs, dtype=float))
    if llr.shape[-1] != spec.size:
        raise ValueError(f"expected {spec.size} LLRs, got {llr.shape[-1]}")
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    frozen_mask, frozen_vals = spec.decoder_frozen()
    bits, metrics, guessed = _scl_paths(llr, frozen_mask, frozen_vals, list_size, exact)
    info = bits[:, :, spec._info_positions]
    order = np.argsort(metrics, axis=1, kind="stable")
    valid = np.isfinite(metrics)
    if spec.crc is None:
        pick = order[:, 0]
        crc_ok = None
    else:
        passing = (_crc_register(info, spec.crc) == 0) & valid
        passing_sorted = np.take_along_axis(passing, order, axis=1)
        first_pass = np.argmax(passing_sorted, axis=1)
        any_pass = passing_sorted.any(axis=1)
        pick = np.where(
            any_pass,
            np.take_along_axis(order, first_pass[:, None], axis=1)[:, 0],
            order[:, 0],
        )
        crc_ok = np.take_along_axis(passing, pick[:, None], axis=1)[:, 0]
    rows = np.arange(llr.shape[0])
    return info[rows, pick], metrics[rows, pick], crc_ok, guessed


def scl_decode(llrs, spec: PolarCodeSpec, list_size: int = 8, exact: bool = False) -> DecodeResult:
    """List decoding of a single LLR frame."""
    info, metric, crc_ok, guessed = scl_decode_batch(
        np.asarray(llrs, dtype=float)[None, :], spec, list_size, exact
    )
    return DecodeResult(
        info_bits=info[0],
        path_metric=float(metric[0]),
        crc_ok=None if crc_ok is None else bool(crc_ok[0]),
        guessed=bool(guessed[0]),
    )
