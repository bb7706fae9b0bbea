"""BPSK/AWGN Monte Carlo measurement of frame and bit error rates.

Every trial draws its randomness from a counter-based stream keyed by
(master seed, pattern id, SNR index, trial index), so results are
bit-identical no matter how work is scheduled across threads or batches.
A frame counts as an error when the decoded message differs from the sent
one or when the decoder had to guess a zero-information bit.
"""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codec import CrcConfig, PolarCodeSpec, assign_llrs, encode, scl_decode_batch
from .construction import RcFamily

DEFAULT_TARGET_ERRORS = 100
DEFAULT_MAX_TRIALS = 100_000
_BATCH_LIMIT = 2048

CSV_COLUMNS = [
    "n",
    "np",
    "k",
    "model",
    "method",
    "pattern_id",
    "ebn0_db",
    "trials",
    "frame_errors",
    "fer",
    "ber",
    "seed",
]


@dataclass(frozen=True)
class ChannelConfig:
    """Per-information-bit SNR and code rate; noise variance follows."""

    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    @property
    def noise_variance(self) -> float:
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0))

    @property
    def noise_sigma(self) -> float:
        return float(np.sqrt(self.noise_variance))


@dataclass
class SimResult:
    """Tallies for one (pattern, SNR) cell."""

    trials: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    seed: int
    wall_time: float


def trial_rng(seed: int, pattern_id: int, snr_index: int, trial_index: int) -> np.random.Generator:
    """Counter-based (Philox) stream for one trial; independent of scheduling."""
    bitgen = np.random.Philox(
        key=np.uint64(seed),
        counter=[np.uint64(trial_index), np.uint64(snr_index), np.uint64(pattern_id), 0],
    )
    return np.random.Generator(bitgen)


def transmit(codeword, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """BPSK map, AWGN, and channel LLRs 2y/sigma^2 for each coordinate."""
    bits = np.asarray(codeword, dtype=float)
    symbols = 1.0 - 2.0 * bits
    noisy = symbols + cfg.noise_sigma * rng.standard_normal(bits.shape)
    return 2.0 * noisy / cfg.noise_variance


def run_fer(
    spec: PolarCodeSpec,
    cfg: ChannelConfig,
    stop: tuple[int, int] = (DEFAULT_MAX_TRIALS, DEFAULT_TARGET_ERRORS),
    seed: int = 0,
    list_size: int = 1,
    pattern_id: int = 0,
    snr_index: int = 0,
    exact: bool = False,
) -> SimResult:
    """Monte Carlo FER/BER for one code spec at one SNR point.

    Stops at ``stop = (max_trials, target_frame_errors)``, whichever comes
    first.  Trials are processed in index order, so the stopping point (and
    hence the result) does not depend on internal batching.
    """
    max_trials, target_errors = int(stop[0]), int(stop[1])
    msg_len = spec.message_length
    start = time.perf_counter()
    trials = frame_errors = bit_errors = 0
    while trials < max_trials and frame_errors < target_errors:
        batch = min(_BATCH_LIMIT, max_trials - trials)
        msgs = np.empty((batch, msg_len), dtype=np.uint8)
        noise = np.empty((batch, spec.transmitted_length))
        for k in range(batch):
            rng = trial_rng(seed, pattern_id, snr_index, trials + k)
            msgs[k] = rng.integers(0, 2, size=msg_len, dtype=np.uint8)
            noise[k] = rng.standard_normal(spec.transmitted_length)
        symbols = 1.0 - 2.0 * encode(spec, msgs).astype(float)
        llr = 2.0 * (symbols + cfg.noise_sigma * noise) / cfg.noise_variance
        frames = assign_llrs(llr, spec.pattern, spec.model, spec.llr_sat)
        decoded, _, _, guessed = scl_decode_batch(frames, spec, list_size, exact)
        wrong_bits = (decoded[:, :msg_len] != msgs).sum(axis=1)
        frame_err = (wrong_bits > 0) | guessed
        # consume results in trial order so early stopping is batch-agnostic
        need = target_errors - frame_errors
        cumulative = np.cumsum(frame_err)
        cut = int(np.searchsorted(cumulative, need))
        used = min(batch, cut + 1)
        trials += used
        frame_errors += int(cumulative[used - 1])
        bit_errors += int(wrong_bits[:used].sum())
    return SimResult(
        trials=trials,
        frame_errors=frame_errors,
        bit_errors=bit_errors,
        fer=frame_errors / trials if trials else 0.0,
        ber=bit_errors / (trials * msg_len) if trials and msg_len else 0.0,
        seed=seed,
        wall_time=time.perf_counter() - start,
    )


def _spec_for_pattern(family: RcFamily, pattern_id: int, crc: CrcConfig | None, strict: bool) -> PolarCodeSpec:
    return PolarCodeSpec(
        n=family.n,
        info_set=family.info_set,
        model=family.model,
        pattern=family.patterns[pattern_id],
        crc=crc,
        strict=strict,
    )


def sweep(
    family: RcFamily,
    snr_grid_db: Sequence[float],
    stop: tuple[int, int] = (DEFAULT_MAX_TRIALS, DEFAULT_TARGET_ERRORS),
    seed: int = 0,
    list_size: int = 1,
    crc: CrcConfig | int | None = None,
    threads: int = 1,
    strict: bool = False,
    exact: bool = False,
) -> list[dict]:
    """One FER measurement per (pattern, SNR); rows ordered pattern-major.

    Cells run independently (optionally across threads); per-cell RNG
    streams make the output identical for any thread count.
    """
    if isinstance(crc, int):
        crc = CrcConfig.of_width(crc) if crc else None
    specs = [
        _spec_for_pattern(family, pid, crc, strict)
        for pid in range(len(family.patterns))
    ]
    cells = [
        (pid, si, float(snr))
        for pid in range(len(family.patterns))
        for si, snr in enumerate(snr_grid_db)
    ]

    def run_cell(cell):
        pid, si, snr = cell
        spec = specs[pid]
        cfg = ChannelConfig(ebn0_db=snr, rate=len(family.info_set) / spec.transmitted_length)
        return run_fer(
            spec,
            cfg,
            stop=stop,
            seed=seed,
            list_size=list_size,
            pattern_id=pid,
            snr_index=si,
            exact=exact,
        )

    if threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(cell) for cell in cells]

    rows = []
    for (pid, si, snr), res in zip(cells, results):
        rows.append(
            {
                "n": family.n,
                "np": specs[pid].transmitted_length,
                "k": len(family.info_set),
                "model": family.model.value,
                "method": family.method,
                "pattern_id": pid,
                "ebn0_db": snr,
                "trials": res.trials,
                "frame_errors": res.frame_errors,
                "fer": res.fer,
                "ber": res.ber,
                "seed": seed,
            }
        )
    return rows


def rows_to_csv(rows: Iterable[dict]) -> str:
    """Render sweep rows as CSV text with the canonical column order."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: row[key] for key in CSV_COLUMNS})
    return buf.getvalue()


def write_csv(rows: Iterable[dict], path) -> None:
    with open(path, "w", newline="") as handle:
        handle.write(rows_to_csv(rows))


def write_gnuplot_data(rows: Sequence[dict], path) -> None:
    """Gnuplot-ready companion: one indexed block per pattern."""
    with open(path, "w") as handle:
        handle.write("# ebn0_db fer ber trials frame_errors\n")
        last_pid = None
        for row in rows:
            if row["pattern_id"] != last_pid:
                if last_pid is not None:
                    handle.write("\n\n")
                handle.write(
                    f"# pattern {row['pattern_id']} np={row['np']} "
                    f"k={row['k']} model={row['model']}\n"
                )
                last_pid = row["pattern_id"]
            handle.write(
                f"{row['ebn0_db']} {row['fer']} {row['ber']} "
                f"{row['trials']} {row['frame_errors']}\n"
            )


def default_thread_count() -> int:
    env = os.environ.get("POLARPUNCT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1
