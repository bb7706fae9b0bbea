import math

import numpy as np
import pytest

import polarpunct.sim as sim
from polarpunct.codec import PolarCodeSpec
from polarpunct.construction import RcFamily, info_set, reliability_order
from polarpunct.patterns import ChannelModel, PuncturingPattern, qup_pattern, ucm_zero_set
from polarpunct.sim import (
    ChannelConfig,
    rows_to_csv,
    run_fer,
    sweep,
    transmit,
    trial_rng,
)


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def make_spec(n, k, pattern=None, strict=True, info=None):
    if pattern is None:
        pattern = PuncturingPattern.from_zeros(n, [])
    if info is None:
        order = reliability_order(n, design_snr_db=1.0)
        info = info_set(order, k, excluded=ucm_zero_set(pattern))
    return PolarCodeSpec(n, info, pattern=pattern, strict=strict)


def test_channel_config_sigma():
    cfg = ChannelConfig(ebn0_db=0.0, rate=0.5)
    assert cfg.noise_variance == pytest.approx(1.0)
    cfg = ChannelConfig(ebn0_db=10.0, rate=1.0)
    assert cfg.noise_variance == pytest.approx(0.05)
    with pytest.raises(ValueError):
        ChannelConfig(ebn0_db=0.0, rate=0.0)


def test_transmit_high_snr_signs():
    cfg = ChannelConfig(ebn0_db=40.0, rate=1.0)
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=200, dtype=np.uint8)
    llr = transmit(bits, cfg, rng)
    assert np.all(np.sign(llr) == (1.0 - 2.0 * bits))


def test_transmit_llr_statistics():
    cfg = ChannelConfig(ebn0_db=2.0, rate=0.5)
    rng = np.random.default_rng(1)
    llr = transmit(np.zeros(100_000, dtype=np.uint8), cfg, rng)
    expected_mean = 2.0 / cfg.noise_variance
    assert llr.mean() == pytest.approx(expected_mean, rel=0.05)
    assert llr.var() == pytest.approx(4.0 / cfg.noise_variance, rel=0.05)


def test_uncoded_fer_matches_q_function():
    cfg = ChannelConfig(ebn0_db=3.0, rate=1.0)
    frame_len = 24
    trials = 4000
    errors = 0
    for t in range(trials):
        rng = trial_rng(99, 0, 0, t)
        bits = rng.integers(0, 2, size=frame_len, dtype=np.uint8)
        llr = transmit(bits, cfg, rng)
        errors += bool(((llr < 0).astype(np.uint8) != bits).any())
    p_bit = q_function(1.0 / cfg.noise_sigma)
    predicted = 1.0 - (1.0 - p_bit) ** frame_len
    se = math.sqrt(predicted * (1.0 - predicted) / trials)
    assert abs(errors / trials - predicted) < 3.0 * se


def test_run_fer_catastrophic_pattern_always_fails():
    pat = PuncturingPattern.from_string("1010")
    spec = PolarCodeSpec(2, info_set=(2, 3), pattern=pat, strict=False)
    cfg = ChannelConfig(ebn0_db=20.0, rate=2.0 / pat.weight)
    res = run_fer(spec, cfg, stop=(300, 300), seed=7)
    assert res.trials == 300
    assert res.frame_errors == 300
    assert res.fer == 1.0


def test_run_fer_high_snr_clean():
    spec = make_spec(4, 8)
    cfg = ChannelConfig(ebn0_db=30.0, rate=0.5)
    res = run_fer(spec, cfg, stop=(1000, 100), seed=3)
    assert res.trials == 1000
    assert res.frame_errors == 0
    assert res.fer == 0.0


def test_run_fer_early_stop_and_batch_independence(monkeypatch):
    spec = make_spec(4, 8)
    cfg = ChannelConfig(ebn0_db=0.0, rate=0.5)
    baseline = run_fer(spec, cfg, stop=(5000, 40), seed=11)
    assert baseline.frame_errors == 40
    assert baseline.trials < 5000
    for limit in (1, 7, 64):
        monkeypatch.setattr(sim, "_BATCH_LIMIT", limit)
        again = run_fer(spec, cfg, stop=(5000, 40), seed=11)
        assert (again.trials, again.frame_errors, again.bit_errors) == (
            baseline.trials,
            baseline.frame_errors,
            baseline.bit_errors,
        )


def test_fer_decreases_with_snr():
    spec = make_spec(4, 8)
    low = run_fer(spec, ChannelConfig(0.0, 0.5), stop=(4000, 400), seed=5)
    high = run_fer(spec, ChannelConfig(4.0, 0.5), stop=(4000, 400), seed=5)
    # crude 95% separation using binomial standard errors
    se = math.sqrt(
        low.fer * (1 - low.fer) / low.trials + high.fer * (1 - high.fer) / high.trials
    )
    assert low.fer > high.fer + 1.64 * se


def build_family():
    n = 4
    info = info_set(reliability_order(n, 1.0), 6, excluded=qup_pattern(n, 4).zero_set)
    return RcFamily(
        n=n,
        info_set=info,
        model=ChannelModel.UCM,
        method="reciprocal",
        seed=0,
        patterns=(qup_pattern(n, 4), qup_pattern(n, 2)),
    )


def test_sweep_shapes_and_order():
    fam = build_family()
    rows = sweep(fam, [], stop=(100, 10), seed=1)
    assert rows == []
    rows = sweep(fam, [2.0, 4.0], stop=(200, 20), seed=1)
    assert [(r["pattern_id"], r["ebn0_db"]) for r in rows] == [
        (0, 2.0),
        (0, 4.0),
        (1, 2.0),
        (1, 4.0),
    ]
    assert rows[0]["np"] == 12
    assert rows[2]["np"] == 14

    single = run_fer(
        _spec_of(fam, 0),
        ChannelConfig(2.0, len(fam.info_set) / 12),
        stop=(200, 20),
        seed=1,
        pattern_id=0,
        snr_index=0,
    )
    assert rows[0]["trials"] == single.trials
    assert rows[0]["frame_errors"] == single.frame_errors


def _spec_of(fam, pid):
    return PolarCodeSpec(
        fam.n, fam.info_set, model=fam.model, pattern=fam.patterns[pid], strict=False
    )


def test_sweep_thread_count_invariance():
    fam = build_family()
    grids = [0.0, 2.0, 4.0]
    texts = []
    for threads in (1, 4, 8):
        rows = sweep(fam, grids, stop=(400, 50), seed=9, threads=threads)
        texts.append(rows_to_csv(rows))
    assert texts[0] == texts[1] == texts[2]


def test_csv_layout():
    fam = build_family()
    rows = sweep(fam, [1.0], stop=(50, 5), seed=2)
    text = rows_to_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == "n,np,k,model,method,pattern_id,ebn0_db,trials,frame_errors,fer,ber,seed"
    assert len(lines) == 3
    assert text == rows_to_csv(sweep(fam, [1.0], stop=(50, 5), seed=2))
