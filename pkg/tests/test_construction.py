import json

import numpy as np
import pytest

from polarpunct.construction import (
    RcFamily,
    boxplus,
    channel_llr_means,
    greedy_base_pattern,
    greedy_rc_family,
    info_set,
    reciprocal_rc_family,
    reliability_order,
    seed_sequence,
)
from polarpunct.core import hamming_weight
from polarpunct.errors import (
    ConstructionViolationError,
    InfeasibleRateError,
    ZeroInInfoSetError,
)
from polarpunct.patterns import ChannelModel, PuncturingPattern, z_spectrum


def test_reliability_order_extremes():
    assert reliability_order(1).order == (1, 0)
    r2 = reliability_order(2)
    assert r2.order[0] == 3
    assert r2.order[-1] == 0
    for n in range(2, 8):
        order = reliability_order(n, design_snr_db=1.0).order
        assert order[0] == (1 << n) - 1
        assert order[-1] == 0


def test_reliability_order_deterministic():
    a = reliability_order(6, design_snr_db=2.0)
    b = reliability_order(6, design_snr_db=2.0)
    assert a == b


def test_llr_means_monotone_levels():
    means = channel_llr_means(4, 0.0)
    assert means.shape == (16,)
    assert means[15] == means.max()
    assert means[0] == means.min()
    assert np.all(means > 0)


def test_info_set_selection():
    order = reliability_order(2)
    assert info_set(order, 0) == ()
    assert info_set(order, 1) == (3,)
    top = order.order[0]
    assert info_set(order, 1, excluded={top}) == (order.order[1],)
    with pytest.raises(ValueError):
        info_set(order, 4, excluded={3})


def test_greedy_base_examples():
    assert greedy_base_pattern({3}, 2).to_string() == "1000"
    assert greedy_base_pattern({0}, 1).to_string() == "11"
    for n in (2, 3):
        full = greedy_base_pattern(range(1 << n), n)
        assert full.weight == 1 << n


def test_greedy_base_satisfies_every_channel():
    rng = np.random.default_rng(101)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        size = 1 << n
        k = size // 2
        info = tuple(sorted(rng.choice(size, size=k, replace=False).tolist()))
        pat = greedy_base_pattern(info, n, seed=int(rng.integers(1 << 30)))
        spectrum = z_spectrum(pat.mask)
        assert all(spectrum[i] == 1 for i in info)
        assert pat.weight >= k


def test_greedy_family_single_rate():
    base = greedy_base_pattern({3}, 2, seed=9)
    fam = greedy_rc_family({3}, 2, [base.weight], seed=9)
    assert len(fam.patterns) == 1
    assert fam.patterns[0] == base


def test_greedy_family_growth_and_nesting():
    info = (3, 5, 6, 7)
    base = greedy_base_pattern(info, 3, seed=5)
    lengths = [base.weight, base.weight + 2, 8]
    fam = greedy_rc_family(info, 3, lengths, seed=5)
    weights = [p.weight for p in fam.patterns]
    assert weights == lengths
    zero_sets = [set(p.zero_set) for p in fam.patterns]
    assert zero_sets[0] >= zero_sets[1] >= zero_sets[2]
    for pat in fam.patterns:
        spectrum = z_spectrum(pat.mask)
        assert all(spectrum[i] == 1 for i in info)
    assert fam.patterns[-1].weight == 8  # all-ones at the lowest rate


def test_greedy_family_infeasible():
    with pytest.raises(InfeasibleRateError):
        greedy_rc_family({3, 5}, 3, [1])  # below |A|
    with pytest.raises(InfeasibleRateError):
        greedy_rc_family({3}, 3, [200])
    with pytest.raises(ValueError):
        greedy_rc_family({3}, 3, [6, 4])


def test_greedy_family_reproducible():
    a = greedy_rc_family((3, 5, 6, 7), 3, [5, 8], seed=42)
    b = greedy_rc_family((3, 5, 6, 7), 3, [5, 8], seed=42)
    assert a.patterns == b.patterns


def test_boxplus():
    atoms = {1, 2, 4}
    assert boxplus(atoms, atoms) == {3, 5, 6}
    # self-pairs i with i are not support-disjoint unless i = 0
    assert boxplus({3}, {3}) == set()
    assert boxplus(set(), atoms) == set()


def test_seed_sequence_paper_examples():
    assert seed_sequence({5, 7}, 3).entries == (0, 1, 2, 4, 3, 6)
    assert seed_sequence({4, 6}, 3).entries == (0, 1, 2, 3)
    assert seed_sequence(set(), 1).entries == (0, 1)


def test_seed_sequence_rejects_zero():
    with pytest.raises(ZeroInInfoSetError):
        seed_sequence({0, 3}, 2)


def test_seed_sequence_level_weights():
    seq = seed_sequence({9, 11, 13}, 4)
    for level_index, level in enumerate(seq.levels):
        assert all(hamming_weight(i) == level_index for i in level)
    assert len(set(seq.entries)) == len(seq.entries)


def test_reciprocal_family_paper_prefixes():
    fam = reciprocal_rc_family({5, 7}, 3, [2, 4])
    # most-punctured (highest rate) first
    assert set(fam.patterns[0].zero_set) == {0, 1, 2, 4}
    assert set(fam.patterns[1].zero_set) == {0, 1}
    report = fam.report()
    assert all(row["non_catastrophic"] for row in report)
    assert all(row["reciprocal"] for row in report)


def test_reciprocal_family_infeasible():
    with pytest.raises(InfeasibleRateError):
        reciprocal_rc_family({4, 6}, 3, [5])
    fam = reciprocal_rc_family({4, 6}, 3, [0])
    assert fam.patterns[0].weight == 8


def test_reciprocal_family_catches_bad_prefix():
    # with A = {5} the seed sequence reaches length 7, but puncturing all
    # seven locations leaves only channel 7 alive: verification must fail
    with pytest.raises(ConstructionViolationError):
        reciprocal_rc_family({5}, 3, [7])


def test_family_json_roundtrip(tmp_path):
    fam = reciprocal_rc_family({5, 7}, 3, [4, 2])
    blob = fam.to_json()
    assert blob["K"] == 2
    assert blob["patterns"][0]["np"] == 4
    again = RcFamily.from_json(json.loads(json.dumps(blob)))
    assert again == fam
    path = tmp_path / "family.json"
    fam.save(path)
    assert RcFamily.load(path) == fam


def test_family_verify_rejects_catastrophic_member():
    bad = RcFamily(
        n=2,
        info_set=(2,),
        model=ChannelModel.UCM,
        method="greedy",
        seed=0,
        patterns=(PuncturingPattern.from_string("1010"),),
    )
    with pytest.raises(ConstructionViolationError):
        bad.verify()
