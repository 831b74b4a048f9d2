import numpy as np
import pytest

from rankbucket import GENERATOR_NAME, SyntheticConfig, generate, metadata


def test_positive_count_follows_rounding():
    for L, m, want in ((10_000, 1.0, 100), (1_000_000, 0.1, 1000), (100, 0.1, 0), (3, 50.0, 2)):
        cfg = SyntheticConfig(num_logits=L, positive_pct=m, seed=1)
        assert cfg.num_positives == want
        ds = generate(cfg)
        assert int(ds.labels.sum()) == want
        assert len(ds) == L


def test_determinism_is_bitwise():
    cfg = SyntheticConfig(num_logits=20_000, positive_pct=2.0, seed=1234)
    a, b = generate(cfg), generate(cfg)
    assert np.array_equal(a.scores, b.scores)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.ious, b.ious, equal_nan=True)


def test_distinct_seeds_differ():
    base = SyntheticConfig(num_logits=5_000, positive_pct=1.0, seed=1)
    other = SyntheticConfig(num_logits=5_000, positive_pct=1.0, seed=2)
    assert not np.array_equal(generate(base).scores, generate(other).scores)


def test_no_exact_ties():
    cfg = SyntheticConfig(num_logits=200_000, positive_pct=1.0, seed=77)
    ds = generate(cfg)
    assert np.unique(ds.scores).size == len(ds)


def test_sample_means_near_configured_means():
    cfg = SyntheticConfig(num_logits=100_000, positive_pct=10.0, seed=5)
    ds = generate(cfg)
    pos, neg = ds.scores[ds.labels], ds.scores[~ds.labels]
    # 5 sigma / sqrt(n) band
    assert abs(pos.mean() - cfg.pos_mean) < 5.0 / np.sqrt(pos.size)
    assert abs(neg.mean() - cfg.neg_mean) < 5.0 / np.sqrt(neg.size)
    ious = ds.ious[ds.labels]
    assert 0.45 < ious.mean() < 0.55
    assert np.all((ious >= 0.0) & (ious <= 1.0))


def test_custom_distribution_parameters():
    cfg = SyntheticConfig(
        num_logits=50_000, positive_pct=20.0, seed=9,
        pos_mean=3.0, pos_std=0.5, neg_mean=-3.0, neg_std=2.0,
    )
    ds = generate(cfg)
    pos, neg = ds.scores[ds.labels], ds.scores[~ds.labels]
    assert abs(pos.mean() - 3.0) < 0.1
    assert abs(neg.mean() + 3.0) < 0.1
    assert abs(pos.std() - 0.5) < 0.05


def test_invalid_configs_rejected():
    with pytest.raises(ValueError):
        SyntheticConfig(num_logits=0, positive_pct=1.0, seed=1)
    with pytest.raises(ValueError):
        SyntheticConfig(num_logits=10, positive_pct=-1.0, seed=1)
    with pytest.raises(ValueError):
        SyntheticConfig(num_logits=10, positive_pct=101.0, seed=1)
    with pytest.raises(ValueError):
        SyntheticConfig(num_logits=10, positive_pct=1.0, seed=1, pos_std=0.0)


def test_zero_positive_config_is_allowed():
    cfg = SyntheticConfig(num_logits=50, positive_pct=0.0, seed=3)
    ds = generate(cfg)
    assert int(ds.labels.sum()) == 0
    assert np.all(np.isnan(ds.ious))


def test_metadata_names_generator_and_config():
    cfg = SyntheticConfig(num_logits=10, positive_pct=10.0, seed=4)
    meta = metadata(cfg)
    assert meta["generator"] == GENERATOR_NAME
    assert meta["config"]["num_logits"] == 10
    assert meta["config"]["seed"] == 4
    assert meta["num_positives"] == 1


def test_delta_passes_through():
    cfg = SyntheticConfig(num_logits=10, positive_pct=10.0, seed=4)
    assert generate(cfg, delta=0.25).delta == 0.25
