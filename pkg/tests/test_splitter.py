import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockcv.errors import BadParameters, IllegitimateCenter, TooFewSamples
from blockcv.splitter import Split, SplitConfig, hv_splits, split_at, validate_config


@st.composite
def configs(draw, max_n=200):
    n = draw(st.integers(1, max_n))
    v = draw(st.integers(0, (n - 1) // 2))
    h = draw(st.integers(0, n))
    return SplitConfig(n=n, h=h, v=v)


def enumerate_split(n, h, v, c):
    """Independent per-index classification by distance to the center."""
    test, gap, train = [], [], []
    for i in range(1, n + 1):
        d = abs(i - c)
        if d <= v:
            test.append(i)
        elif d <= v + h:
            gap.append(i)
        else:
            train.append(i)
    return tuple(test), tuple(gap), tuple(train)


def test_validate_counting_ok():
    assert validate_config(SplitConfig(n=10, h=0, v=2), "counting").n == 10


def test_validate_cv_needs_nonempty_train():
    # center 3 of n=5: test {2,3,4}, gap {1,5}, train empty
    assert split_at(SplitConfig(n=5, h=1, v=1), 3).train == ()
    with pytest.raises(TooFewSamples) as exc:
        validate_config(SplitConfig(n=5, h=1, v=1), "cv")
    assert exc.value.required == 6
    assert "2v+2h+2" in str(exc.value)
    validate_config(SplitConfig(n=6, h=1, v=1), "cv")


@pytest.mark.parametrize("v", [1, 2, 5])
def test_validate_counting_rejects_n_equal_2v(v):
    with pytest.raises(TooFewSamples) as exc:
        validate_config(SplitConfig(n=2 * v, h=3, v=v), "counting")
    assert exc.value.required == 2 * v + 1


@pytest.mark.parametrize("kwargs", [dict(n=0), dict(n=5, h=-1), dict(n=5, v=-1), dict(n=5.0)])
def test_config_rejects_bad_fields(kwargs):
    with pytest.raises(BadParameters):
        SplitConfig(**kwargs)


@pytest.mark.parametrize(
    "n,h,v,center,test,gap,train",
    [
        (7, 1, 1, 4, (3, 4, 5), (2, 6), (1, 7)),
        (7, 1, 1, 2, (1, 2, 3), (4,), (5, 6, 7)),
        (5, 0, 0, 3, (3,), (), (1, 2, 4, 5)),
        (10, 3, 1, 3, (2, 3, 4), (1, 5, 6, 7), (8, 9, 10)),
    ],
)
def test_split_at_examples(n, h, v, center, test, gap, train):
    s = split_at(SplitConfig(n=n, h=h, v=v), center)
    assert (s.test, s.gap, s.train) == (test, gap, train)


@pytest.mark.parametrize("center", [1, 7, 0, 8])
def test_split_at_illegitimate(center):
    with pytest.raises(IllegitimateCenter):
        split_at(SplitConfig(n=7, h=1, v=1), center)


def test_zero_based_views():
    s = split_at(SplitConfig(n=7, h=1, v=1), 4)
    assert s.test_idx.tolist() == [2, 3, 4]
    assert s.gap_idx.tolist() == [1, 5]
    assert s.train_idx.tolist() == [0, 6]


def test_hv_splits_count_and_order():
    splits = list(hv_splits(SplitConfig(n=10, h=0, v=2)))
    assert [s.center for s in splits] == [3, 4, 5, 6, 7, 8]
    assert all(len(s.test) == 5 for s in splits)


def test_hv_splits_h_block():
    splits = list(hv_splits(SplitConfig(n=7, h=2, v=0)))
    assert [s.test for s in splits] == [(i,) for i in range(1, 8)]


@pytest.mark.parametrize("v", [0, 1, 4])
def test_hv_splits_single_block(v):
    n = 2 * v + 1
    (s,) = hv_splits(SplitConfig(n=n, h=0, v=v))
    assert s.test == tuple(range(1, n + 1))
    assert s.train == ()


def test_hv_splits_validates_eagerly():
    with pytest.raises(TooFewSamples):
        hv_splits(SplitConfig(n=4, h=0, v=2))


def test_split_json_round_trip():
    s = split_at(SplitConfig(n=7, h=1, v=1), 2)
    text = json.dumps(s.to_dict())
    assert json.loads(text) == {"center": 2, "test": [1, 2, 3], "gap": [4], "train": [5, 6, 7]}
    assert Split.from_dict(json.loads(text)) == s


@settings(max_examples=300, deadline=None)
@given(configs())
def test_partition_and_geometry(cfg):
    n, h, v = cfg.n, cfg.h, cfg.v
    splits = list(hv_splits(cfg))
    assert len(splits) == n - 2 * v
    for s in splits:
        parts = [set(s.test), set(s.gap), set(s.train)]
        assert sum(map(len, parts)) == n
        assert set().union(*parts) == set(range(1, n + 1))
        assert len(s.test) == 2 * v + 1
        assert list(s.test) == list(range(s.test[0], s.test[-1] + 1))
        assert (s.test, s.gap, s.train) == enumerate_split(n, h, v, s.center)
        assert all(abs(i - s.center) > v + h for i in s.train)
        assert len(s.gap) <= 2 * h
        untruncated = v + h + 1 <= s.center <= n - v - h
        assert (len(s.gap) == 2 * h) == untruncated


@settings(max_examples=100, deadline=None)
@given(configs(max_n=60))
def test_v0_is_h_block_and_loo(cfg):
    cfg0 = SplitConfig(n=cfg.n, h=cfg.h, v=0)
    splits = list(hv_splits(cfg0))
    assert [s.test for s in splits] == [(i,) for i in range(1, cfg.n + 1)]
    loo = list(hv_splits(SplitConfig(n=cfg.n, h=0, v=0)))
    assert all(s.train == tuple(j for j in range(1, cfg.n + 1) if j != s.center) for s in loo)
