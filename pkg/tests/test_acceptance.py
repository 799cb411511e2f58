"""Exit criteria for the package.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""

import json
import random
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from blockcv.bibd import Design, hv_bibd_candidate, hv_design, verify_bibd
from blockcv.cli import main
from blockcv.cv import cv_hv, mean_candidate
from blockcv.experiment import ExperimentConfig, FrequencyTable, run_experiment
from blockcv.occurrence import count_bruteforce, occurrence_matrix, r_analytic
from blockcv.splitter import SplitConfig

GOLDEN = Path(__file__).parent / "golden"

FANO = ((1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6))
FANO_2 = FANO + ((1, 2, 3), (1, 4, 7), (1, 5, 6), (2, 4, 5), (2, 6, 7), (3, 4, 6), (3, 5, 7))


@pytest.mark.criterion(1, "golden 10x10 occurrence matrix via CLI, < 1 s")
def test_golden_matrix(capsys):
    start = time.perf_counter()
    code = main(["occurrence", "--n", "10", "--v", "2", "--format", "csv"])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    assert code == 0
    assert out.encode() == (GOLDEN / "occurrence_n10_v2.csv").read_bytes()
    assert elapsed < 1.0


@pytest.mark.criterion(2, "hv_bibd_candidate(10, 1) = (12/5, 8/15), not integral")
def test_forced_params_not_integral():
    x, y, integral = hv_bibd_candidate(10, 1)
    assert isinstance(x, Fraction) and isinstance(y, Fraction)
    assert (x.numerator, x.denominator) == (12, 5)
    assert (y.numerator, y.denominator) == (8, 15)
    assert integral is False


@pytest.mark.criterion(3, "(7,3,1) and (7,3,2) example designs verify with exact identities")
@pytest.mark.parametrize("blocks,params", [(FANO, (7, 3, 7, 3, 1)), (FANO_2, (7, 3, 14, 6, 2))])
def test_known_designs(blocks, params):
    rep = verify_bibd(Design(7, blocks))
    assert rep.is_bibd
    assert rep.params == params
    n, k, b, r, lam = params
    assert b * k == n * r
    assert r * (k - 1) == lam * (n - 1)
    assert rep.identities == {"bk=nr": True, "r(k-1)=lambda(n-1)": True}


@pytest.mark.criterion(4, "hv_design(n, v) is never a BIBD for 1<=v<=29, 2v+2<=n<=60, < 10 s")
def test_headline_claim():
    start = time.perf_counter()
    checked = 0
    for v in range(1, 30):
        for n in range(2 * v + 2, 61):
            rep = verify_bibd(hv_design(n, v))
            assert not rep.is_bibd, (n, v)
            assert rep.violations, (n, v)
            assert any(viol.detail for viol in rep.violations), (n, v)
            checked += 1
    elapsed = time.perf_counter() - start
    assert checked == sum(60 - 2 * v - 1 for v in range(1, 30))
    assert elapsed < 10.0


@pytest.mark.criterion(5, "analytic r and lambda equal brute force for all n<=60, 0<=v<=(n-1)/2")
def test_oracle_equivalence():
    for n in range(1, 61):
        for v in range((n - 1) // 2 + 1):
            analytic = occurrence_matrix(n, v)
            brute = count_bruteforce(SplitConfig(n=n, v=v))
            np.testing.assert_array_equal(analytic.r, brute.r, err_msg=f"r at n={n}, v={v}")
            np.testing.assert_array_equal(analytic.lam, brute.lam, err_msg=f"lambda at n={n}, v={v}")


def expected_r_pattern(n, v):
    """The tabulated replication pattern, written out piecewise."""
    r = {}
    for i in range(1, n + 1):
        if i <= 2 * v + 1:
            r[i] = i
        elif i <= n - 2 * v:
            r[i] = 2 * v + 1
        else:
            r[i] = r[n + 1 - i]
    return r


@pytest.mark.criterion(6, "r_analytic follows the tabulated rise/plateau/descent pattern, n<=200")
def test_replication_table_pattern():
    rng = random.Random(20191018)
    cases = [(rng.randint(2, 200),) for _ in range(300)]
    for (n,) in cases:
        # the tabulated plateau needs 2v+1 <= n-2v
        v = rng.randint(0, (n - 1) // 4)
        expected = expected_r_pattern(n, v)
        for i in range(1, n + 1):
            assert r_analytic(n, v, i) == expected[i], (n, v, i)
        assert r_analytic(n, v, v + 1) == v + 1
        assert r_analytic(n, v, n - v) == v + 1
        assert r_analytic(n, v, n - 2 * v) == 2 * v + 1
        steps = [r_analytic(n, v, i) for i in range(v + 1, 2 * v + 2)]
        assert steps == list(range(v + 1, 2 * v + 2))


@pytest.mark.criterion(7, "CV_hv: n-2v terms over centers v+1..n-v, constant evaluator, LOO fixture to 1e-12")
def test_cv_contract():
    rng = random.Random(7)
    for _ in range(50):
        v = rng.randint(0, 6)
        h = rng.randint(0, 6)
        n = rng.randint(2 * v + 2 * h + 2, 80)
        centers = []
        res = cv_hv(np.zeros(n), SplitConfig(n=n, h=h, v=v), lambda s, sp: centers.append(sp.center) or 3.25)
        assert len(res.per_split) == n - 2 * v
        assert centers == list(range(v + 1, n - v + 1))
        assert res.score == 3.25

    # leave-one-out residuals of the mean predictor are (5 y_i - 25) / 4
    y = np.array([1.0, 2.0, 4.0, 7.0, 11.0])
    hand = (25.0 + 225 / 16 + 25 / 16 + 25 / 4 + 225 / 4) / 5
    res = cv_hv(y, SplitConfig(n=5, h=0, v=0), mean_candidate().evaluator())
    assert abs(res.score - hand) <= 1e-12


@pytest.fixture(scope="module")
def default_table():
    return run_experiment(ExperimentConfig.default())


@pytest.mark.criterion(8, "experiment: deterministic, noiseless recovery, frozen-seed baseline")
def test_experiment_determinism(default_table):
    again = run_experiment(ExperimentConfig.default(), workers=4)
    assert default_table.to_csv().encode() == again.to_csv().encode()
    assert json.dumps(default_table.to_dict()) == json.dumps(again.to_dict())


@pytest.mark.criterion(8, "experiment: deterministic, noiseless recovery, frozen-seed baseline")
def test_experiment_noiseless():
    cfg = ExperimentConfig.default()
    cfg = replace(cfg, dgp=replace(cfg.dgp, sigma=0.0))
    table = run_experiment(cfg)
    for m in table.methods:
        assert table.true_frequency(m.name) == 1.0, m


@pytest.mark.criterion(8, "experiment: deterministic, noiseless recovery, frozen-seed baseline")
def test_experiment_baseline(default_table):
    frozen = json.loads((GOLDEN / "experiment_default.json").read_text())
    frozen_table = FrequencyTable.from_dict(frozen)
    assert default_table == frozen_table
    assert default_table.to_csv() == (GOLDEN / "experiment_default.csv").read_text()
    assert default_table.true_frequency("hv-block") >= default_table.true_frequency("h-block")
