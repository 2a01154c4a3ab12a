import math
import statistics

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pulse_agent.errors import (
    DegenerateFit,
    EmptyCorpus,
    GridMismatch,
    InsufficientData,
    ZeroReference,
)
from pulse_agent.metrics import (
    PairedHr,
    bland_altman,
    compute_metrics,
    evaluation_report,
    linear_regression,
    pair,
    remove_outliers,
)
from pulse_agent.ppg import HrSeries


# Brute-force oracles: plain-Python loop implementations, independent of the
# numpy code paths they check.

def oracle_metrics(y, y_hat):
    errs = [abs(a - b) for a, b in zip(y, y_hat)]
    n = len(errs)
    mae = sum(errs) / n
    rmse = math.sqrt(sum(e * e for e in errs) / n)
    mape = sum(abs(a - b) / abs(a) for a, b in zip(y, y_hat)) / n
    mad = statistics.median(errs)
    return mae, rmse, mape, mad


def oracle_bland_altman(y, y_hat):
    diffs = [b - a for a, b in zip(y, y_hat)]
    bias = sum(diffs) / len(diffs)
    sd = math.sqrt(sum((d - bias) ** 2 for d in diffs) / (len(diffs) - 1))
    return bias, sd, bias - 1.96 * sd, bias + 1.96 * sd


def oracle_regression(y, y_hat):
    n = len(y)
    mx = sum(y) / n
    my = sum(y_hat) / n
    sxx = sum((a - mx) ** 2 for a in y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(y, y_hat))
    syy = sum((b - my) ** 2 for b in y_hat)
    slope = sxy / sxx
    intercept = my - slope * mx
    r = sxy / math.sqrt(sxx * syy) if syy > 0 else 0.0
    return slope, intercept, r


def hr(starts, bpm, win=30.0, hop=30.0):
    return HrSeries(window_start_s=np.array(starts, dtype=float), bpm=np.array(bpm, dtype=float),
                    window_len_s=win, hop_s=hop)


class TestPair:
    def test_nan_drop(self):
        est = hr([0, 30, 60], [70, np.nan, 80])
        ref = hr([0, 30, 60], [71, 72, 79])
        p = pair(est, ref)
        assert p.n == 2
        assert list(p.y) == [71, 79]
        assert list(p.y_hat) == [70, 80]

    def test_disjoint_nan_patterns(self):
        est = hr([0, 30, 60, 90], [70, np.nan, 80, 75])
        ref = hr([0, 30, 60, 90], [71, 72, np.nan, 76])
        assert pair(est, ref).n == 2

    def test_mismatched_hop(self):
        est = hr([0, 15, 30], [70, 71, 72], hop=15.0)
        ref = hr([0, 30, 60], [70, 71, 72], hop=30.0)
        with pytest.raises(GridMismatch):
            pair(est, ref)

    def test_mismatched_starts(self):
        est = hr([0, 30], [70, 71])
        ref = hr([10, 40], [70, 71])
        with pytest.raises(GridMismatch):
            pair(est, ref)


class TestRemoveOutliers:
    def test_inclusive_bounds(self):
        kept, stats = remove_outliers(np.array([39.9, 40.0, 120.0, 200.0, 200.1]))
        assert list(kept) == [40.0, 120.0, 200.0]
        assert stats.removed == 2
        assert stats.outlier_pct == pytest.approx(40.0)

    def test_reported_outlier_arithmetic(self):
        # 2479 extracted values with 2 removals must render as 0.08%
        values = np.concatenate([np.full(2477, 80.0), [39.0, 201.0]])
        kept, stats = remove_outliers(values)
        assert stats.total == 2479
        assert stats.removed == 2
        assert round(stats.outlier_pct, 2) == 0.08

    def test_empty_input(self):
        kept, stats = remove_outliers(np.array([]))
        assert kept.size == 0
        assert stats.removed == 0
        assert stats.outlier_pct == 0.0

    def test_idempotent_partition(self):
        rng = np.random.default_rng(1)
        values = rng.uniform(0, 250, 500)
        kept, stats = remove_outliers(values)
        kept2, stats2 = remove_outliers(kept)
        assert np.array_equal(kept, kept2)
        assert stats2.removed == 0
        assert kept.size + stats.removed == values.size


class TestComputeMetrics:
    def test_identity(self):
        p = PairedHr(y=np.array([60.0, 70.0]), y_hat=np.array([60.0, 70.0]))
        m = compute_metrics(p)
        assert m.mae == m.rmse == m.mape == m.mad == 0.0

    def test_hand_computed_example(self):
        p = PairedHr(y=np.array([60.0, 70.0, 80.0]), y_hat=np.array([62.0, 68.0, 83.0]))
        m = compute_metrics(p)
        assert m.mae == pytest.approx(7.0 / 3.0, rel=1e-12)
        assert m.rmse == pytest.approx(math.sqrt(17.0 / 3.0), rel=1e-12)
        assert m.mape == pytest.approx((2 / 60 + 2 / 70 + 3 / 80) / 3, rel=1e-12)
        assert m.mad == 2.0

    def test_single_pair(self):
        m = compute_metrics(PairedHr(y=np.array([100.0]), y_hat=np.array([90.0])))
        assert m.mae == m.rmse == m.mad == 10.0
        assert m.mape == pytest.approx(0.10)

    def test_zero_reference(self):
        with pytest.raises(ZeroReference):
            compute_metrics(PairedHr(y=np.array([0.0, 70.0]), y_hat=np.array([60.0, 70.0])))

    def test_even_length_median(self):
        p = PairedHr(y=np.array([60.0, 70, 80, 90]), y_hat=np.array([61.0, 73, 80, 94]))
        assert compute_metrics(p).mad == pytest.approx((1 + 3) / 2)


class TestBlandAltman:
    def test_identity(self):
        p = PairedHr(y=np.array([60.0, 70.0]), y_hat=np.array([60.0, 70.0]))
        ba = bland_altman(p)
        assert ba.bias == ba.loa_low == ba.loa_high == 0.0

    def test_hand_computed(self):
        # diffs [-2, 0, 2]: sd = sqrt((4+0+4)/2) = 2
        p = PairedHr(y=np.array([70.0, 70.0, 70.0]), y_hat=np.array([68.0, 70.0, 72.0]))
        ba = bland_altman(p)
        assert ba.bias == pytest.approx(0.0, abs=1e-12)
        assert ba.sd_diff == pytest.approx(2.0)
        assert ba.loa_low == pytest.approx(-3.92)
        assert ba.loa_high == pytest.approx(3.92)

    def test_constant_diff(self):
        p = PairedHr(y=np.array([60.0, 70.0]), y_hat=np.array([65.0, 75.0]))
        ba = bland_altman(p)
        assert ba.bias == 5.0
        assert ba.loa_low == ba.loa_high == 5.0

    def test_insufficient(self):
        with pytest.raises(InsufficientData):
            bland_altman(PairedHr(y=np.array([60.0]), y_hat=np.array([61.0])))


class TestLinearRegression:
    def test_identity_line(self):
        p = PairedHr(y=np.array([50.0, 60.0, 70.0]), y_hat=np.array([50.0, 60.0, 70.0]))
        fit = linear_regression(p)
        assert fit.slope == pytest.approx(1.0)
        assert fit.intercept == pytest.approx(0.0, abs=1e-12)
        assert fit.r == pytest.approx(1.0)

    def test_exact_affine(self):
        y = np.array([50.0, 60.0, 70.0])
        fit = linear_regression(PairedHr(y=y, y_hat=2 * y + 3))
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(3.0)
        assert fit.r == pytest.approx(1.0)

    def test_against_normal_equation_oracle(self):
        y = [60.0, 70.0, 80.0]
        y_hat = [62.0, 68.0, 83.0]
        slope, intercept, r = oracle_regression(y, y_hat)
        fit = linear_regression(PairedHr(y=np.array(y), y_hat=np.array(y_hat)))
        assert fit.slope == pytest.approx(slope, rel=1e-9)
        assert fit.intercept == pytest.approx(intercept, rel=1e-9)
        assert fit.r == pytest.approx(r, rel=1e-9)

    def test_degenerate(self):
        with pytest.raises(DegenerateFit):
            linear_regression(PairedHr(y=np.array([70.0, 70.0]), y_hat=np.array([60.0, 80.0])))


class TestProperties:
    @given(
        st.lists(st.floats(min_value=40, max_value=200), min_size=1, max_size=60),
        st.data(),
    )
    @settings(max_examples=200, deadline=None)
    def test_rmse_ge_mae(self, y, data):
        y_hat = [data.draw(st.floats(min_value=40, max_value=200)) for _ in y]
        m = compute_metrics(PairedHr(y=np.array(y), y_hat=np.array(y_hat)))
        assert m.rmse >= m.mae - 1e-12

    def test_bias_equals_mean_difference(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            y = rng.uniform(40, 200, 30)
            y_hat = rng.uniform(40, 200, 30)
            ba = bland_altman(PairedHr(y=y, y_hat=y_hat))
            assert abs(ba.bias - (y_hat.mean() - y.mean())) < 1e-12

    def test_r_invariant_under_positive_affine(self):
        rng = np.random.default_rng(3)
        y = rng.uniform(40, 200, 40)
        y_hat = y + rng.normal(0, 5, 40)
        r1 = linear_regression(PairedHr(y=y, y_hat=y_hat)).r
        r2 = linear_regression(PairedHr(y=2.5 * y + 7, y_hat=2.5 * y_hat + 7)).r
        assert r1 == pytest.approx(r2, rel=1e-9)


class TestEvaluationReport:
    def make_corpus(self, seed=0, n=2):
        rng = np.random.default_rng(seed)
        corpus = []
        for _ in range(n):
            starts = np.arange(10) * 30.0
            ref = rng.uniform(55, 110, 10)
            est = ref + rng.normal(0, 1.5, 10)
            corpus.append((hr(starts, est), hr(starts, ref)))
        return corpus

    def test_perfect_agreement(self):
        starts = np.arange(5) * 30.0
        vals = np.linspace(60, 100, 5)
        report = evaluation_report([(hr(starts, vals), hr(starts, vals))])
        assert report["metrics"]["mae"] == 0
        assert report["regression"]["slope"] == pytest.approx(1.0)
        assert report["bland_altman"]["bias"] == 0
        assert report["outliers"]["removed"] == 0

    def test_single_recording_pooling_identity(self):
        corpus = self.make_corpus(n=1)
        report = evaluation_report(corpus)
        m = compute_metrics(pair(*corpus[0]))
        assert report["metrics"]["mae"] == pytest.approx(m.mae, rel=1e-5)
        assert report["metrics"]["rmse"] == pytest.approx(m.rmse, rel=1e-5)

    def test_pooling_equals_concatenation(self):
        corpus = self.make_corpus(n=2)
        report = evaluation_report(corpus)
        p0 = pair(*corpus[0])
        p1 = pair(*corpus[1])
        pooled = PairedHr(y=np.concatenate([p0.y, p1.y]), y_hat=np.concatenate([p0.y_hat, p1.y_hat]))
        m = compute_metrics(pooled)
        assert report["metrics"]["mae"] == pytest.approx(m.mae, rel=1e-5)
        assert report["metrics"]["n"] == pooled.n

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            evaluation_report([])

    def test_outlier_gate_applies_to_estimates_only(self):
        starts = np.arange(3) * 30.0
        est = hr(starts, [220.0, 80.0, 90.0])  # first window is an outlier
        ref = hr(starts, [80.0, 80.0, 90.0])
        report = evaluation_report([(est, ref)])
        assert report["outliers"]["removed"] == 1
        assert report["metrics"]["n"] == 2
        assert report["metrics"]["mae"] == 0
