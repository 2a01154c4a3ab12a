"""End-to-end acceptance checks. Each test prints one PASS line on success
(run with -s to see them); a failing criterion fails its test."""

import json
import socket
import time

import numpy as np
import pytest

from pulse_agent.ecg import detect_qrs, reference_hr
from pulse_agent.metrics import (
    PairedHr,
    bland_altman,
    compute_metrics,
    evaluation_report,
    linear_regression,
    remove_outliers,
    write_report,
)
from pulse_agent.orchestrator import (
    ClarificationRequest,
    DataPipe,
    MockBackend,
    RecordingBackend,
    ToolContext,
    default_registry,
    execute,
    extract_tagged_values,
    generate_response,
    parse_plan,
    run_session,
)
from pulse_agent.orchestrator.agent import _result_summaries
from pulse_agent.ppg import estimate_hr, highpass_filter
from pulse_agent.synth import (
    beat_times_from_ibis,
    corrupt,
    paired_recording,
    synth_ecg_from_beats,
    synth_ppg,
)

from conftest import make_series
from test_orchestrator import (
    GOOD_PLAN,
    NUMERIC_LITERAL,
    QUERY,
    make_ctx,
    script_planning,
    script_response,
)


def report_line(criterion, detail):
    print(f"ACCEPTANCE {criterion}: PASS  ({detail})")


class TestCriterion1MetricExactness:
    def test_oracle_agreement_on_1000_random_vectors(self):
        from test_metrics import oracle_bland_altman, oracle_metrics, oracle_regression

        rng = np.random.default_rng(12345)
        t0 = time.monotonic()
        checked = {"metrics": 0, "ba": 0, "reg": 0}
        for _ in range(1000):
            n = int(rng.integers(1, 501))
            y = rng.uniform(40, 200, n)
            y_hat = rng.uniform(40, 200, n)
            p = PairedHr(y=y, y_hat=y_hat)

            mae, rmse, mape, mad = oracle_metrics(list(y), list(y_hat))
            m = compute_metrics(p)
            assert m.mae == pytest.approx(mae, rel=1e-9)
            assert m.rmse == pytest.approx(rmse, rel=1e-9)
            assert m.mape == pytest.approx(mape, rel=1e-9)
            assert m.mad == pytest.approx(mad, rel=1e-9)
            checked["metrics"] += 1

            if n >= 2:
                bias, sd, lo, hi = oracle_bland_altman(list(y), list(y_hat))
                ba = bland_altman(p)
                assert ba.bias == pytest.approx(bias, rel=1e-9, abs=1e-9)
                assert ba.sd_diff == pytest.approx(sd, rel=1e-9)
                assert ba.loa_low == pytest.approx(lo, rel=1e-9, abs=1e-9)
                assert ba.loa_high == pytest.approx(hi, rel=1e-9, abs=1e-9)
                checked["ba"] += 1

                from test_metrics import oracle_regression

                slope, intercept, r = oracle_regression(list(y), list(y_hat))
                fit = linear_regression(p)
                assert fit.slope == pytest.approx(slope, rel=1e-9)
                assert fit.intercept == pytest.approx(intercept, rel=1e-9, abs=1e-9)
                assert fit.r == pytest.approx(r, rel=1e-9, abs=1e-9)
                checked["reg"] += 1
        elapsed = time.monotonic() - t0
        assert elapsed < 10.0
        report_line(1, f"{checked['metrics']} vectors, {elapsed:.1f} s")


class TestCriterion2OutlierRule:
    def test_boundaries_and_reported_arithmetic(self):
        kept, _ = remove_outliers(np.array([39.999, 40.0, 200.0, 200.001]))
        assert list(kept) == [40.0, 200.0]

        values = np.concatenate([np.full(2477, 80.0), [39.0, 201.0]])
        _, stats = remove_outliers(values)
        assert stats.total == 2479
        assert stats.removed == 2
        assert round(stats.outlier_pct, 2) == 0.08
        report_line(2, "inclusive [40, 200]; 2/2479 -> 0.08%")


class TestCriterion3SyntheticCorpus:
    def test_fifty_recording_corpus_accuracy(self):
        t0 = time.monotonic()
        corpus = []
        for seed in range(50):
            ppg, ecg, _ = paired_recording(duration_s=900.0, seed=seed, corrupt_frac=0.2)
            corpus.append((estimate_hr(ppg), reference_hr(ecg)))
        report = evaluation_report(corpus)
        elapsed = time.monotonic() - t0

        mae = report["metrics"]["mae"]
        outlier_pct = report["outliers"]["outlier_pct"]
        bias = report["bland_altman"]["bias"]
        slope = report["regression"]["slope"]
        assert mae < 3.0
        assert outlier_pct < 1.0
        assert abs(bias) < 1.0
        assert 0.95 <= slope <= 1.05
        assert elapsed < 300.0
        report_line(
            3,
            f"MAE {mae:.3f}, outliers {outlier_pct:.2f}%, bias {bias:.3f}, "
            f"slope {slope:.3f}, {elapsed:.0f} s",
        )


class TestCriterion4FilterContract:
    def test_stopband_passband_dc(self):
        dc = make_series(np.full(1200, 5.0))
        dc_resid = np.max(np.abs(highpass_filter(dc).samples))
        assert dc_resid < 1e-6

        t = np.arange(1200) / 20.0
        stop = make_series(np.sin(2 * np.pi * 0.1 * t))
        atten_db = 20 * np.log10(
            np.std(highpass_filter(stop).samples) / np.std(stop.samples)
        )
        assert atten_db <= -20

        passband = make_series(np.sin(2 * np.pi * 1.5 * t))
        level_db = 20 * np.log10(
            np.std(highpass_filter(passband).samples) / np.std(passband.samples)
        )
        assert abs(level_db) <= 1
        report_line(
            4, f"0.1 Hz {atten_db:.0f} dB, 1.5 Hz {level_db:+.3f} dB, DC {dc_resid:.1e}"
        )


class TestCriterion5ReconstructionContract:
    def test_short_gaps_recovered_long_gap_nan(self):
        pristine, _ = synth_ppg(120.0, 72.0, seed=11)
        oracle = estimate_hr(pristine)
        worst = 0.0
        for gap in [(56.0, 62.0), (52.0, 62.0), (50.0, 64.0)]:  # 6, 10, 14 s
            hr = estimate_hr(corrupt(pristine, [gap], seed=7))
            assert not np.any(np.isnan(hr.bpm))
            worst = max(worst, float(np.max(np.abs(hr.bpm - oracle.bpm))))
            assert np.max(np.abs(hr.bpm - oracle.bpm)) <= 2.0

        hr_long = estimate_hr(corrupt(pristine, [(50.0, 70.0)], seed=7))
        assert np.isnan(hr_long.bpm[1]) and np.isnan(hr_long.bpm[2])
        assert not np.isnan(hr_long.bpm[0]) and not np.isnan(hr_long.bpm[3])
        report_line(5, f"gaps <= 14 s within {worst:.2f} BPM; 20 s gap stays NaN")


class TestCriterion6QrsReference:
    def test_beat_timing_and_windowed_hr(self):
        total, hits, worst_hr = 0, 0, 0.0
        for hr_bpm in [40.0, 70.0, 100.0, 140.0, 200.0]:
            beats = beat_times_from_ibis(60.0, hr_bpm, jitter_frac=0.02, seed=int(hr_bpm))
            series = synth_ecg_from_beats(beats, 60.0, seed=int(hr_bpm))
            peaks = detect_qrs(series)
            det_t = peaks.indices / series.sample_rate_hz
            for b in beats:
                total += 1
                if det_t.size and np.min(np.abs(det_t - b)) <= 0.010:
                    hits += 1

            hr = reference_hr(series)
            for w, est in zip(hr.window_start_s, hr.bpm):
                in_w = beats[(beats >= w) & (beats < w + 30.0)]
                if in_w.size < 2 or np.isnan(est):
                    continue
                truth = 60.0 / np.mean(np.diff(in_w))
                worst_hr = max(worst_hr, abs(est - truth))
                assert abs(est - truth) <= 1.0
        assert hits / total >= 0.99
        report_line(6, f"{hits}/{total} beats within 10 ms; HR error <= {worst_hr:.2f} BPM")


class TestCriterion7OrchestratorProperties:
    @pytest.fixture(autouse=True)
    def no_network(self, monkeypatch):
        def deny(*args, **kwargs):
            raise AssertionError("network access attempted during orchestrator test")

        monkeypatch.setattr(socket, "socket", deny)
        monkeypatch.setattr(socket, "create_connection", deny)

    def test_mock_properties(self, seeded_store):
        registry = default_registry()

        # (a) deterministic tagged response
        mock = MockBackend()
        script_planning(mock, QUERY, registry, [GOOD_PLAN])
        script_response(mock, QUERY, registry, GOOD_PLAN, seeded_store, "Mean HR was 72.0 BPM.")
        out1 = run_session(QUERY, registry, mock, make_ctx(seeded_store))
        out2 = run_session(QUERY, registry, mock, make_ctx(seeded_store))
        assert out1.text == out2.text and "<hr>72.0</hr>" in out1.text

        # (b) one replanning round driven by the failure hint, then success
        query = "What was the heart rate of user p01 at epoch 990000 from PPG?"
        bad = {"steps": [dict(GOOD_PLAN["steps"][0], args={"user_id": "p01", "modality": "PPG", "time": 990000})]
               + GOOD_PLAN["steps"][1:]}
        good = {"steps": [dict(GOOD_PLAN["steps"][0], args={"user_id": "p01", "modality": "PPG", "time": 1000000})]
                + GOOD_PLAN["steps"][1:]}
        mock2 = MockBackend()
        script_planning(mock2, query, registry, [bad])
        dp = DataPipe()
        failed = execute(parse_plan(bad), dp, registry, ToolContext(store=seeded_store, datapipe=dp))[0]
        hint = f"step {failed.step_index} ({failed.task}) failed with {failed.error_code}: {failed.error_message}"
        assert "1000000" in hint  # the nearest-recording hint reaches the replanner
        script_planning(mock2, query, registry, [good], failure_context=hint)
        script_response(mock2, query, registry, good, seeded_store, "Mean HR was 72.0 BPM.")
        recorder = RecordingBackend(mock2)
        out = run_session(query, registry, recorder, make_ctx(seeded_store))
        assert "<hr>72.0</hr>" in out.text
        assert len(recorder.prompts) == 5  # 2 planning rounds x 2 + 1 response

        # (c) persistent failure -> ClarificationRequest after 3 replans
        mock3 = MockBackend()
        script_planning(mock3, query, registry, [bad])
        script_planning(mock3, query, registry, [bad], failure_context=hint)
        recorder3 = RecordingBackend(mock3)
        out3 = run_session(query, registry, recorder3, make_ctx(seeded_store))
        assert isinstance(out3, ClarificationRequest)
        assert len(out3.attempts) == 4

        # (d) prompt-size property on every recorded prompt
        for prompt in recorder.prompts + recorder3.prompts:
            assert len(NUMERIC_LITERAL.findall(prompt)) <= 64
        report_line(7, "deterministic, 1 hinted replan, clarification after 3, prompts <= 64 literals")


class TestCriterion8TagExtraction:
    def test_round_trip_including_nan(self, seeded_store, tmp_path):
        registry = default_registry()

        # numeric case
        dp = DataPipe()
        ctx = ToolContext(store=seeded_store, datapipe=dp)
        results = execute(parse_plan(GOOD_PLAN), dp, registry, ctx)
        summaries = _result_summaries(results, dp)
        mean = summaries[-1]["mean_bpm"]
        mock = MockBackend()
        from pulse_agent.orchestrator import build_response_prompt

        mock.register(build_response_prompt(QUERY, summaries), f"Mean HR was {mean:.1f} BPM.")
        out = generate_response(QUERY, results, dp, mock)
        assert list(out.extracted_values) == extract_tagged_values(out.text) == [mean]

        # noisy case: a white-noise recording yields an all-NaN HR series
        from pulse_agent.datastore import DataStore

        store = DataStore(tmp_path / "noise")
        rng = np.random.default_rng(0)
        csv = tmp_path / "noise.csv"
        DataStore.write_csv(csv, rng.normal(0.0, 1.0, 19200), 20.0)
        store.ingest(csv, "p09", "PPG", 1_000_000.0, 20.0)
        plan_doc = {
            "steps": [
                {"task": "lookup_recording",
                 "args": {"user_id": "p09", "modality": "PPG", "time": 1000300}},
                {"task": "estimate_hr_ppg", "args": {"recording": {"$ref": "step0"}}},
                {"task": "summarize_hr", "args": {"hr": {"$ref": "step1"}}},
            ]
        }
        dp2 = DataPipe()
        ctx2 = ToolContext(store=store, datapipe=dp2)
        results2 = execute(parse_plan(plan_doc), dp2, registry, ctx2)
        summaries2 = _result_summaries(results2, dp2)
        assert summaries2[-1]["mean_bpm"] is None
        query2 = "What was the heart rate of user p09?"
        mock2 = MockBackend()
        mock2.register(
            build_response_prompt(query2, summaries2),
            "The signal was too noisy to estimate a heart rate: NaN.",
        )
        out2 = generate_response(query2, results2, dp2, mock2)
        assert "<hr>NaN</hr>" in out2.text
        extracted = extract_tagged_values(out2.text)
        assert len(extracted) == 1 and np.isnan(extracted[0])
        report_line(8, "numeric and NaN responses round-trip through the tags")


class TestCriterion9ByteStableReport:
    def build_report(self, out_dir):
        corpus = []
        ids = []
        for seed in range(3):
            ppg, ecg, _ = paired_recording(duration_s=300.0, seed=seed, corrupt_frac=0.2)
            corpus.append((estimate_hr(ppg), reference_hr(ecg)))
            ids.append(f"rec{seed:02d}")
        report = evaluation_report(corpus, recording_ids=ids, config_echo={"corpus_seeds": [0, 1, 2]})
        return write_report(report, out_dir)

    def test_identical_bytes_across_runs(self, tmp_path):
        p1 = self.build_report(tmp_path / "a")
        p2 = self.build_report(tmp_path / "b")
        assert p1.read_bytes() == p2.read_bytes()
        assert (p1.parent / "scatter.csv").read_bytes() == (p2.parent / "scatter.csv").read_bytes()
        assert (
            (p1.parent / "bland_altman.csv").read_bytes()
            == (p2.parent / "bland_altman.csv").read_bytes()
        )
        # sanity: report is well-formed JSON with the expected sections
        doc = json.loads(p1.read_text())
        assert set(doc) >= {"metrics", "bland_altman", "regression", "outliers"}
        report_line(9, "report.json and CSVs byte-identical across runs")
