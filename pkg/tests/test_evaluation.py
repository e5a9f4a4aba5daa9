"""Tests for frame-level AUROC, ROC points and the per-category report."""

import numpy as np
import pytest
from sklearn.metrics import auc

from pstae.evaluation import auroc, evaluate, roc_points
from pstae.scoring import ScoreSeries
from pstae_core.errors import ConfigurationError, SingleClassError


def _series(video_id, score, label):
    score = np.asarray(score, dtype=np.float64)
    return ScoreSeries(
        video_id=video_id,
        raw_loss=score,
        smoothed=score,
        score=score,
        label=np.asarray(label, dtype=np.int64),
    )


class TestAuroc:
    def test_perfect_separation(self):
        assert auroc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_inverted_separation(self):
        assert auroc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0

    def test_one_swapped_pair(self):
        assert auroc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)

    def test_constant_scores_give_one_half(self):
        assert auroc([0.5] * 6, [0, 1, 0, 1, 1, 0]) == pytest.approx(0.5)

    @pytest.mark.parametrize("label", [0, 1])
    def test_single_class_is_undefined(self, label):
        with pytest.raises(SingleClassError) as excinfo:
            auroc([0.1, 0.2, 0.3], [label] * 3)
        assert excinfo.value.label == label

    def test_rejects_non_binary_labels(self):
        with pytest.raises(ConfigurationError, match="0 or 1"):
            auroc([0.1, 0.2], [0, 2])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ConfigurationError):
            auroc([0.1, 0.2, 0.3], [0, 1])


class TestRocPoints:
    def test_curve_endpoints(self):
        curve = roc_points([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
        assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
        assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0
        assert curve.thresholds[0] == pytest.approx(1.8)
        assert curve.thresholds == sorted(curve.thresholds, reverse=True)
        assert curve.auroc == pytest.approx(0.75)

    def test_trapezoid_area_matches_auroc(self, rng):
        scores = rng.uniform(size=60)
        labels = (rng.uniform(size=60) < 0.4).astype(int)
        labels[:2] = (0, 1)
        curve = roc_points(scores, labels)
        assert auc(curve.fpr, curve.tpr) == pytest.approx(curve.auroc, abs=1e-12)


class TestEvaluate:
    def test_pooled_and_per_category(self):
        series = [
            _series("test-0000", [0.1, 0.2, 0.1], [0, 0, 0]),
            _series("test-0001", [0.1, 0.9, 0.8], [0, 1, 1]),
            _series("test-0002", [0.15, 0.05, 0.3], [0, 1, 1]),
        ]
        categories = {
            "test-0000": "normal",
            "test-0001": "aggressive-behavior",
            "test-0002": "medical-issue",
        }
        report = evaluate(series, categories)
        assert report.num_videos == 3
        assert report.num_frames == 9
        assert report.per_category["aggressive-behavior"] == 1.0
        assert report.per_category["medical-issue"] < 1.0
        assert report.auroc == pytest.approx(
            auroc(
                np.concatenate([s.score for s in series]),
                np.concatenate([s.label for s in series]),
            )
        )
        assert report.bgsub_auroc is None
        assert report.errors == []

    def test_baseline_columns(self):
        series = [
            _series("a", [0.1, 0.2], [0, 0]),
            _series("b", [0.1, 0.9], [0, 1]),
        ]
        bgsub = {"a": np.array([1, 1]), "b": np.array([1, 1])}
        report = evaluate(series, {"b": "medical-issue"}, bgsub)
        assert report.bgsub_auroc == pytest.approx(0.5)
        assert report.bgsub_per_category == {"medical-issue": pytest.approx(0.5)}

    def test_baseline_length_mismatch(self):
        series = [_series("a", [0.1, 0.2], [0, 1])]
        with pytest.raises(ConfigurationError, match="baseline has 3 frames"):
            evaluate(series, {}, {"a": np.zeros(3)})

    def test_video_without_baseline(self):
        series = [_series("a", [0.1, 0.2], [0, 1]), _series("stray", [0.3, 0.4], [0, 1])]
        with pytest.raises(ConfigurationError, match="stray"):
            evaluate(series, {"a": "normal"}, {"a": np.zeros(2)})

    def test_single_class_is_reported_not_raised(self):
        series = [_series("a", [0.1, 0.2], [0, 0])]
        report = evaluate(series, {"a": "normal"})
        assert report.auroc is None
        assert report.errors and "total" in report.errors[0]

    def test_video_order_does_not_matter(self, rng):
        series = [
            _series(f"v{i}", rng.uniform(size=10), rng.integers(0, 2, size=10)) for i in range(4)
        ]
        forward = evaluate(series, {})
        backward = evaluate(series[::-1], {})
        assert forward == backward
