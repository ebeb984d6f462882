import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photograd import (
    GradientHistogram,
    RasterImage,
    SCALAR,
    analysis_report,
    gradient_histogram,
    kl_divergence,
)

from synth import make_content


def scalar_image(field):
    return RasterImage(np.asarray(field, dtype=np.float64)[..., None], SCALAR)


class TestGradientHistogram:
    def test_constant_image_mass_in_center_bin(self):
        hist = gradient_histogram(scalar_image(np.full((8, 8), 0.5)), bins=7)
        center = hist.counts.size // 2
        assert hist.counts[center] == hist.counts.sum()
        assert hist.probabilities[center] > 0.999

    def test_unit_ramp_splits_between_center_and_one_bin(self):
        h, w = 6, 9
        ramp = np.tile(np.arange(float(w)), (h, 1))
        hist = gradient_histogram(scalar_image(ramp), bins=5)
        center = hist.counts.size // 2
        # all gx samples are 1 (the range max, last bin); all gy samples are 0
        assert hist.counts[-1] == h * (w - 1)
        assert hist.counts[center] == (h - 1) * w
        assert hist.counts.sum() == h * (w - 1) + (h - 1) * w

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**31 - 1),
           h=st.integers(2, 12), w=st.integers(2, 12),
           bins=st.sampled_from([3, 5, 101]))
    def test_mass_conservation(self, seed, h, w, bins):
        r = np.random.default_rng(seed)
        hist = gradient_histogram(scalar_image(r.normal(0, 1, (h, w))), bins=bins)
        assert hist.counts.sum() == h * (w - 1) + (h - 1) * w
        assert abs(hist.probabilities.sum() - 1.0) < 1e-12
        assert np.all(hist.probabilities > 0)

    def test_even_or_tiny_bin_counts_rejected(self):
        image = scalar_image(np.zeros((4, 4)))
        with pytest.raises(ValueError, match="odd"):
            gradient_histogram(image, bins=100)
        with pytest.raises(ValueError, match="odd"):
            gradient_histogram(image, bins=1)

    def test_lab_tagged_image_rejected(self):
        from photograd import LAB

        image = RasterImage(np.zeros((4, 4, 3)), LAB)
        with pytest.raises(ValueError, match="sRGB"):
            gradient_histogram(image)

    def test_natural_scene_histogram_is_peaked_and_heavy_tailed(self):
        content = make_content(7, 200, 260)
        hist = gradient_histogram(content, bins=101)
        p = hist.probabilities
        centers = 0.5 * (hist.bin_edges[:-1] + hist.bin_edges[1:])
        center = p.size // 2
        assert int(np.argmax(p)) == center

        # log-probability decays roughly linearly in |gradient| over the
        # bins holding the central 80% of the mass
        cdf = np.cumsum(p)
        sel = slice(int(np.searchsorted(cdf, 0.10)), int(np.searchsorted(cdf, 0.90)) + 1)
        x = np.abs(centers[sel])
        y = np.log(p[sel])
        design = np.vstack([x, np.ones_like(x)]).T
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        fitted = design @ coef
        r_squared = 1.0 - np.sum((y - fitted) ** 2) / np.sum((y - y.mean()) ** 2)
        assert coef[0] < 0
        assert r_squared > 0.9

        # heavier-tailed than a Gaussian by a wide margin (Laplace has
        # excess kurtosis 3); recompute from the raw samples
        from photograd.analysis import _gradient_samples
        from scipy import stats

        assert stats.kurtosis(_gradient_samples(content)) > 3.0


class TestKLDivergence:
    def test_self_divergence_is_exactly_zero(self, rng):
        edges = np.linspace(-1, 1, 12)
        hist = GradientHistogram.from_counts(edges, rng.integers(0, 50, 11))
        assert kl_divergence(hist, hist) == 0.0

    def test_two_bin_hand_value(self):
        edges = np.array([0.0, 0.5, 1.0])
        p = GradientHistogram.from_counts(edges, [1, 1])
        q = GradientHistogram.from_counts(edges, [1, 3])
        expected = 0.5 * np.log(2.0) + 0.5 * np.log(2.0 / 3.0)  # ~0.1438
        assert abs(kl_divergence(p, q) - expected) < 1e-6

    @settings(max_examples=100, deadline=None)
    @given(
        counts_p=st.lists(st.integers(0, 1000), min_size=3, max_size=31),
        counts_q=st.lists(st.integers(0, 1000), min_size=3, max_size=31),
    )
    def test_non_negative(self, counts_p, counts_q):
        size = min(len(counts_p), len(counts_q))
        edges = np.linspace(-1, 1, size + 1)
        p = GradientHistogram.from_counts(edges, counts_p[:size])
        q = GradientHistogram.from_counts(edges, counts_q[:size])
        assert kl_divergence(p, q) >= -1e-12

    def test_mismatched_binning_rejected(self):
        p = GradientHistogram.from_counts(np.linspace(-1, 1, 4), [1, 2, 3])
        q = GradientHistogram.from_counts(np.linspace(-2, 2, 4), [1, 2, 3])
        with pytest.raises(ValueError, match="binning"):
            kl_divergence(p, q)


class TestAnalysisReport:
    def test_output_equal_to_content_scores_zero(self, content_image, stylized_image):
        report = analysis_report(content_image, stylized_image, content_image)
        assert report.kl_output_vs_content < 1e-6

    def test_output_equal_to_stylized_scores_equal(self, content_image, stylized_image):
        report = analysis_report(content_image, stylized_image, stylized_image)
        assert report.kl_output_vs_content == pytest.approx(report.kl_stylized_vs_content)

    def test_pipeline_output_is_closer_than_stylized(self, fixture_triples):
        for content, stylized, output in fixture_triples:
            report = analysis_report(content, stylized, output)
            assert report.kl_output_vs_content < report.kl_stylized_vs_content

    def test_histograms_share_binning(self, fixture_triples):
        content, stylized, output = fixture_triples[0]
        report = analysis_report(content, stylized, output)
        assert np.array_equal(report.hist_content.bin_edges, report.hist_stylized.bin_edges)
        assert np.array_equal(report.hist_content.bin_edges, report.hist_output.bin_edges)

    def test_dimension_mismatch_rejected(self, content_image, rng):
        odd = RasterImage(rng.uniform(0, 1, (8, 8, 3)))
        with pytest.raises(ValueError, match="dimensions"):
            analysis_report(content_image, content_image, odd)

    def test_json_and_csv_serialization(self, tmp_path, fixture_triples):
        content, stylized, output = fixture_triples[0]
        report = analysis_report(content, stylized, output, bins=11)
        json_path = tmp_path / "report.json"
        csv_path = tmp_path / "report.csv"
        report.write_json(json_path)
        report.write_csv(csv_path)

        payload = json.loads(json_path.read_text())
        assert set(payload) == {
            "bin_edges", "p_content", "p_stylized", "p_output",
            "kl_stylized_vs_content", "kl_output_vs_content",
        }
        assert len(payload["bin_edges"]) == 12
        assert payload["kl_output_vs_content"] == report.kl_output_vs_content

        with open(csv_path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["edge_low", "edge_high", "p_content", "p_stylized", "p_output"]
        assert len(rows) == 12  # header + 11 bins
        assert float(rows[1][0]) == report.hist_content.bin_edges[0]
