"""Gradient-distribution diagnostics.

Natural photographs have sharply peaked, heavy-tailed luminance-gradient
histograms; stylization typically flattens or shifts that distribution.
This module bins signed L-channel gradients and measures KL divergence
against the content image's histogram, quantifying how much realism the
pipeline restores.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .gradient import forward_gradient
from .image import SCALAR, SRGB, RasterImage, rgb_to_lab

DEFAULT_BINS = 101
SMOOTHING_EPS = 1e-8


@dataclass(eq=False)
class GradientHistogram:
    """Binned signed-gradient distribution with smoothed probabilities."""

    bin_edges: np.ndarray   # B+1 monotone edges spanning [-R, R]
    counts: np.ndarray      # B non-negative integers
    probabilities: np.ndarray  # B strictly positive floats summing to 1

    @classmethod
    def from_counts(cls, bin_edges, counts) -> "GradientHistogram":
        bin_edges = np.asarray(bin_edges, dtype=np.float64)
        counts = np.asarray(counts, dtype=np.int64)
        if bin_edges.ndim != 1 or counts.ndim != 1 or bin_edges.size != counts.size + 1:
            raise ValueError("need B+1 edges for B counts")
        if not np.all(np.diff(bin_edges) > 0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        smoothed = counts.astype(np.float64) + SMOOTHING_EPS
        return cls(bin_edges, counts, smoothed / smoothed.sum())


def _luminance_channel(image: RasterImage) -> np.ndarray:
    if image.color_space == SRGB and image.channels == 3:
        return rgb_to_lab(image).channel(0)
    if image.color_space == SCALAR and image.channels == 1:
        return image.channel(0)
    raise ValueError("expected a 3-channel sRGB or 1-channel scalar image")


def _gradient_samples(image: RasterImage) -> np.ndarray:
    """Pooled gx and gy samples of the luminance channel, structural zeros excluded."""
    grad = forward_gradient(_luminance_channel(image))
    return np.concatenate([grad.gx[:, :-1].ravel(), grad.gy[:-1, :].ravel()])


def gradient_histogram(
    image: RasterImage, bins: int = DEFAULT_BINS, range_max: float | None = None
) -> GradientHistogram:
    """Histogram of signed luminance gradients over [-R, R].

    R defaults to the image's own max absolute gradient; pass ``range_max``
    to bin several images onto a shared scale.  ``bins`` must be odd (>= 3)
    so that zero gradients fall in a well-defined center bin.
    """
    if bins < 3 or bins % 2 == 0:
        raise ValueError(f"bins must be odd and at least 3, got {bins}")
    samples = _gradient_samples(image)
    radius = float(np.max(np.abs(samples))) if range_max is None else float(range_max)
    if radius <= 0.0:
        radius = 1.0
    edges = np.linspace(-radius, radius, bins + 1)
    counts = np.histogram(np.clip(samples, -radius, radius), bins=edges)[0]
    return GradientHistogram.from_counts(edges, counts)


def kl_divergence(p: GradientHistogram, q: GradientHistogram) -> float:
    """KL(p || q) = sum p_i ln(p_i / q_i) over the smoothed probabilities."""
    if not np.array_equal(p.bin_edges, q.bin_edges):
        raise ValueError("histograms use different binnings")
    return float(np.sum(p.probabilities * np.log(p.probabilities / q.probabilities)))


@dataclass(eq=False)
class AnalysisReport:
    """Shared-binning histograms for a content/stylized/output triple, plus KL values."""

    hist_content: GradientHistogram
    hist_stylized: GradientHistogram
    hist_output: GradientHistogram
    kl_stylized_vs_content: float
    kl_output_vs_content: float

    def to_json_dict(self) -> dict:
        return {
            "bin_edges": self.hist_content.bin_edges.tolist(),
            "p_content": self.hist_content.probabilities.tolist(),
            "p_stylized": self.hist_stylized.probabilities.tolist(),
            "p_output": self.hist_output.probabilities.tolist(),
            "kl_stylized_vs_content": self.kl_stylized_vs_content,
            "kl_output_vs_content": self.kl_output_vs_content,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)

    def write_csv(self, path) -> None:
        edges = self.hist_content.bin_edges
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["edge_low", "edge_high", "p_content", "p_stylized", "p_output"])
            for i in range(edges.size - 1):
                writer.writerow([
                    repr(float(edges[i])),
                    repr(float(edges[i + 1])),
                    repr(float(self.hist_content.probabilities[i])),
                    repr(float(self.hist_stylized.probabilities[i])),
                    repr(float(self.hist_output.probabilities[i])),
                ])


def analysis_report(
    content: RasterImage,
    stylized: RasterImage,
    output: RasterImage,
    bins: int = DEFAULT_BINS,
) -> AnalysisReport:
    """Compare a triple's gradient distributions on one shared binning.

    The bin range is the max absolute gradient across all three images, so
    the three histograms are directly comparable.
    """
    shapes = {(img.height, img.width) for img in (content, stylized, output)}
    if len(shapes) != 1:
        raise ValueError(f"images must share dimensions, got {sorted(shapes)}")
    radius = max(
        float(np.max(np.abs(_gradient_samples(img))))
        for img in (content, stylized, output)
    )
    hists = [
        gradient_histogram(img, bins=bins, range_max=radius)
        for img in (content, stylized, output)
    ]
    return AnalysisReport(
        hist_content=hists[0],
        hist_stylized=hists[1],
        hist_output=hists[2],
        kl_stylized_vs_content=kl_divergence(hists[1], hists[0]),
        kl_output_vs_content=kl_divergence(hists[2], hists[0]),
    )
