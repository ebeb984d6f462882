"""Discrete differential operators and target-gradient construction.

The gradient is the forward difference with replicate (Neumann) boundaries:
the last column of gx and the last row of gy are structurally zero.
``divergence`` is built as the exact negative adjoint of ``forward_gradient``,
so <grad u, g> = -<u, div g> holds to machine precision for any fields u, g.
That pairing makes ``divergence(forward_gradient(f))`` the standard 5-point
Neumann Laplacian, which the spectral solver diagonalizes exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

HISTMATCH_BINS = 256


@dataclass(eq=False)
class GradientField:
    """Paired x/y forward-difference fields of one scalar channel.

    Fields produced by this module keep gx[:, -1] == 0 and gy[-1, :] == 0;
    ``divergence`` treats those entries as structurally zero regardless.
    """

    gx: np.ndarray
    gy: np.ndarray

    def __post_init__(self):
        self.gx = np.asarray(self.gx, dtype=np.float64)
        self.gy = np.asarray(self.gy, dtype=np.float64)
        if self.gx.ndim != 2 or self.gx.shape != self.gy.shape:
            raise ValueError(f"gx and gy must be matching 2D fields, got {self.gx.shape} and {self.gy.shape}")
        if not (np.all(np.isfinite(self.gx)) and np.all(np.isfinite(self.gy))):
            raise ValueError("gradient field contains NaN or Inf")

    @property
    def shape(self) -> tuple[int, int]:
        return self.gx.shape


class GradientTerm(str, Enum):
    """How the target gradient field is built from content and stylized gradients."""

    ORIGINAL = "original"
    ABSOLUTE = "abs"
    SQUARED = "square"
    HISTMATCH = "histmatch"


@dataclass(eq=False)
class GradientTermVariant:
    """A gradient-term choice, plus the style-gradient reference when matching histograms."""

    term: GradientTerm = GradientTerm.ORIGINAL
    reference: GradientField | None = None

    def __post_init__(self):
        self.term = GradientTerm(self.term)
        if self.term is GradientTerm.HISTMATCH and self.reference is None:
            raise ValueError("histmatch needs a reference gradient field")


def _check_field(field: np.ndarray) -> np.ndarray:
    field = np.asarray(field, dtype=np.float64)
    if field.ndim != 2:
        raise ValueError(f"expected a 2D field, got shape {field.shape}")
    if field.shape[0] < 2 or field.shape[1] < 2:
        raise ValueError(f"fields must be at least 2x2, got {field.shape}")
    return field


def forward_gradient(field: np.ndarray) -> GradientField:
    """Forward differences: gx[i,j] = f[i,j+1] - f[i,j], gy[i,j] = f[i+1,j] - f[i,j].

    The out-of-range last column / last row entries are zero.
    """
    field = _check_field(field)
    gx = np.zeros_like(field)
    gy = np.zeros_like(field)
    gx[:, :-1] = field[:, 1:] - field[:, :-1]
    gy[:-1, :] = field[1:, :] - field[:-1, :]
    return GradientField(gx, gy)


def divergence(grad: GradientField) -> np.ndarray:
    """Backward-difference divergence, the negative adjoint of forward_gradient."""
    gx, gy = grad.gx, grad.gy
    h, w = gx.shape
    div = np.zeros_like(gx)
    div[:, 0] += gx[:, 0]
    div[:, 1:w - 1] += gx[:, 1:w - 1] - gx[:, :w - 2]
    div[:, w - 1] -= gx[:, w - 2]
    div[0, :] += gy[0, :]
    div[1:h - 1, :] += gy[1:h - 1, :] - gy[:h - 2, :]
    div[h - 1, :] -= gy[h - 2, :]
    return div


def laplacian(field: np.ndarray) -> np.ndarray:
    """5-point Neumann Laplacian, computed as divergence(forward_gradient(field))."""
    return divergence(forward_gradient(field))


def histogram_match_1d(values, reference, bins: int = HISTMATCH_BINS) -> np.ndarray:
    """Remap ``values`` so their empirical distribution matches ``reference``.

    Monotone CDF-based mapping over ``bins`` uniform bins spanning the joint
    min/max range; rank order of the input is preserved and the result is
    accurate to one bin width.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    reference = np.asarray(reference, dtype=np.float64).ravel()
    if values.size == 0 or reference.size == 0:
        raise ValueError("histogram matching needs non-empty inputs")
    lo = min(values.min(), reference.min())
    hi = max(values.max(), reference.max())
    if hi <= lo:
        return values.copy()
    edges = np.linspace(lo, hi, bins + 1)
    # piecewise-linear CDFs through the bin edges, composed as ref_cdf^-1(value_cdf)
    value_cdf = np.concatenate([[0.0], np.cumsum(np.histogram(values, bins=edges)[0])]) / values.size
    ref_cdf = np.concatenate([[0.0], np.cumsum(np.histogram(reference, bins=edges)[0])]) / reference.size
    quantiles = np.interp(values, edges, value_cdf)
    return np.interp(quantiles, ref_cdf, edges)


def _sign_positive_zero(x: np.ndarray) -> np.ndarray:
    # sign(0) = +1 for deterministic tie-breaking
    return np.where(x >= 0.0, 1.0, -1.0)


def build_target_gradient(
    variant: GradientTermVariant,
    grad_content: GradientField,
    grad_stylized: GradientField,
) -> GradientField:
    """Build the gradient field the solver will pull the output towards.

    original:  the content gradients, unchanged.
    abs/square: content gradient magnitudes carrying the stylized gradient's
               sign (the two differ only in penalty shape, which this
               linearized target collapses).
    histmatch: stylized gradients remapped, per axis, onto the reference
               (style) gradient distribution.  The reference field may have
               any dimensions; only its sample distribution is used.
    """
    if grad_content.shape != grad_stylized.shape:
        raise ValueError(
            f"gradient fields disagree: {grad_content.shape} vs {grad_stylized.shape}"
        )
    term = variant.term
    if term is GradientTerm.ORIGINAL:
        return GradientField(grad_content.gx.copy(), grad_content.gy.copy())
    if term in (GradientTerm.ABSOLUTE, GradientTerm.SQUARED):
        gx = np.abs(grad_content.gx) * _sign_positive_zero(grad_stylized.gx)
        gy = np.abs(grad_content.gy) * _sign_positive_zero(grad_stylized.gy)
        # keep the structural zeros exact (|0| * sign is +/-0 already, but be explicit)
        gx[:, -1] = 0.0
        gy[-1, :] = 0.0
        return GradientField(gx, gy)
    reference = variant.reference
    gx = np.zeros_like(grad_stylized.gx)
    gy = np.zeros_like(grad_stylized.gy)
    gx[:, :-1] = histogram_match_1d(
        grad_stylized.gx[:, :-1], reference.gx[:, :-1]
    ).reshape(grad_stylized.gx[:, :-1].shape)
    gy[:-1, :] = histogram_match_1d(
        grad_stylized.gy[:-1, :], reference.gy[:-1, :]
    ).reshape(grad_stylized.gy[:-1, :].shape)
    return GradientField(gx, gy)
