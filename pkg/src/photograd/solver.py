"""Screened Poisson solves: u - lambda * div(grad u) = rhs, per channel.

Solving min_O ||O - fidelity||^2 + lambda * ||grad O - G||^2 over the pixel
grid leads to the normal equations (I - lambda * div . grad) O = fidelity -
lambda * div G.  Three interchangeable backends compute the same minimizer:

* spectral: the Neumann Laplacian from the consistent forward/backward
  stencils is diagonalized exactly by the type-II DCT, giving a direct
  O(HW log HW) solve.  Its eigenvalues (2cos(pi i/H) - 2) + (2cos(pi j/W) - 2)
  are <= 0, so the screened denominator 1 - lambda*eig never vanishes.
* cg: matrix-free conjugate gradient on the SPD operator, warm-started
  from the fidelity field (exact at lambda = 0).
* dense: literal assembly of the (HW)x(HW) system, the small-instance
  oracle the other two are validated against.

``apply_photorealism`` runs the full image pipeline: convert content and
stylized images to Lab, solve each channel against the content gradients
(lambda_l on L, lambda_ab on a and b), convert back to sRGB.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import fft as _fft

from .gradient import (
    GradientField,
    GradientTerm,
    GradientTermVariant,
    build_target_gradient,
    divergence,
    forward_gradient,
    laplacian,
)
from .image import LAB, SRGB, RasterImage, lab_to_rgb, resize_bilinear, rgb_to_lab

DENSE_MAX_PIXELS = 4096


class Backend(str, Enum):
    SPECTRAL = "fft"
    CG = "cg"
    DENSE = "dense"


@dataclass
class SolveReport:
    """Certificate for one channel solve."""

    residual_norm: float  # relative l2 residual of the normal equations
    iterations: int = 0   # 0 for the direct backends
    wall_time: float = 0.0
    converged: bool = True


@dataclass
class SolverConfig:
    """Pipeline settings: per-channel weights, backend, gradient-term variant."""

    lambda_l: float = 5.0
    lambda_ab: float = 1.0
    backend: Backend = Backend.SPECTRAL
    cg_tolerance: float = 1e-8
    cg_max_iterations: int = 10000
    gradient_term: GradientTerm = GradientTerm.ORIGINAL
    style: RasterImage | None = None  # histmatch reference image

    def __post_init__(self):
        self.backend = Backend(self.backend)
        self.gradient_term = GradientTerm(self.gradient_term)
        if self.lambda_l < 0 or self.lambda_ab < 0:
            raise ValueError("lambda weights must be non-negative")
        if self.cg_tolerance <= 0:
            raise ValueError("cg tolerance must be positive")
        if self.cg_max_iterations < 1:
            raise ValueError("cg needs at least one iteration")
        if self.gradient_term is GradientTerm.HISTMATCH and self.style is None:
            raise ValueError("histmatch needs a style image")


def apply_screened_operator(field: np.ndarray, lam: float) -> np.ndarray:
    """Matrix-free application of I - lambda * div(grad)."""
    return field - lam * laplacian(field)


def _check_problem(fidelity: np.ndarray, target_grad: GradientField, lam: float) -> np.ndarray:
    fidelity = np.asarray(fidelity, dtype=np.float64)
    if fidelity.ndim != 2 or fidelity.shape[0] < 2 or fidelity.shape[1] < 2:
        raise ValueError(f"fidelity must be a 2D field of at least 2x2, got {fidelity.shape}")
    if target_grad.shape != fidelity.shape:
        raise ValueError(
            f"target gradient shape {target_grad.shape} does not match fidelity {fidelity.shape}"
        )
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    return fidelity


def _rhs(fidelity: np.ndarray, target_grad: GradientField, lam: float) -> np.ndarray:
    return fidelity - lam * divergence(target_grad)


def _relative_residual(solution, fidelity, target_grad, lam) -> float:
    rhs = _rhs(fidelity, target_grad, lam)
    residual = np.linalg.norm(rhs - apply_screened_operator(solution, lam))
    rhs_norm = np.linalg.norm(rhs)
    return float(residual / rhs_norm) if rhs_norm > 0 else float(residual)


def solve_spe_spectral(fidelity, target_grad: GradientField, lam: float) -> np.ndarray:
    """Direct solve by diagonalizing the Neumann Laplacian with the 2D DCT-II."""
    fidelity = _check_problem(fidelity, target_grad, lam)
    if lam == 0:
        return fidelity.copy()
    rhs = _rhs(fidelity, target_grad, lam)
    h, w = rhs.shape
    eig_y = 2.0 * np.cos(np.pi * np.arange(h) / h) - 2.0
    eig_x = 2.0 * np.cos(np.pi * np.arange(w) / w) - 2.0
    denom = 1.0 - lam * (eig_y[:, None] + eig_x[None, :])
    coeffs = _fft.dctn(rhs, type=2, norm="ortho")
    return _fft.idctn(coeffs / denom, type=2, norm="ortho")


def solve_spe_cg(
    fidelity,
    target_grad: GradientField,
    lam: float,
    tol: float = 1e-8,
    max_iter: int = 10000,
) -> tuple[np.ndarray, SolveReport]:
    """Matrix-free conjugate gradient; stops at relative residual < tol.

    On non-convergence the best iterate is returned with the report's
    ``converged`` flag cleared.
    """
    fidelity = _check_problem(fidelity, target_grad, lam)
    start = time.perf_counter()
    b = _rhs(fidelity, target_grad, lam)
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        solution = np.zeros_like(fidelity)
        return solution, SolveReport(0.0, 0, time.perf_counter() - start, True)
    x = fidelity.copy()
    r = b - apply_screened_operator(x, lam)
    iterations = 0
    converged = np.linalg.norm(r) <= tol * b_norm
    if not converged:
        p = r.copy()
        rr = float(np.vdot(r, r))
        for iterations in range(1, max_iter + 1):
            ap = apply_screened_operator(p, lam)
            alpha = rr / float(np.vdot(p, ap))
            x += alpha * p
            r -= alpha * ap
            rr_next = float(np.vdot(r, r))
            if np.sqrt(rr_next) <= tol * b_norm:
                converged = True
                break
            p = r + (rr_next / rr) * p
            rr = rr_next
    residual = float(np.linalg.norm(b - apply_screened_operator(x, lam)) / b_norm)
    return x, SolveReport(residual, iterations, time.perf_counter() - start, converged)


def neumann_laplacian_matrix(height: int, width: int) -> np.ndarray:
    """The dense Neumann Laplacian on a height x width grid, row-major pixels."""
    n = height * width
    lap = np.zeros((n, n))
    idx = np.arange(n).reshape(height, width)
    pairs = (
        (idx[:, :-1].ravel(), idx[:, 1:].ravel()),
        (idx[:-1, :].ravel(), idx[1:, :].ravel()),
    )
    for left, right in pairs:
        np.add.at(lap, (left, right), 1.0)
        np.add.at(lap, (right, left), 1.0)
        np.add.at(lap, (left, left), -1.0)
        np.add.at(lap, (right, right), -1.0)
    return lap


def solve_spe_dense(fidelity, target_grad: GradientField, lam: float) -> np.ndarray:
    """Assemble I - lambda*L literally and solve; limited to small instances."""
    fidelity = _check_problem(fidelity, target_grad, lam)
    h, w = fidelity.shape
    if h * w > DENSE_MAX_PIXELS:
        raise ValueError(f"dense backend is capped at {DENSE_MAX_PIXELS} pixels, got {h * w}")
    system = np.eye(h * w) - lam * neumann_laplacian_matrix(h, w)
    rhs = _rhs(fidelity, target_grad, lam)
    return np.linalg.solve(system, rhs.ravel()).reshape(h, w)


def solve_spe(
    fidelity,
    target_grad: GradientField,
    lam: float,
    backend: Backend = Backend.SPECTRAL,
    cg_tolerance: float = 1e-8,
    cg_max_iterations: int = 10000,
) -> tuple[np.ndarray, SolveReport]:
    """Solve one channel with the chosen backend and certify the residual."""
    backend = Backend(backend)
    start = time.perf_counter()
    iterations = 0
    converged = True
    if backend is Backend.CG:
        solution, cg_report = solve_spe_cg(
            fidelity, target_grad, lam, cg_tolerance, cg_max_iterations
        )
        iterations, converged = cg_report.iterations, cg_report.converged
    elif backend is Backend.SPECTRAL:
        solution = solve_spe_spectral(fidelity, target_grad, lam)
    else:
        solution = solve_spe_dense(fidelity, target_grad, lam)
    wall = time.perf_counter() - start
    residual = _relative_residual(solution, np.asarray(fidelity, dtype=np.float64), target_grad, lam)
    return solution, SolveReport(residual, iterations, wall, converged)


def spe_objective(candidate, fidelity, target_grad: GradientField, lam: float) -> float:
    """The quadratic objective ||candidate - fidelity||^2 + lam*||grad candidate - target||^2."""
    candidate = np.asarray(candidate, dtype=np.float64)
    grad = forward_gradient(candidate)
    data_term = float(np.sum((candidate - np.asarray(fidelity)) ** 2))
    grad_term = float(
        np.sum((grad.gx - target_grad.gx) ** 2) + np.sum((grad.gy - target_grad.gy) ** 2)
    )
    return data_term + lam * grad_term


def apply_photorealism(
    content: RasterImage,
    stylized: RasterImage,
    config: SolverConfig | None = None,
) -> tuple[RasterImage, tuple[SolveReport, SolveReport, SolveReport]]:
    """Make a stylized image photorealistic again.

    Both images are converted to Lab; each channel of the stylized image is
    used as the fidelity target while its gradients are pulled towards the
    content image's (or a variant-derived target), then the merged result is
    converted back to sRGB with per-channel clamping.  A stylized image whose
    size disagrees with the content is bilinearly resampled, with a warning.
    """
    config = config if config is not None else SolverConfig()
    for name, img in (("content", content), ("stylized", stylized)):
        if img.channels != 3 or img.color_space != SRGB:
            raise ValueError(f"{name} image must be 3-channel sRGB")
    if (stylized.height, stylized.width) != (content.height, content.width):
        warnings.warn(
            f"stylized image is {stylized.height}x{stylized.width}, "
            f"resampling to content size {content.height}x{content.width}"
        )
        stylized = resize_bilinear(stylized, content.height, content.width)
    content_lab = rgb_to_lab(content)
    stylized_lab = rgb_to_lab(stylized)
    style_lab = None
    if config.gradient_term is GradientTerm.HISTMATCH:
        style = config.style
        if style.color_space == SRGB and style.channels == 3:
            style_lab = rgb_to_lab(style)
        else:
            raise ValueError("style image must be 3-channel sRGB")

    out = np.empty_like(content_lab.data)
    reports = []
    for c in range(3):
        lam = config.lambda_l if c == 0 else config.lambda_ab
        grad_content = forward_gradient(content_lab.channel(c))
        grad_stylized = forward_gradient(stylized_lab.channel(c))
        reference = forward_gradient(style_lab.channel(c)) if style_lab is not None else None
        variant = GradientTermVariant(config.gradient_term, reference)
        target = build_target_gradient(variant, grad_content, grad_stylized)
        solution, report = solve_spe(
            stylized_lab.channel(c),
            target,
            lam,
            config.backend,
            config.cg_tolerance,
            config.cg_max_iterations,
        )
        out[:, :, c] = solution
        reports.append(report)
    return lab_to_rgb(RasterImage(out, LAB)), tuple(reports)
