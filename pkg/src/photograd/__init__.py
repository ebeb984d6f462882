"""Photorealistic post-processing for stylized images.

Given an original photograph and a stylized rendition of it, solve a
screened Poisson equation per Lab channel that keeps the stylized colors
while pulling the output's gradients back to the photograph's, removing
painterly artifacts.  Includes gradient-histogram diagnostics that
quantify the realism gain.
"""

from .analysis import (
    AnalysisReport,
    GradientHistogram,
    analysis_report,
    gradient_histogram,
    kl_divergence,
)
from .gradient import (
    GradientField,
    GradientTerm,
    GradientTermVariant,
    build_target_gradient,
    divergence,
    forward_gradient,
    histogram_match_1d,
    laplacian,
)
from .image import (
    LAB,
    SCALAR,
    SRGB,
    RasterImage,
    lab_to_rgb,
    load_image,
    resize_bilinear,
    rgb_to_lab,
    save_image,
)
from .solver import (
    Backend,
    SolveReport,
    SolverConfig,
    apply_photorealism,
    apply_screened_operator,
    neumann_laplacian_matrix,
    solve_spe,
    solve_spe_cg,
    solve_spe_dense,
    solve_spe_spectral,
    spe_objective,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "Backend",
    "GradientField",
    "GradientHistogram",
    "GradientTerm",
    "GradientTermVariant",
    "LAB",
    "RasterImage",
    "SCALAR",
    "SRGB",
    "SolveReport",
    "SolverConfig",
    "analysis_report",
    "apply_photorealism",
    "apply_screened_operator",
    "build_target_gradient",
    "divergence",
    "forward_gradient",
    "gradient_histogram",
    "histogram_match_1d",
    "kl_divergence",
    "lab_to_rgb",
    "laplacian",
    "load_image",
    "neumann_laplacian_matrix",
    "resize_bilinear",
    "rgb_to_lab",
    "save_image",
    "solve_spe",
    "solve_spe_cg",
    "solve_spe_dense",
    "solve_spe_spectral",
    "spe_objective",
]
