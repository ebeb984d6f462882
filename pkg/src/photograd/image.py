"""Image containers, PNG/JPEG file I/O and sRGB <-> CIELAB conversion.

Pixel data is kept as float64 numpy arrays of shape (height, width,
channels), row-major with interleaved channels.  sRGB samples live in
[0, 1]; Lab samples have L in [0, 100] and a, b within roughly
[-128, 127] for any in-gamut sRGB input.  Images must be at least 2x2 so
that gradients are defined along both axes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage
from scipy import ndimage

SRGB = "srgb"
LAB = "lab"
SCALAR = "scalar"
COLOR_SPACES = (SRGB, LAB, SCALAR)

# Linear sRGB -> CIEXYZ under D65, derived from the IEC 61966-2-1 primaries
# and white chromaticity (0.3127, 0.3290).  The reference white is taken as
# the matrix's own row sums so that sRGB (1,1,1) maps to exactly L*=100, a*=b*=0.
_RGB_TO_XYZ = np.array([
    [0.4123907992659595, 0.3575843393838780, 0.1804807884018343],
    [0.2126390058715104, 0.7151686787677559, 0.0721923153607337],
    [0.0193308187155918, 0.1191947797946260, 0.9505321522496606],
])
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_WHITE = _RGB_TO_XYZ.sum(axis=1)

# CIE f(t) kink point 6/29 and its companions
_DELTA = 6.0 / 29.0
_DELTA3 = _DELTA ** 3
_F_SLOPE = 1.0 / (3.0 * _DELTA * _DELTA)


@dataclass(eq=False)
class RasterImage:
    """A float image plus the color space its samples are expressed in."""

    data: np.ndarray
    color_space: str = SRGB

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3:
            raise ValueError(f"image data must be (H, W, C), got shape {self.data.shape}")
        if self.data.shape[2] not in (1, 3):
            raise ValueError(f"images carry 1 or 3 channels, got {self.data.shape[2]}")
        if self.data.shape[0] < 2 or self.data.shape[1] < 2:
            raise ValueError(f"images must be at least 2x2, got {self.data.shape[0]}x{self.data.shape[1]}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("image data contains NaN or Inf")
        if self.color_space not in COLOR_SPACES:
            raise ValueError(f"unknown color space {self.color_space!r}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def channel(self, index: int) -> np.ndarray:
        """A single channel as a 2D view of the underlying data."""
        return self.data[:, :, index]


def load_image(path) -> RasterImage:
    """Read an 8-bit PNG or JPEG file as an sRGB image with samples in [0, 1].

    Palette and grayscale files are expanded to 3 channels; an alpha channel
    is dropped with a warning.  Value v of an 8-bit sample maps to v / 255.
    """
    with PILImage.open(path) as im:
        if "A" in im.getbands():
            warnings.warn(f"{path}: alpha channel is not supported and was stripped")
        rgb = im.convert("RGB")
        data = np.asarray(rgb, dtype=np.float64) / 255.0
    return RasterImage(data, SRGB)


def save_image(image: RasterImage, path) -> None:
    """Write an sRGB image as an 8-bit PNG.

    Sample s maps to round(clamp(s, 0, 1) * 255), rounding halves up.
    """
    if image.color_space != SRGB:
        raise ValueError(f"only sRGB images can be saved, got {image.color_space!r}")
    quantized = np.floor(np.clip(image.data, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    if image.channels == 1:
        pil = PILImage.fromarray(quantized[:, :, 0], mode="L")
    else:
        pil = PILImage.fromarray(quantized, mode="RGB")
    pil.save(path, format="PNG")


def _srgb_to_linear(srgb: np.ndarray) -> np.ndarray:
    return np.where(srgb > 0.04045, ((srgb + 0.055) / 1.055) ** 2.4, srgb / 12.92)


def _linear_to_srgb(linear: np.ndarray) -> np.ndarray:
    # clip before the fractional power; negatives fall in the linear branch anyway
    gamma = 1.055 * np.power(np.clip(linear, 0.0, None), 1.0 / 2.4) - 0.055
    return np.where(linear > 0.0031308, gamma, 12.92 * linear)


def rgb_to_lab(image: RasterImage) -> RasterImage:
    """Convert a 3-channel sRGB image to CIE L*a*b* (D65 white point)."""
    if image.channels != 3:
        raise ValueError(f"Lab conversion needs 3 channels, got {image.channels}")
    if image.color_space != SRGB:
        raise ValueError(f"expected an sRGB image, got {image.color_space!r}")
    linear = _srgb_to_linear(image.data)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE
    f = np.where(t > _DELTA3, np.cbrt(t), t * _F_SLOPE + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[:, :, 0] = 116.0 * f[:, :, 1] - 16.0
    lab[:, :, 1] = 500.0 * (f[:, :, 0] - f[:, :, 1])
    lab[:, :, 2] = 200.0 * (f[:, :, 1] - f[:, :, 2])
    return RasterImage(lab, LAB)


def lab_to_rgb(image: RasterImage) -> RasterImage:
    """Convert a 3-channel Lab image back to sRGB, clamping out-of-gamut pixels."""
    if image.channels != 3:
        raise ValueError(f"Lab conversion needs 3 channels, got {image.channels}")
    if image.color_space != LAB:
        raise ValueError(f"expected a Lab image, got {image.color_space!r}")
    fy = (image.data[:, :, 0] + 16.0) / 116.0
    fx = fy + image.data[:, :, 1] / 500.0
    fz = fy - image.data[:, :, 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    t = np.where(f > _DELTA, f ** 3, (f - 4.0 / 29.0) / _F_SLOPE)
    xyz = t * _WHITE
    linear = xyz @ _XYZ_TO_RGB.T
    srgb = np.clip(_linear_to_srgb(linear), 0.0, 1.0)
    return RasterImage(srgb, SRGB)


def resize_bilinear(image: RasterImage, height: int, width: int) -> RasterImage:
    """Resample an image to height x width with bilinear interpolation."""
    if height < 2 or width < 2:
        raise ValueError("target size must be at least 2x2")
    rows = np.linspace(0.0, image.height - 1.0, height)
    cols = np.linspace(0.0, image.width - 1.0, width)
    grid = np.meshgrid(rows, cols, indexing="ij")
    resized = np.empty((height, width, image.channels))
    for c in range(image.channels):
        resized[:, :, c] = ndimage.map_coordinates(
            image.channel(c), grid, order=1, mode="nearest"
        )
    return RasterImage(resized, image.color_space)
