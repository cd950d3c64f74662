"""Rendering of stimulus geometry to pixel images.

Lines are drawn as hard-edged ink at a supersampled resolution (distance
field against the stroke centerlines), then reduced to the final size by an
exact block average. That reduction is what produces the anti-aliased gray
edge pixels; the whole path is deterministic, so identical inputs give
byte-identical images.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .geometry import Polyline, StimulusGeometry

BACKGROUND_GRAY = 118
WHITE = 255
BLACK = 0


@dataclass
class Canvas:
    """8-bit image. ``data`` is (H, W) for grayscale or (H, W, 3) for RGB."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.dtype != np.uint8:
            raise ValueError("canvas data must be uint8")
        if arr.ndim == 3 and arr.shape[2] == 1:
            arr = arr[:, :, 0]
        if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
            raise ValueError(f"unsupported canvas shape {arr.shape}")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    @classmethod
    def filled(cls, width: int, height: int, value: int, channels: int = 1) -> "Canvas":
        shape = (height, width) if channels == 1 else (height, width, 3)
        return cls(np.full(shape, value, dtype=np.uint8))

    def to_png_bytes(self) -> bytes:
        img = Image.fromarray(self.data, mode="L" if self.channels == 1 else "RGB")
        buf = io.BytesIO()
        img.save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_png_bytes())

    @classmethod
    def from_png_bytes(cls, blob: bytes) -> "Canvas":
        img = Image.open(io.BytesIO(blob))
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB" if img.mode in ("RGBA", "P", "CMYK") else "L")
        return cls(np.asarray(img, dtype=np.uint8))

    @classmethod
    def load_png(cls, path) -> "Canvas":
        with open(path, "rb") as fh:
            return cls.from_png_bytes(fh.read())


@dataclass(frozen=True)
class LineStyle:
    """Stroke appearance in final-image pixels.

    ``black_white_black`` draws three concentric bands of width/3 each; with
    the default 4.5 px total that is 1.5 px black, 1.5 px white, 1.5 px black.
    """

    width: float = 2.5
    color: str = "black"  # "black" | "white" | "black_white_black"
    dashed: bool = False

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("line width must be positive")
        if self.color not in ("black", "white", "black_white_black"):
            raise ValueError(f"unknown line color {self.color!r}")


@dataclass(frozen=True)
class RenderConfig:
    supersample_factor: int = 4
    final_size: int = 256
    margin: int = 0
    background_gray: int = BACKGROUND_GRAY

    def __post_init__(self):
        if self.supersample_factor < 1:
            raise ValueError("supersample_factor must be >= 1")
        if self.margin < 0:
            raise ValueError("margin must be >= 0")


def _distance_field(strokes: list[Polyline], size: int, scale: float, max_dist: float) -> np.ndarray:
    """Min distance from each pixel center to any stroke centerline, exact up
    to ``max_dist`` (farther pixels just hold a value > max_dist)."""
    dist = np.full((size, size), np.inf, dtype=np.float64)
    pad = max_dist + 1.5
    for poly in strokes:
        pts = poly.points * scale
        for a, b in zip(pts[:-1], pts[1:]):
            x0 = max(0, int(math.floor(min(a[0], b[0]) - pad)))
            x1 = min(size, int(math.ceil(max(a[0], b[0]) + pad)) + 1)
            y0 = max(0, int(math.floor(min(a[1], b[1]) - pad)))
            y1 = min(size, int(math.ceil(max(a[1], b[1]) + pad)) + 1)
            if x0 >= x1 or y0 >= y1:
                continue
            ys, xs = np.mgrid[y0:y1, x0:x1]
            px = xs + 0.5 - a[0]
            py = ys + 0.5 - a[1]
            ab = b - a
            denom = float(ab @ ab)
            if denom == 0.0:
                d = np.hypot(px, py)
            else:
                t = np.clip((px * ab[0] + py * ab[1]) / denom, 0.0, 1.0)
                d = np.hypot(px - t * ab[0], py - t * ab[1])
            window = dist[y0:y1, x0:x1]
            np.minimum(window, d, out=window)
    return dist


def _paint_strokes(base: np.ndarray, strokes: list[Polyline], style: LineStyle, scale: float) -> None:
    """Stamp the stroke ink onto ``base`` (a supersampled grayscale array)."""
    half = style.width * scale / 2.0
    size = base.shape[0]
    dist = _distance_field(strokes, size, scale, half)
    if style.color == "black_white_black":
        band = style.width * scale / 3.0
        base[dist <= half] = BLACK
        base[dist <= band / 2.0] = WHITE
    else:
        base[dist <= half] = BLACK if style.color == "black" else WHITE


def _downscale(sup: np.ndarray, factor: int) -> np.ndarray:
    """Exact block average; this is the anti-aliasing step."""
    if factor == 1:
        return sup.astype(np.uint8)
    h, w = sup.shape[0] // factor, sup.shape[1] // factor
    blocks = sup.reshape(h, factor, w, factor).astype(np.float64)
    return np.rint(blocks.mean(axis=(1, 3))).astype(np.uint8)


def add_margin(c: Canvas, margin: int, value: int = WHITE) -> Canvas:
    if margin == 0:
        return c
    if c.channels == 1:
        out = np.full((c.height + 2 * margin, c.width + 2 * margin), value, dtype=np.uint8)
        out[margin:-margin, margin:-margin] = c.data
    else:
        out = np.full((c.height + 2 * margin, c.width + 2 * margin, 3), value, dtype=np.uint8)
        out[margin:-margin, margin:-margin, :] = c.data
    return Canvas(out)


def render(
    g: StimulusGeometry,
    style: LineStyle | None = None,
    cfg: RenderConfig | None = None,
    *,
    on: str = "gray",
) -> Canvas:
    """Render one stimulus to a grayscale canvas.

    ``on`` selects the base the ink is stamped onto: "gray" (the uniform
    118 background, the normal stimulus path) or "white"/"black" (bare line
    drawings meant for :func:`blend_background`).
    """
    style = style or LineStyle()
    cfg = cfg or RenderConfig()
    base_value = {"gray": cfg.background_gray, "white": WHITE, "black": BLACK}[on]
    scale = float(cfg.supersample_factor)
    size = cfg.final_size * cfg.supersample_factor

    sup = np.full((size, size), base_value, dtype=np.uint8)
    strokes = g.main_strokes + [p for f in g.flankers for p in f.polylines]
    _paint_strokes(sup, strokes, style, scale)

    out = Canvas(_downscale(sup, cfg.supersample_factor))
    return add_margin(out, cfg.margin)


def binarize(c: Canvas, threshold: int = 59) -> Canvas:
    """Map every pixel to black (<= threshold) or background gray (otherwise)."""
    if c.channels != 1:
        raise ValueError("binarize expects a grayscale canvas")
    return Canvas(np.where(c.data <= threshold, BLACK, BACKGROUND_GRAY).astype(np.uint8))


def rescale_background(bg: Canvas, contrast: float, gray: int = BACKGROUND_GRAY) -> Canvas:
    """Contrast 0 collapses the image to the uniform gray; contrast 1 keeps it."""
    if not 0.0 <= contrast <= 1.0:
        raise ValueError("contrast must lie in [0, 1]")
    scaled = gray + contrast * (bg.data.astype(np.float64) - gray)
    return Canvas(np.rint(scaled).astype(np.uint8))


def blend_background(c: Canvas, bg: Canvas, contrast: float, *, mode: str = "darker") -> Canvas:
    """Composite a line drawing over a contrast-rescaled background image.

    ``mode="darker"`` keeps the darker value per pixel (black-line drawings,
    rendered on white); ``mode="lighter"`` keeps the lighter value
    (white-line drawings, rendered on black).
    """
    if (bg.height, bg.width) != (c.height, c.width):
        raise ValueError(
            f"background {bg.width}x{bg.height} does not match canvas {c.width}x{c.height}"
        )
    scaled = rescale_background(bg, contrast)
    a, b = c.data, scaled.data
    if a.ndim != b.ndim:
        if a.ndim == 2:
            a = np.repeat(a[:, :, None], 3, axis=2)
        else:
            b = np.repeat(b[:, :, None], 3, axis=2)
    if mode == "darker":
        return Canvas(np.minimum(a, b))
    if mode == "lighter":
        return Canvas(np.maximum(a, b))
    raise ValueError(f"unknown blend mode {mode!r}")


def fit_background(bg: Canvas, size: int) -> Canvas:
    """Center-crop to square then resize, for user-supplied background images."""
    h, w = bg.height, bg.width
    side = min(h, w)
    y0, x0 = (h - side) // 2, (w - side) // 2
    cropped = bg.data[y0 : y0 + side, x0 : x0 + side]
    img = Image.fromarray(cropped)
    return Canvas(np.asarray(img.resize((size, size), Image.BILINEAR), dtype=np.uint8))


def render_stimulus(g: StimulusGeometry, variant_cfg, render_cfg: RenderConfig | None = None) -> Canvas:
    """Variant-aware rendering: style and binarization come from the catalog."""
    style = LineStyle(
        width=variant_cfg.style.width_px,
        color=variant_cfg.style.color,
        dashed=variant_cfg.style.dashed,
    )
    out = render(g, style, render_cfg)
    if variant_cfg.binarize_threshold is not None:
        out = binarize(out, variant_cfg.binarize_threshold)
    return out
