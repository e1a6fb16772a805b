"""The two conflicting objectives (size ratio, PSNR) and their scalarization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qtable
from .codec.stream import CodecOptions, JpegStream, PreparedImage, encode_and_reconstruct
from .image import ImageBuffer


@dataclass(frozen=True)
class Weights:
    """Relative importance of the size and quality terms; both nonnegative."""

    w1: float = 1.0
    w2: float = 1.0

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0:
            raise ValueError("weights must be nonnegative")
        if self.w1 == 0 and self.w2 == 0:
            raise ValueError("weights must not both be zero")


@dataclass(frozen=True)
class ObjectiveRecord:
    """One candidate evaluation: size ratio, quality, and their weighted sum."""

    fs_ratio: float
    psnr_db: float
    scalar_value: float

    def objective_pair(self) -> tuple[float, float]:
        """(f1, f2) for Pareto-based search: both minimized, f2 = 1/PSNR."""
        f2 = 0.0 if math.isinf(self.psnr_db) else 1.0 / self.psnr_db
        return (self.fs_ratio, f2)


def fs_obj(stream: JpegStream | int, original_bytes: int) -> float:
    """Compressed-to-original size ratio; lower compresses harder."""
    size = stream if isinstance(stream, int) else stream.size_bytes
    if original_bytes <= 0:
        raise ValueError(f"original size must be positive, got {original_bytes}")
    return size / original_bytes


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """Peak signal-to-noise ratio in dB over all samples of all channels;
    identical images return +inf."""
    if a.samples.shape != b.samples.shape:
        raise ValueError(f"shape mismatch: {a.samples.shape} vs {b.samples.shape}")
    diff = a.samples.astype(np.float64) - b.samples.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 20.0 * math.log10(255.0 / math.sqrt(mse))


def scalarize(fs_ratio: float, psnr_db: float, weights: Weights = Weights()) -> float:
    """w1*fs_ratio + w2/psnr_db, with an infinite PSNR contributing zero."""
    if psnr_db <= 0:
        raise ValueError(f"psnr must be positive or infinite, got {psnr_db}")
    quality_term = 0.0 if math.isinf(psnr_db) else weights.w2 / psnr_db
    return weights.w1 * fs_ratio + quality_term


def _luma_view(img: ImageBuffer) -> ImageBuffer:
    if img.channels == 1:
        return img
    from .codec.transform import color_convert

    y = color_convert(img, "rgb->ycbcr").samples[:, :, :1]
    return ImageBuffer(y)


def evaluate(
    genotype: np.ndarray,
    img: ImageBuffer,
    weights: Weights = Weights(),
    opts: CodecOptions = CodecOptions(),
    original_bytes: int | None = None,
    psnr_mode: str = "all",
) -> ObjectiveRecord:
    """Decode a genotype to tables, compress + reconstruct once, and score it.

    ``original_bytes`` defaults to the raw raster size (width*height*channels),
    making the ratio independent of the source file format; pass the source
    file size to use that convention instead.  ``psnr_mode`` is "all"
    (all channels) or "luma".
    """
    tables = qtable.decode(genotype)
    stream, recon = encode_and_reconstruct(img, tables, opts)
    denom = img.raw_bytes if original_bytes is None else original_bytes
    fs = fs_obj(stream, denom)
    if psnr_mode == "luma":
        quality = psnr(_luma_view(img), _luma_view(recon))
    else:
        quality = psnr(img, recon)
    return ObjectiveRecord(fs, quality, scalarize(fs, quality, weights))


class QTableProblem:
    """Evaluation context binding an image, weights, and codec options.

    ``evaluate`` is a pure function of the genotype (identical to the
    module-level ``evaluate``); the instance caches the table-independent
    forward pipeline and counts calls (one call = one NFE).
    """

    def __init__(
        self,
        img: ImageBuffer,
        weights: Weights = Weights(),
        opts: CodecOptions = CodecOptions(),
        original_bytes: int | None = None,
        psnr_mode: str = "all",
        bounds: qtable.Bounds = qtable.DEFAULT_BOUNDS,
    ):
        self.img = img
        self.weights = weights
        self.opts = opts
        self.original_bytes = original_bytes
        self.psnr_mode = psnr_mode
        self.bounds = bounds
        self.eval_count = 0
        self._prepared = PreparedImage(img, opts)
        reference = img if psnr_mode != "luma" else _luma_view(img)
        self._reference_f = reference.samples.astype(np.float64)

    def evaluate(self, genotype: np.ndarray) -> ObjectiveRecord:
        self.eval_count += 1
        tables = qtable.decode(genotype)
        stream, recon = self._prepared.encode_and_reconstruct(tables)
        denom = self.img.raw_bytes if self.original_bytes is None else self.original_bytes
        fs = fs_obj(stream, denom)
        if self.psnr_mode == "luma":
            recon = _luma_view(recon)
        diff = self._reference_f - recon.samples
        mse = float(np.mean(diff * diff))
        quality = math.inf if mse == 0.0 else 20.0 * math.log10(255.0 / math.sqrt(mse))
        return ObjectiveRecord(fs, quality, scalarize(fs, quality, self.weights))


class FunctionProblem:
    """Adapter exposing a plain scalar function as a problem (surrogate tests)."""

    def __init__(self, fn, bounds: qtable.Bounds = qtable.DEFAULT_BOUNDS):
        self.fn = fn
        self.bounds = bounds
        self.eval_count = 0

    def evaluate(self, genotype: np.ndarray) -> ObjectiveRecord:
        self.eval_count += 1
        value = float(self.fn(np.asarray(genotype, dtype=np.float64)))
        return ObjectiveRecord(math.nan, math.nan, value)


class BiFunctionProblem:
    """Adapter exposing a bi-objective function (f1, f2 both minimized)."""

    def __init__(self, fn, bounds: qtable.Bounds = qtable.DEFAULT_BOUNDS):
        self.fn = fn
        self.bounds = bounds
        self.eval_count = 0

    def evaluate(self, genotype: np.ndarray) -> ObjectiveRecord:
        self.eval_count += 1
        f1, f2 = self.fn(np.asarray(genotype, dtype=np.float64))
        psnr_db = math.inf if f2 == 0 else 1.0 / f2
        return ObjectiveRecord(float(f1), psnr_db, float(f1) + float(f2))
