"""Block transforms for the baseline codec: color conversion, 8x8 DCT,
quantization, zigzag scan, DC differencing."""

from __future__ import annotations

import numpy as np

from ..image import ImageBuffer

BLOCK = 8

# Orthonormal DCT-II basis: A[u, x] = c_u/2 * cos((2x+1) u pi / 16),
# c_0 = 1/sqrt(2), c_u = 1 otherwise.  Forward transform of a block f is
# A @ f @ A.T, the double cosine sum regrouped as two matrix products.
_u = np.arange(BLOCK)[:, None]
_x = np.arange(BLOCK)[None, :]
DCT_MATRIX = 0.5 * np.cos((2 * _x + 1) * _u * np.pi / 16.0)
DCT_MATRIX[0, :] *= 1.0 / np.sqrt(2.0)
del _u, _x

# Zigzag scan: SCAN_TO_NATURAL[k] is the flat (row*8+col) index of the k-th
# scanned coefficient; position 0 is DC.
SCAN_TO_NATURAL = np.array(
    [
        0, 1, 8, 16, 9, 2, 3, 10,
        17, 24, 32, 25, 18, 11, 4, 5,
        12, 19, 26, 33, 40, 48, 41, 34,
        27, 20, 13, 6, 7, 14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36,
        29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46,
        53, 60, 61, 54, 47, 55, 62, 63,
    ],
    dtype=np.int64,
)
NATURAL_TO_SCAN = np.argsort(SCAN_TO_NATURAL)


def round_half_away(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer, halves away from zero (np.round would go to even)."""
    x = np.asarray(x)
    return np.trunc(x + np.copysign(0.5, x))


def round_clamp_u8(x: np.ndarray) -> np.ndarray:
    """Round to nearest and clamp to [0, 255] as uint8.

    Equivalent to clip(round_half_away(x), 0, 255): the two roundings only
    disagree at negative halves, which clamp to 0 either way.
    """
    return np.clip(x + 0.5, 0.0, 255.0).astype(np.uint8)


# BT.601 full-range RGB <-> YCbCr.
_RGB_TO_YCC = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168735892, -0.331264108, 0.5],
        [0.5, -0.418687589, -0.081312411],
    ]
)
_YCC_TO_RGB = np.array(
    [
        [1.0, 0.0, 1.402],
        [1.0, -0.344136286, -0.714136286],
        [1.0, 1.772, 0.0],
    ]
)


def color_convert(img: ImageBuffer, direction: str) -> ImageBuffer:
    """Convert between RGB and YCbCr (full-range BT.601), clamped to [0, 255].

    ``direction`` is ``"rgb->ycbcr"`` or ``"ycbcr->rgb"``.
    """
    if img.channels != 3:
        raise ValueError(f"color_convert needs 3 channels, got {img.channels}")
    x = img.samples.astype(np.float64)
    if direction == "rgb->ycbcr":
        out = x @ _RGB_TO_YCC.T
        out[:, :, 1] += 128.0
        out[:, :, 2] += 128.0
    elif direction == "ycbcr->rgb":
        x[:, :, 1] -= 128.0
        x[:, :, 2] -= 128.0
        out = x @ _YCC_TO_RGB.T
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return ImageBuffer(round_clamp_u8(out))


def forward_dct(block: np.ndarray) -> np.ndarray:
    """DCT of one level-shifted 8x8 block (values in [-128, 127])."""
    block = np.asarray(block, dtype=np.float64)
    return DCT_MATRIX @ block @ DCT_MATRIX.T


def inverse_dct(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of ``forward_dct``; returns the level-shifted spatial block."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    return DCT_MATRIX.T @ coeffs @ DCT_MATRIX


def forward_dct_blocks(blocks: np.ndarray) -> np.ndarray:
    """Vectorized forward DCT over an (n, 8, 8) stack."""
    return np.einsum("ux,nxy,vy->nuv", DCT_MATRIX, blocks, DCT_MATRIX, optimize=True)


def inverse_dct_blocks(coeffs: np.ndarray) -> np.ndarray:
    """Vectorized inverse DCT over an (n, 8, 8) stack."""
    return np.einsum("ux,nuv,vy->nxy", DCT_MATRIX, coeffs, DCT_MATRIX, optimize=True)


def _check_table(table: np.ndarray) -> np.ndarray:
    table = np.asarray(table)
    if table.shape[-2:] != (BLOCK, BLOCK):
        raise ValueError(f"quantization table must be 8x8, got {table.shape}")
    if np.any(table < 1) or np.any(table > 255):
        raise ValueError("quantization table entries must be in [1, 255]")
    return table.astype(np.float64)


def quantize(coeffs: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Divide coefficients by step sizes and round half away from zero."""
    q = _check_table(table)
    return round_half_away(np.asarray(coeffs, dtype=np.float64) / q).astype(np.int32)


def dequantize(levels: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Multiply quantized levels back by the step sizes."""
    q = _check_table(table)
    return np.asarray(levels, dtype=np.float64) * q


def zigzag(levels: np.ndarray) -> np.ndarray:
    """Reorder one 8x8 block (or an (n, 8, 8) stack) into the 64-entry scan order."""
    levels = np.asarray(levels)
    flat = levels.reshape(*levels.shape[:-2], 64)
    return flat[..., SCAN_TO_NATURAL]


def inverse_zigzag(seq: np.ndarray) -> np.ndarray:
    """Undo ``zigzag``: 64-entry sequence(s) back to 8x8 block(s)."""
    seq = np.asarray(seq)
    if seq.shape[-1] != 64:
        raise ValueError(f"expected trailing dimension 64, got {seq.shape}")
    return seq[..., NATURAL_TO_SCAN].reshape(*seq.shape[:-1], BLOCK, BLOCK)


def dc_dpcm(dc_current: int, dc_previous: int) -> int:
    """Differential DC value; the first block of a component uses predictor 0."""
    return int(dc_current) - int(dc_previous)


def pad_to_multiple(plane: np.ndarray, multiple: int) -> np.ndarray:
    """Edge-replicate a 2D plane so both dimensions divide ``multiple``."""
    h, w = plane.shape
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph == 0 and pw == 0:
        return plane
    return np.pad(plane, ((0, ph), (0, pw)), mode="edge")


def split_blocks(plane: np.ndarray) -> np.ndarray:
    """Tile a padded 2D plane into (n, 8, 8) blocks in raster order."""
    h, w = plane.shape
    if h % BLOCK or w % BLOCK:
        raise ValueError(f"plane {h}x{w} is not a multiple of {BLOCK}")
    nby, nbx = h // BLOCK, w // BLOCK
    return (
        plane.reshape(nby, BLOCK, nbx, BLOCK).transpose(0, 2, 1, 3).reshape(-1, BLOCK, BLOCK)
    )


def join_blocks(blocks: np.ndarray, height: int, width: int) -> np.ndarray:
    """Inverse of ``split_blocks`` for a padded plane of the given size."""
    nby, nbx = height // BLOCK, width // BLOCK
    return (
        blocks.reshape(nby, nbx, BLOCK, BLOCK).transpose(0, 2, 1, 3).reshape(height, width)
    )
