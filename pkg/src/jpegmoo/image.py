"""8-bit raster images: in-memory buffer, binary PPM/PGM I/O, synthetic test images."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import FormatError


@dataclass(frozen=True)
class ImageBuffer:
    """Decoded raster with 8-bit samples and 1 (gray) or 3 (RGB) channels.

    ``samples`` has shape (height, width, channels), dtype uint8.
    """

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 3 or s.shape[2] not in (1, 3):
            raise ValueError(f"samples must be (h, w, 1|3), got shape {s.shape}")
        if s.dtype != np.uint8:
            raise ValueError(f"samples must be uint8, got {s.dtype}")
        object.__setattr__(self, "samples", s)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def channels(self) -> int:
        return self.samples.shape[2]

    @property
    def raw_bytes(self) -> int:
        """Uncompressed size in bytes: width * height * channels."""
        return self.samples.size

    def __eq__(self, other) -> bool:
        return isinstance(other, ImageBuffer) and np.array_equal(self.samples, other.samples)


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skips whitespace and '#' comment lines, returns (token, next position).
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= n:
        raise FormatError(f"unexpected end of header at byte {pos}")
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def decode_ppm(data: bytes) -> ImageBuffer:
    """Decode binary PPM (P6) or PGM (P5) bytes with maxval 255."""
    magic, pos = _read_token(data, 0)
    if magic == b"P6":
        channels = 3
    elif magic == b"P5":
        channels = 1
    else:
        raise FormatError(f"bad magic {magic!r} at byte 0 (want P5 or P6)")
    fields = []
    for _ in range(3):
        tok, pos = _read_token(data, pos)
        if not tok.isdigit():
            raise FormatError(f"non-numeric header field {tok!r} at byte {pos - len(tok)}")
        fields.append(int(tok))
    width, height, maxval = fields
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} at byte {pos} (only 255)")
    if width < 1 or height < 1:
        raise FormatError(f"bad dimensions {width}x{height}")
    pos += 1  # single whitespace byte after maxval
    need = width * height * channels
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise FormatError(
            f"truncated payload at byte {pos + len(payload)}: "
            f"need {need} sample bytes, got {len(payload)}"
        )
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return ImageBuffer(samples.copy())


def encode_ppm(img: ImageBuffer) -> bytes:
    """Encode an ImageBuffer as binary PPM (3 channels) or PGM (1 channel)."""
    magic = b"P6" if img.channels == 3 else b"P5"
    header = b"%s\n%d %d\n255\n" % (magic, img.width, img.height)
    return header + img.samples.tobytes()


def read_ppm(path) -> ImageBuffer:
    with open(path, "rb") as f:
        return decode_ppm(f.read())


def write_ppm(path, img: ImageBuffer) -> None:
    with open(path, "wb") as f:
        f.write(encode_ppm(img))


def load_image(path) -> ImageBuffer:
    """Read a PPM/PGM file, reporting the path in errors."""
    try:
        return read_ppm(path)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Synthetic images (benchmark images are user-supplied; these keep the test
# suite and demos self-contained).


def _to_u8(arr: np.ndarray) -> np.ndarray:
    lo, hi = float(arr.min()), float(arr.max())
    if hi - lo < 1e-12:
        return np.full(arr.shape, 128, dtype=np.uint8)
    out = (arr - lo) / (hi - lo) * 255.0
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def gradient_image(width: int, height: int, channels: int = 3) -> ImageBuffer:
    """Smooth diagonal ramp; compresses almost losslessly."""
    y, x = np.mgrid[0:height, 0:width]
    base = x / max(width - 1, 1) + y / max(height - 1, 1)
    planes = []
    for c in range(channels):
        planes.append(_to_u8(np.roll(base, c * width // 8, axis=1)))
    return ImageBuffer(np.stack(planes, axis=-1))


def checkerboard_image(width: int, height: int, cell: int = 8, channels: int = 3) -> ImageBuffer:
    y, x = np.mgrid[0:height, 0:width]
    board = (((x // cell) + (y // cell)) % 2) * 255
    out = np.repeat(board.astype(np.uint8)[:, :, None], channels, axis=2)
    return ImageBuffer(out)


def noise_image(width: int, height: int, channels: int = 3, seed: int = 0) -> ImageBuffer:
    rng = np.random.default_rng(seed)
    return ImageBuffer(rng.integers(0, 256, size=(height, width, channels), dtype=np.uint8))


def smooth_image(width: int, height: int, channels: int = 3, seed: int = 0, blur: float = 6.0) -> ImageBuffer:
    """Low-pass filtered noise: a stand-in for photographic content."""
    rng = np.random.default_rng(seed)
    planes = []
    for _ in range(channels):
        field = gaussian_filter(rng.standard_normal((height, width)), blur, mode="reflect")
        planes.append(_to_u8(field))
    return ImageBuffer(np.stack(planes, axis=-1))


def textured_image(width: int, height: int, channels: int = 3, seed: int = 0) -> ImageBuffer:
    """Smooth field plus fine detail: mid-complexity content."""
    rng = np.random.default_rng(seed)
    planes = []
    for _ in range(channels):
        coarse = gaussian_filter(rng.standard_normal((height, width)), 8.0, mode="reflect")
        fine = gaussian_filter(rng.standard_normal((height, width)), 1.2, mode="reflect")
        planes.append(_to_u8(coarse + 0.35 * fine))
    return ImageBuffer(np.stack(planes, axis=-1))


_KINDS = ("smooth", "textured", "gradient", "checkerboard", "noise")


def synthetic_image(kind: str, width: int, height: int, channels: int = 3, seed: int = 0) -> ImageBuffer:
    """Build one synthetic image by kind name (see ``synthetic_suite``)."""
    if kind == "smooth":
        return smooth_image(width, height, channels, seed)
    if kind == "textured":
        return textured_image(width, height, channels, seed)
    if kind == "gradient":
        return gradient_image(width, height, channels)
    if kind == "checkerboard":
        return checkerboard_image(width, height, cell=4 + (seed % 3) * 4, channels=channels)
    if kind == "noise":
        return noise_image(width, height, channels, seed)
    raise ValueError(f"unknown synthetic image kind {kind!r}; options: {_KINDS}")


def synthetic_suite(count: int, width: int = 64, height: int = 64) -> list[tuple[str, ImageBuffer]]:
    """Deterministic list of (name, image) pairs cycling through kinds,
    alternating color and grayscale, with varying non-multiple-of-8 sizes."""
    out = []
    for i in range(count):
        kind = _KINDS[i % len(_KINDS)]
        channels = 3 if i % 2 == 0 else 1
        w = width + (i % 3) * 5  # exercise edge padding
        h = height + (i % 2) * 3
        out.append((f"{kind}_{i}", synthetic_image(kind, w, h, channels, seed=i)))
    return out
