"""JFIF stream assembly and the reconstruction path.

Both objective functions are driven from here: compressed size comes from
``encode_jpeg`` and reconstructed quality from ``reconstruct``.
``PreparedImage`` caches the table-independent forward work (color
conversion, padding, DCT) so that candidate tables can be scored cheaply.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..image import ImageBuffer
from . import huffman
from .transform import (
    color_convert,
    forward_dct_blocks,
    inverse_dct_blocks,
    join_blocks,
    pad_to_multiple,
    quantize,
    round_clamp_u8,
    split_blocks,
    zigzag,
)

SUBSAMPLING_MODES = ("444", "420")


@dataclass(frozen=True)
class QuantTables:
    """Luminance and chrominance quantization tables, entries in [1, 255]."""

    lqt: np.ndarray
    cqt: np.ndarray

    def __post_init__(self):
        for name in ("lqt", "cqt"):
            t = np.asarray(getattr(self, name))
            if t.shape != (8, 8):
                raise ValueError(f"{name} must be 8x8, got {t.shape}")
            t = t.astype(np.int32)
            if t.min() < 1 or t.max() > 255:
                raise ValueError(f"{name} entries must be in [1, 255]")
            object.__setattr__(self, name, t)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuantTables)
            and np.array_equal(self.lqt, other.lqt)
            and np.array_equal(self.cqt, other.cqt)
        )


@dataclass(frozen=True)
class CodecOptions:
    """Encoder knobs; 4:4:4 is the default, 4:2:0 shrinks chroma resolution."""

    subsampling: str = "444"

    def __post_init__(self):
        if self.subsampling not in SUBSAMPLING_MODES:
            raise ValueError(f"subsampling must be one of {SUBSAMPLING_MODES}")


@dataclass(frozen=True)
class JpegStream:
    """Complete baseline JFIF stream plus its ordered marker list."""

    data: bytes
    markers: tuple[str, ...] = field(default=())

    @property
    def size_bytes(self) -> int:
        return len(self.data)


def _segment(marker: int, payload: bytes) -> bytes:
    return bytes([0xFF, marker]) + struct.pack(">H", len(payload) + 2) + payload


def _app0_jfif() -> bytes:
    return _segment(0xE0, b"JFIF\x00" + bytes([1, 1, 0]) + struct.pack(">HH", 1, 1) + bytes([0, 0]))


def _dqt(table_id: int, table: np.ndarray) -> bytes:
    entries = zigzag(table.astype(np.int64)).astype(np.uint8)
    return _segment(0xDB, bytes([table_id]) + entries.tobytes())


def _sof0(height: int, width: int, sampling: list[tuple[int, int]]) -> bytes:
    payload = struct.pack(">BHHB", 8, height, width, len(sampling))
    for i, (h, v) in enumerate(sampling):
        qid = 0 if i == 0 else 1
        payload += bytes([i + 1, (h << 4) | v, qid])
    return _segment(0xC0, payload)


def _dht(table_class: int, table_id: int) -> bytes:
    bits, values = huffman.TABLE_SPECS[(table_class, table_id)]
    payload = bytes([(table_class << 4) | table_id]) + bytes(bits) + bytes(values)
    return _segment(0xC4, payload)


def _sos(ncomp: int) -> bytes:
    payload = bytes([ncomp])
    for i in range(ncomp):
        tid = 0 if i == 0 else 1
        payload += bytes([i + 1, (tid << 4) | tid])
    payload += bytes([0, 63, 0])
    return _segment(0xDA, payload)


def _downsample2(plane: np.ndarray) -> np.ndarray:
    # 2x2 box average; plane dimensions must be even.
    h, w = plane.shape
    mean = plane.astype(np.float64).reshape(h // 2, 2, w // 2, 2).mean(axis=(1, 3))
    return round_clamp_u8(mean)


def _prepare_planes(img: ImageBuffer, opts: CodecOptions) -> list[np.ndarray]:
    """Color-convert, subsample, and edge-pad to block multiples."""
    if img.channels == 3:
        ycc = color_convert(img, "rgb->ycbcr").samples
        planes = [ycc[:, :, 0], ycc[:, :, 1], ycc[:, :, 2]]
        if opts.subsampling == "420":
            y = pad_to_multiple(planes[0], 16)
            cb = pad_to_multiple(_downsample2(pad_to_multiple(planes[1], 2)), 8)
            cr = pad_to_multiple(_downsample2(pad_to_multiple(planes[2], 2)), 8)
            return [y, cb, cr]
        return [pad_to_multiple(p, 8) for p in planes]
    return [pad_to_multiple(img.samples[:, :, 0], 8)]


def _interleave(levels_zz: list[np.ndarray], plane_shapes, subsampling: str):
    """Arrange per-component zigzagged blocks into scan (MCU) order."""
    if len(levels_zz) == 1:
        n = levels_zz[0].shape[0]
        return levels_zz[0], np.zeros(n, np.int64), np.zeros(n, np.int64)
    if subsampling == "420":
        h, w = plane_shapes[0]
        nby, nbx = h // 8, w // 8
        y = levels_zz[0].reshape(nby // 2, 2, nbx // 2, 2, 64)
        y = y.transpose(0, 2, 1, 3, 4).reshape(-1, 4, 64)
        cb = levels_zz[1][:, None, :]
        cr = levels_zz[2][:, None, :]
        stream = np.concatenate([y, cb, cr], axis=1).reshape(-1, 64)
        table_pat = [0, 0, 0, 0, 1, 1]
        pred_pat = [0, 0, 0, 0, 1, 2]
    else:
        stream = np.stack(levels_zz, axis=1).reshape(-1, 64)
        table_pat = [0, 1, 1]
        pred_pat = [0, 1, 2]
    nmcu = stream.shape[0] // len(table_pat)
    table_ids = np.tile(np.array(table_pat, np.int64), nmcu)
    pred_ids = np.tile(np.array(pred_pat, np.int64), nmcu)
    return stream, table_ids, pred_ids


class PreparedImage:
    """Table-independent forward state of one image under fixed options.

    Holds the padded component planes and their DCT coefficient blocks, so
    scoring a candidate table pair costs only quantize + entropy code +
    inverse transform.
    """

    def __init__(self, img: ImageBuffer, opts: CodecOptions = CodecOptions()):
        self.img = img
        self.opts = opts
        self.planes = _prepare_planes(img, opts)
        self.coeffs = [
            forward_dct_blocks(split_blocks(p.astype(np.float64) - 128.0)) for p in self.planes
        ]

    def _comp_tables(self, tables: QuantTables) -> list[np.ndarray]:
        return [tables.lqt] + [tables.cqt] * (len(self.planes) - 1)

    def encode_and_reconstruct(
        self, tables: QuantTables, want_stream: bool = True, want_recon: bool = True
    ) -> tuple[JpegStream | None, ImageBuffer | None]:
        levels = [quantize(c, t) for c, t in zip(self.coeffs, self._comp_tables(tables))]
        stream = self._stream_from_levels(levels, tables) if want_stream else None
        recon = self._recon_from_levels(levels, tables) if want_recon else None
        return stream, recon

    def encode(self, tables: QuantTables) -> JpegStream:
        return self.encode_and_reconstruct(tables, want_recon=False)[0]

    def reconstruct(self, tables: QuantTables) -> ImageBuffer:
        return self.encode_and_reconstruct(tables, want_stream=False)[1]

    def _stream_from_levels(self, levels, tables: QuantTables) -> JpegStream:
        img, opts = self.img, self.opts
        color = img.channels == 3
        scan, table_ids, pred_ids = _interleave(
            [zigzag(lv) for lv in levels], [p.shape for p in self.planes], opts.subsampling
        )
        scan_bytes, _ = huffman.entropy_encode(scan, table_ids, pred_ids)
        sampling = (
            [(2, 2), (1, 1), (1, 1)]
            if (color and opts.subsampling == "420")
            else [(1, 1)] * img.channels
        )
        parts = [b"\xff\xd8", _app0_jfif(), _dqt(0, tables.lqt)]
        markers = ["SOI", "APP0", "DQT"]
        if color:
            parts.append(_dqt(1, tables.cqt))
            markers.append("DQT")
        parts.append(_sof0(img.height, img.width, sampling))
        markers.append("SOF0")
        for tid in (0, 1) if color else (0,):
            for tclass in (0, 1):
                parts.append(_dht(tclass, tid))
                markers.append("DHT")
        parts.append(_sos(img.channels))
        markers.append("SOS")
        parts.append(scan_bytes)
        parts.append(b"\xff\xd9")
        markers.append("EOI")
        return JpegStream(b"".join(parts), tuple(markers))

    def _recon_from_levels(self, levels, tables: QuantTables) -> ImageBuffer:
        img, opts = self.img, self.opts
        color = img.channels == 3
        out_planes = []
        for lv, table, plane in zip(levels, self._comp_tables(tables), self.planes):
            coeffs = lv.astype(np.float64) * table
            spatial = inverse_dct_blocks(coeffs) + 128.0
            pixels = round_clamp_u8(spatial)
            out_planes.append(join_blocks(pixels, *plane.shape))
        if color and opts.subsampling == "420":
            yh, yw = out_planes[0].shape
            out_planes[1] = np.repeat(np.repeat(out_planes[1], 2, 0), 2, 1)[:yh, :yw]
            out_planes[2] = np.repeat(np.repeat(out_planes[2], 2, 0), 2, 1)[:yh, :yw]
        stacked = np.stack([p[: img.height, : img.width] for p in out_planes], axis=-1)
        recon = ImageBuffer(stacked)
        if color:
            recon = color_convert(recon, "ycbcr->rgb")
        return recon


def encode_and_reconstruct(
    img: ImageBuffer,
    tables: QuantTables,
    opts: CodecOptions = CodecOptions(),
    want_stream: bool = True,
    want_recon: bool = True,
) -> tuple[JpegStream | None, ImageBuffer | None]:
    """One-shot form of ``PreparedImage.encode_and_reconstruct``."""
    return PreparedImage(img, opts).encode_and_reconstruct(tables, want_stream, want_recon)


def encode_jpeg(img: ImageBuffer, tables: QuantTables, opts: CodecOptions = CodecOptions()) -> JpegStream:
    """Encode to a complete baseline JFIF stream (deterministic)."""
    return PreparedImage(img, opts).encode(tables)


def reconstruct(img: ImageBuffer, tables: QuantTables, opts: CodecOptions = CodecOptions()) -> ImageBuffer:
    """Image an independent baseline decoder would produce from ``encode_jpeg`` output."""
    return PreparedImage(img, opts).reconstruct(tables)
