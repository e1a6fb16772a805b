"""Self-check decoder: parses baseline JFIF streams back to pixels.

Consumes only the byte stream (tables and dimensions are read from the
headers), so it validates the encoder end to end.  Scope is the baseline
sequential subset this package emits, not arbitrary third-party files.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import FormatError
from ..image import ImageBuffer
from .transform import color_convert, inverse_dct_blocks, inverse_zigzag, join_blocks, round_clamp_u8


@dataclass
class DecodedJpeg:
    image: ImageBuffer
    quant_tables: dict[int, np.ndarray]  # table id -> 8x8 natural order
    levels: list[np.ndarray]  # per component, (nblocks, 64) zigzag order
    markers: list[str]


class _BitReader:
    """MSB-first reader over entropy-coded data with 0xFF00 unstuffing."""

    def __init__(self, data: bytes, pos: int):
        self.data = data
        self.pos = pos
        self.cur = 0
        self.nbits = 0

    def _load_byte(self) -> None:
        if self.pos >= len(self.data):
            raise FormatError(f"entropy data ran out at byte {self.pos}")
        byte = self.data[self.pos]
        self.pos += 1
        if byte == 0xFF:
            if self.pos >= len(self.data):
                raise FormatError("dangling 0xFF at end of scan")
            marker = self.data[self.pos]
            if marker != 0x00:
                raise FormatError(f"unexpected marker 0xFF{marker:02X} inside scan")
            self.pos += 1
        self.cur = (self.cur << 8) | byte
        self.nbits += 8

    def read_bit(self) -> int:
        if self.nbits == 0:
            self._load_byte()
        self.nbits -= 1
        return (self.cur >> self.nbits) & 1

    def read_bits(self, n: int) -> int:
        v = 0
        for _ in range(n):
            v = (v << 1) | self.read_bit()
        return v

    def align(self) -> int:
        """Discard padding bits; return position of the next marker byte."""
        self.cur = 0
        self.nbits = 0
        return self.pos


def _decode_huffman(reader: _BitReader, table: dict[tuple[int, int], int]) -> int:
    code = 0
    for length in range(1, 17):
        code = (code << 1) | reader.read_bit()
        sym = table.get((length, code))
        if sym is not None:
            return sym
    raise FormatError("invalid Huffman code in scan data")


def _extend(value: int, cat: int) -> int:
    if cat == 0:
        return 0
    if value < (1 << (cat - 1)):
        value -= (1 << cat) - 1
    return value


def _parse_dht(payload: bytes) -> dict[tuple[int, int], dict[tuple[int, int], int]]:
    tables = {}
    pos = 0
    while pos < len(payload):
        tc_th = payload[pos]
        tclass, tid = tc_th >> 4, tc_th & 0x0F
        bits = payload[pos + 1 : pos + 17]
        nvals = sum(bits)
        values = payload[pos + 17 : pos + 17 + nvals]
        if len(values) < nvals:
            raise FormatError("truncated DHT segment")
        lookup = {}
        code = 0
        k = 0
        for length in range(1, 17):
            for _ in range(bits[length - 1]):
                lookup[(length, code)] = values[k]
                code += 1
                k += 1
            code <<= 1
        tables[(tclass, tid)] = lookup
        pos += 17 + nvals
    return tables


def decode_jpeg(data: bytes) -> DecodedJpeg:
    """Decode a baseline JFIF byte stream produced by this package."""
    if data[:2] != b"\xff\xd8":
        raise FormatError("stream does not start with SOI")
    markers = ["SOI"]
    pos = 2
    qtables: dict[int, np.ndarray] = {}
    huff: dict[tuple[int, int], dict] = {}
    sof = None
    scan_components = None

    while pos < len(data):
        if data[pos] != 0xFF:
            raise FormatError(f"expected marker at byte {pos}, got 0x{data[pos]:02X}")
        marker = data[pos + 1]
        pos += 2
        if marker == 0xD9:
            markers.append("EOI")
            break
        (length,) = struct.unpack(">H", data[pos : pos + 2])
        payload = data[pos + 2 : pos + length]
        if len(payload) != length - 2:
            raise FormatError(f"truncated segment 0x{marker:02X} at byte {pos}")
        pos += length
        if 0xE0 <= marker <= 0xEF:
            markers.append(f"APP{marker - 0xE0}")
        elif marker == 0xDB:
            markers.append("DQT")
            p = 0
            while p < len(payload):
                pq_tq = payload[p]
                if pq_tq >> 4 != 0:
                    raise FormatError("only 8-bit quantization tables supported")
                entries = np.frombuffer(payload[p + 1 : p + 65], dtype=np.uint8)
                qtables[pq_tq & 0x0F] = inverse_zigzag(entries.astype(np.int32))
                p += 65
        elif marker == 0xC4:
            markers.append("DHT")
            huff.update(_parse_dht(payload))
        elif marker == 0xC0:
            markers.append("SOF0")
            precision, height, width, ncomp = struct.unpack(">BHHB", payload[:6])
            if precision != 8:
                raise FormatError("only 8-bit precision supported")
            comps = []
            for i in range(ncomp):
                cid, hv, tq = payload[6 + 3 * i : 9 + 3 * i]
                comps.append({"id": cid, "h": hv >> 4, "v": hv & 0x0F, "tq": tq})
            sof = {"height": height, "width": width, "components": comps}
        elif marker in (0xC1, 0xC2, 0xC3, 0xC5, 0xC6, 0xC7):
            raise FormatError(f"non-baseline frame marker 0xFF{marker:02X}")
        elif marker == 0xDA:
            markers.append("SOS")
            if sof is None:
                raise FormatError("SOS before SOF0")
            ns = payload[0]
            scan_components = []
            for i in range(ns):
                cs, tables_byte = payload[1 + 2 * i : 3 + 2 * i]
                scan_components.append({"id": cs, "dc": tables_byte >> 4, "ac": tables_byte & 0x0F})
            pos, levels = _decode_scan(data, pos, sof, scan_components, huff)
        else:
            markers.append(f"0x{marker:02X}")
    else:
        raise FormatError("stream has no EOI")
    if scan_components is None:
        raise FormatError("stream has no scan")

    image = _render(sof, levels, qtables)
    return DecodedJpeg(image=image, quant_tables=qtables, levels=levels, markers=markers)


def _decode_scan(data, pos, sof, scan_components, huff):
    comps = sof["components"]
    hmax = max(c["h"] for c in comps)
    vmax = max(c["v"] for c in comps)
    mcu_cols = -(-sof["width"] // (8 * hmax))
    mcu_rows = -(-sof["height"] // (8 * vmax))
    reader = _BitReader(data, pos)
    order = []
    for sc in scan_components:
        comp = next(c for c in comps if c["id"] == sc["id"])
        order.append((comp, sc))

    block_grids = []
    for comp, _ in order:
        block_grids.append(
            np.zeros((mcu_rows * comp["v"], mcu_cols * comp["h"], 64), dtype=np.int32)
        )
    pred = [0] * len(order)
    for my in range(mcu_rows):
        for mx in range(mcu_cols):
            for ci, (comp, sc) in enumerate(order):
                for by in range(comp["v"]):
                    for bx in range(comp["h"]):
                        block = _decode_block(reader, huff[(0, sc["dc"])], huff[(1, sc["ac"])])
                        block[0] += pred[ci]
                        pred[ci] = block[0]
                        block_grids[ci][my * comp["v"] + by, mx * comp["h"] + bx] = block
    pos = reader.align()
    levels = [g.reshape(-1, 64) for g in block_grids]
    return pos, levels


def _decode_block(reader, dc_table, ac_table):
    block = np.zeros(64, dtype=np.int32)
    cat = _decode_huffman(reader, dc_table)
    block[0] = _extend(reader.read_bits(cat), cat)
    k = 1
    while k < 64:
        sym = _decode_huffman(reader, ac_table)
        if sym == 0x00:  # EOB
            break
        if sym == 0xF0:  # ZRL
            k += 16
            continue
        run, cat = sym >> 4, sym & 0x0F
        k += run
        if k > 63:
            raise FormatError("AC run exceeds block length")
        block[k] = _extend(reader.read_bits(cat), cat)
        k += 1
    return block


def _render(sof, levels, qtables) -> ImageBuffer:
    comps = sof["components"]
    hmax = max(c["h"] for c in comps)
    vmax = max(c["v"] for c in comps)
    planes = []
    for comp, lv in zip(comps, levels):
        table = qtables[comp["tq"]]
        mcu_cols = -(-sof["width"] // (8 * hmax))
        mcu_rows = -(-sof["height"] // (8 * vmax))
        nby, nbx = mcu_rows * comp["v"], mcu_cols * comp["h"]
        coeffs = inverse_zigzag(lv).astype(np.float64) * table
        spatial = inverse_dct_blocks(coeffs) + 128.0
        pixels = round_clamp_u8(spatial)
        plane = join_blocks(pixels, nby * 8, nbx * 8)
        ry, rx = vmax // comp["v"], hmax // comp["h"]
        if ry > 1 or rx > 1:
            plane = np.repeat(np.repeat(plane, ry, 0), rx, 1)
        planes.append(plane[: sof["height"], : sof["width"]])
    image = ImageBuffer(np.stack(planes, axis=-1))
    if len(planes) == 3:
        image = color_convert(image, "ycbcr->rgb")
    return image
