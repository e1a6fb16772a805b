"""Baseline Huffman entropy coding with the standard typical tables.

Tables are fixed (two DC + two AC); no per-image code optimization.  The scan
encoder is a plain nested loop, JIT-compiled with numba when available.
"""

from __future__ import annotations

import numpy as np

from ..errors import EncodingRangeError

# Typical table specs: (BITS counts per code length 1..16, symbol values).
DC_LUMA_BITS = (0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0)
DC_LUMA_VALUES = tuple(range(12))

DC_CHROMA_BITS = (0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0)
DC_CHROMA_VALUES = tuple(range(12))

AC_LUMA_BITS = (0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7D)
AC_LUMA_VALUES = (
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
    0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xA1, 0x08,
    0x23, 0x42, 0xB1, 0xC1, 0x15, 0x52, 0xD1, 0xF0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0A, 0x16, 0x17, 0x18, 0x19, 0x1A, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2A, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7A, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A, 0xA2, 0xA3,
    0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4, 0xB5, 0xB6,
    0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7, 0xC8, 0xC9,
    0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA, 0xE1, 0xE2,
    0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF1, 0xF2, 0xF3, 0xF4,
    0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
)

AC_CHROMA_BITS = (0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77)
AC_CHROMA_VALUES = (
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41,
    0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
    0xA1, 0xB1, 0xC1, 0x09, 0x23, 0x33, 0x52, 0xF0, 0x15, 0x62, 0x72, 0xD1,
    0x0A, 0x16, 0x24, 0x34, 0xE1, 0x25, 0xF1, 0x17, 0x18, 0x19, 0x1A, 0x26,
    0x27, 0x28, 0x29, 0x2A, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3A, 0x43, 0x44,
    0x45, 0x46, 0x47, 0x48, 0x49, 0x4A, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
    0x59, 0x5A, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6A, 0x73, 0x74,
    0x75, 0x76, 0x77, 0x78, 0x79, 0x7A, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8A, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9A,
    0xA2, 0xA3, 0xA4, 0xA5, 0xA6, 0xA7, 0xA8, 0xA9, 0xAA, 0xB2, 0xB3, 0xB4,
    0xB5, 0xB6, 0xB7, 0xB8, 0xB9, 0xBA, 0xC2, 0xC3, 0xC4, 0xC5, 0xC6, 0xC7,
    0xC8, 0xC9, 0xCA, 0xD2, 0xD3, 0xD4, 0xD5, 0xD6, 0xD7, 0xD8, 0xD9, 0xDA,
    0xE2, 0xE3, 0xE4, 0xE5, 0xE6, 0xE7, 0xE8, 0xE9, 0xEA, 0xF2, 0xF3, 0xF4,
    0xF5, 0xF6, 0xF7, 0xF8, 0xF9, 0xFA,
)

# (table_class, table_id) -> spec; class 0 = DC, 1 = AC; id 0 = luma, 1 = chroma.
TABLE_SPECS = {
    (0, 0): (DC_LUMA_BITS, DC_LUMA_VALUES),
    (1, 0): (AC_LUMA_BITS, AC_LUMA_VALUES),
    (0, 1): (DC_CHROMA_BITS, DC_CHROMA_VALUES),
    (1, 1): (AC_CHROMA_BITS, AC_CHROMA_VALUES),
}


def build_codes(bits, values) -> dict[int, tuple[int, int]]:
    """Canonical code assignment: symbol -> (codeword, bit length)."""
    out = {}
    code = 0
    k = 0
    for length in range(1, 17):
        for _ in range(bits[length - 1]):
            out[values[k]] = (code, length)
            code += 1
            k += 1
        code <<= 1
    return out


def _code_arrays(bits, values, nsymbols) -> tuple[np.ndarray, np.ndarray]:
    codes = np.zeros(nsymbols, dtype=np.int64)
    sizes = np.zeros(nsymbols, dtype=np.int64)
    for sym, (code, length) in build_codes(bits, values).items():
        codes[sym] = code
        sizes[sym] = length
    return codes, sizes

_DC_CODES = np.stack([_code_arrays(*TABLE_SPECS[(0, t)], 12)[0] for t in (0, 1)])
_DC_SIZES = np.stack([_code_arrays(*TABLE_SPECS[(0, t)], 12)[1] for t in (0, 1)])
_AC_CODES = np.stack([_code_arrays(*TABLE_SPECS[(1, t)], 256)[0] for t in (0, 1)])
_AC_SIZES = np.stack([_code_arrays(*TABLE_SPECS[(1, t)], 256)[1] for t in (0, 1)])


def _put_bits(out, pos, bitbuf, bitcnt, code, size):
    # Append `size` low bits of `code`, flushing whole bytes with 0xFF stuffing.
    bitbuf = (bitbuf << size) | (code & ((1 << size) - 1))
    bitcnt += size
    while bitcnt >= 8:
        bitcnt -= 8
        byte = (bitbuf >> bitcnt) & 0xFF
        out[pos] = byte
        pos += 1
        if byte == 0xFF:
            out[pos] = 0
            pos += 1
    return pos, bitbuf & ((1 << bitcnt) - 1), bitcnt


def _magnitude_category(v):
    mag = v if v >= 0 else -v
    cat = 0
    while mag > 0:
        cat += 1
        mag >>= 1
    return cat


def _encode_scan(levels, table_ids, pred_ids, dc_codes, dc_sizes, ac_codes, ac_sizes, out):
    # levels: (nblocks, 64) int32, zigzag order, MCU-interleaved.
    # Returns (bytes written, payload bits before padding); (-1, -1) on range error.
    pos = 0
    bitbuf = 0
    bitcnt = 0
    total_bits = 0
    prev_dc = np.zeros(4, dtype=np.int64)
    for b in range(levels.shape[0]):
        t = table_ids[b]
        p = pred_ids[b]
        dc = np.int64(levels[b, 0])
        diff = dc - prev_dc[p]
        prev_dc[p] = dc
        cat = _magnitude_category(diff)
        if cat > 11:
            return -1, -1
        pos, bitbuf, bitcnt = _put_bits(out, pos, bitbuf, bitcnt, dc_codes[t, cat], dc_sizes[t, cat])
        if cat > 0:
            amp = diff if diff >= 0 else diff + (1 << cat) - 1
            pos, bitbuf, bitcnt = _put_bits(out, pos, bitbuf, bitcnt, amp, cat)
        total_bits += dc_sizes[t, cat] + cat

        run = 0
        for k in range(1, 64):
            v = np.int64(levels[b, k])
            if v == 0:
                run += 1
                continue
            while run >= 16:
                pos, bitbuf, bitcnt = _put_bits(
                    out, pos, bitbuf, bitcnt, ac_codes[t, 0xF0], ac_sizes[t, 0xF0]
                )
                total_bits += ac_sizes[t, 0xF0]
                run -= 16
            cat = _magnitude_category(v)
            if cat > 10:
                return -1, -1
            sym = (run << 4) | cat
            pos, bitbuf, bitcnt = _put_bits(out, pos, bitbuf, bitcnt, ac_codes[t, sym], ac_sizes[t, sym])
            amp = v if v >= 0 else v + (1 << cat) - 1
            pos, bitbuf, bitcnt = _put_bits(out, pos, bitbuf, bitcnt, amp, cat)
            total_bits += ac_sizes[t, sym] + cat
            run = 0
        if run > 0:
            pos, bitbuf, bitcnt = _put_bits(out, pos, bitbuf, bitcnt, ac_codes[t, 0x00], ac_sizes[t, 0x00])
            total_bits += ac_sizes[t, 0x00]
    if bitcnt > 0:
        pad = 8 - bitcnt
        pos, bitbuf, bitcnt = _put_bits(out, pos, bitbuf, bitcnt, (1 << pad) - 1, pad)
    return pos, total_bits


try:  # pragma: no cover - the jitted path is what normally runs
    import numba

    _put_bits = numba.njit(cache=True, nogil=True, inline="always")(_put_bits)
    _magnitude_category = numba.njit(cache=True, nogil=True, inline="always")(_magnitude_category)
    _encode_scan = numba.njit(cache=True, nogil=True)(_encode_scan)
except ImportError:  # pragma: no cover
    pass


def entropy_encode(levels: np.ndarray, table_ids: np.ndarray, pred_ids: np.ndarray) -> tuple[bytes, int]:
    """Huffman-code an MCU-interleaved stream of zigzagged quantized blocks.

    ``levels`` is (nblocks, 64) int32; ``table_ids`` selects the luma (0) or
    chroma (1) table pair per block; ``pred_ids`` selects the DC predictor
    slot per block (one per scan component, reset to 0 at scan start).
    Returns (entropy-coded bytes with 0xFF stuffing and 1-padding, payload
    bit count before padding).
    """
    levels = np.ascontiguousarray(levels, dtype=np.int32)
    if levels.ndim != 2 or levels.shape[1] != 64:
        raise ValueError(f"levels must be (n, 64), got {levels.shape}")
    table_ids = np.ascontiguousarray(table_ids, dtype=np.int64)
    pred_ids = np.ascontiguousarray(pred_ids, dtype=np.int64)
    out = np.empty(levels.shape[0] * 420 + 16, dtype=np.uint8)
    nbytes, nbits = _encode_scan(
        levels, table_ids, pred_ids, _DC_CODES, _DC_SIZES, _AC_CODES, _AC_SIZES, out
    )
    if nbytes < 0:
        raise EncodingRangeError("coefficient magnitude exceeds baseline category range")
    return out[:nbytes].tobytes(), int(nbits)
