"""Baseline JPEG codec parameterized by arbitrary quantization tables."""

from .decoder import DecodedJpeg, decode_jpeg
from .huffman import entropy_encode
from .stream import (
    CodecOptions,
    JpegStream,
    QuantTables,
    encode_and_reconstruct,
    encode_jpeg,
    reconstruct,
)
from .transform import (
    color_convert,
    dc_dpcm,
    dequantize,
    forward_dct,
    inverse_dct,
    inverse_zigzag,
    quantize,
    zigzag,
)

__all__ = [
    "CodecOptions",
    "DecodedJpeg",
    "JpegStream",
    "QuantTables",
    "color_convert",
    "dc_dpcm",
    "decode_jpeg",
    "dequantize",
    "encode_and_reconstruct",
    "encode_jpeg",
    "entropy_encode",
    "forward_dct",
    "inverse_dct",
    "inverse_zigzag",
    "quantize",
    "reconstruct",
    "zigzag",
]
