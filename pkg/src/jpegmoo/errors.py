"""Exception types shared across the package."""


class JpegmooError(Exception):
    """Base class for package errors."""


class FormatError(JpegmooError):
    """Malformed or unsupported input file (PPM/PGM/JFIF parsing)."""


class ConfigError(JpegmooError):
    """Invalid experiment configuration."""


class EncodingRangeError(JpegmooError):
    """Coefficient magnitude outside the baseline Huffman category range."""
