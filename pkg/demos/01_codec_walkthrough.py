"""Walk one image through the baseline codec, stage by stage.

Shows the 8x8 pipeline (level shift -> DCT -> quantize -> zigzag), then the
assembled stream, its markers, and what comes back out of the bitstream
decoder.
"""

import numpy as np

from jpegmoo import annex_k_baseline, decode_jpeg, encode_jpeg, psnr, reconstruct
from jpegmoo.codec import dequantize, forward_dct, inverse_dct, quantize, zigzag
from jpegmoo.image import textured_image

img = textured_image(96, 96, 3, seed=4)
tables = annex_k_baseline()

print("=== one 8x8 block through the pipeline ===")
block = img.samples[:8, :8, 0].astype(np.float64) - 128.0  # level-shifted luma
coeffs = forward_dct(block)
levels = quantize(coeffs, tables.lqt)
print("DC coefficient:", round(coeffs[0, 0], 2), "-> quantized", levels[0, 0])
print("nonzero quantized coefficients:", int(np.count_nonzero(levels)), "of 64")
print("zigzag head:", list(zigzag(levels)[:10]))

approx = inverse_dct(dequantize(levels, tables.lqt))
print("worst in-block error after the round trip:", round(np.abs(approx - block).max(), 2))

print("\n=== the full stream ===")
stream = encode_jpeg(img, tables)
print("markers:", " ".join(stream.markers))
print("stream size:", stream.size_bytes, "bytes vs raw", img.raw_bytes, "bytes")
print(f"compression ratio: {img.raw_bytes / stream.size_bytes:.1f}:1")

recon = reconstruct(img, tables)
print(f"PSNR(original, reconstruction): {psnr(img, recon):.2f} dB")

print("\n=== independent decode of the bytes ===")
decoded = decode_jpeg(stream.data)
print("decoder saw markers:", " ".join(decoded.markers))
print("tables recovered from DQT match:", np.array_equal(decoded.quant_tables[0], tables.lqt))
diff = np.abs(decoded.image.samples.astype(int) - recon.samples.astype(int)).max()
print("max pixel difference decoder vs reconstruct:", diff)
