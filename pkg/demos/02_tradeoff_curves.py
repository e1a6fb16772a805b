"""The size/quality conflict that motivates the whole search.

Sweeps the conventional quality factor over the standard tables and prints
the resulting rate-distortion table: smaller files always mean lower PSNR.
"""

from jpegmoo import annex_k_baseline, evaluate, quality_scale
from jpegmoo.image import textured_image
from jpegmoo.qtable import as_genotype

img = textured_image(128, 128, 3, seed=8)

print(f"{'quality':>8}{'fs_ratio':>12}{'psnr(dB)':>12}{'scalar':>12}")
rows = []
for q in (10, 30, 50, 70, 90, 100):
    tables = quality_scale(annex_k_baseline(), q)
    rec = evaluate(as_genotype(tables), img)
    rows.append((q, rec))
    print(f"{q:>8}{rec.fs_ratio:>12.5f}{rec.psnr_db:>12.2f}{rec.scalar_value:>12.5f}")

best = min(rows, key=lambda r: r[1].scalar_value)
print(f"\nbest scalar value on this sweep: quality {best[0]} -> {best[1].scalar_value:.5f}")
print("(the optimizers search the 128-dimensional table space directly instead)")
