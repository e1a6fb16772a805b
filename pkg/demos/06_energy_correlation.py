"""Why file size and PSNR stand in for energy use: correlate ingested
energy-profiler measurements against size and quality.

The same table ships as a CSV for the CLI:
    jpegmoo correlate tests/data/energy_levels.csv
"""

import math

from jpegmoo import pearson

# measured energy consumption for one image loaded at several compression
# levels, with the resulting file size (MB) and PSNR (dB)
LEVELS = ["Original", "90", "70", "50", "30", "10"]
EC = [2769.52, 2734.73, 2682.73, 2638.61, 2566.47, 2511.69]
SIZE = [3.07, 1.90, 1.50, 0.98, 0.66, 0.27]
PSNR = [math.inf, 38.6913, 37.5774, 35.1707, 33.0362, 28.3434]

print(f"{'level':>9}{'energy':>10}{'size MB':>9}{'psnr dB':>9}")
for row in zip(LEVELS, EC, SIZE, PSNR):
    print(f"{row[0]:>9}{row[1]:>10.2f}{row[2]:>9.2f}{row[3]:>9.4f}")

print("\npairwise correlations (pairs with infinite PSNR are dropped):")
print(f"  energy   vs size: {pearson(EC, SIZE):.4f}")
print(f"  energy   vs psnr: {pearson(EC, PSNR):.4f}")
print(f"  size     vs psnr: {pearson(SIZE, PSNR):.4f}")
print("\nwithout the uncompressed row:")
print(f"  energy   vs size: {pearson(EC[1:], SIZE[1:]):.4f}")

print(
    "\nall correlations are strongly positive: smaller files cost less energy"
    "\nbut also lose quality, so the two objectives genuinely conflict."
)
