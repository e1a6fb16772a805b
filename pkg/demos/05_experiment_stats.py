"""A miniature end-to-end study: multiple images, algorithms, and seeds,
followed by the ranking table and pairwise significance tests.

The CLI runs the same pipeline from a JSON config:
    jpegmoo experiment config.json
    jpegmoo stats results/
    jpegmoo pareto-report results/
"""

import tempfile
from pathlib import Path

import numpy as np

from jpegmoo import ExperimentConfig, rank_table, run_experiment, wilcoxon_signed_rank
from jpegmoo.image import smooth_image, textured_image, write_ppm

workdir = Path(tempfile.mkdtemp(prefix="jpegmoo_demo_"))
write_ppm(workdir / "textured.ppm", textured_image(64, 64, 3, seed=1))
write_ppm(workdir / "smooth.pgm", smooth_image(64, 64, 1, seed=2))

config = ExperimentConfig(
    images=[str(workdir / "textured.ppm"), str(workdir / "smooth.pgm")],
    algorithms=["baseline", "enmoga", "enmops", "enmode"],
    runs=3,
    pop_size=10,
    nfe_max=150,
    master_seed=0,
    output_dir=str(workdir / "results"),
    workers=1,
)
summary = run_experiment(config)
print("result tree written to", config.output_dir)

algorithms = ["baseline", "enmoga", "enmops", "enmode"]
images = list(summary["scalar"])
means = np.array(
    [
        [summary["baseline"][img]] + [np.mean(summary["scalar"][img][a]) for a in algorithms[1:]]
        for img in images
    ]
)
table = rank_table(means, images, algorithms)
print("\nmean scalar objective (rows = images):")
print(f"{'image':<12}" + "".join(f"{a:>10}" for a in algorithms))
for i, img in enumerate(images):
    print(f"{img:<12}" + "".join(f"{v:>10.5f}" for v in means[i]))
print(f"{'avg rank':<12}" + "".join(f"{r:>10.2f}" for r in table.average_rank))

print("\npairwise signed-rank tests on per-image means:")
for i in range(len(algorithms)):
    for j in range(i + 1, len(algorithms)):
        res = wilcoxon_signed_rank(means[:, i], means[:, j])
        print(f"  {algorithms[i]:>8} vs {algorithms[j]:<8} W={res.statistic:.1f} p={res.pvalue:.4f}")
print("(two images only, so p-values here are illustrative, not conclusive)")
