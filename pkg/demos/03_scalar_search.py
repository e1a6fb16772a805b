"""Scalarized table search: run each metaheuristic on one image and compare
against the fixed-table baseline."""

from jpegmoo import RunBudget, annex_k_baseline, evaluate, run_scalar
from jpegmoo.image import textured_image
from jpegmoo.objectives import QTableProblem
from jpegmoo.qtable import as_genotype

img = textured_image(96, 96, 3, seed=2)
budget = RunBudget(pop_size=20, nfe_max=400, seed=0)

baseline = evaluate(as_genotype(annex_k_baseline()), img)
print(f"baseline: scalar={baseline.scalar_value:.5f} "
      f"(fs={baseline.fs_ratio:.5f}, psnr={baseline.psnr_db:.2f} dB)\n")

print(f"{'algorithm':>10}{'best scalar':>14}{'fs_ratio':>12}{'psnr(dB)':>10}{'vs baseline':>13}")
for alg in ("ga", "de", "pso", "es", "ps"):
    problem = QTableProblem(img)
    result = run_scalar(alg, problem, budget)
    rec = result.best_record
    gain = (baseline.scalar_value - rec.scalar_value) / baseline.scalar_value * 100
    print(f"{alg:>10}{rec.scalar_value:>14.5f}{rec.fs_ratio:>12.5f}{rec.psnr_db:>10.2f}{gain:>12.1f}%")

print("\nconvergence of the genetic algorithm (best-so-far by NFE):")
result = run_scalar("ga", QTableProblem(img), budget)
for point in result.trace[:: max(1, len(result.trace) // 8)]:
    print(f"  nfe={point.nfe:>4}  best={point.best_scalar:.5f}")
