"""Pareto-based search: evolve a whole front of (size ratio, 1/PSNR)
trade-offs, measure it with the hypervolume indicator, then pick a single
compromise the way the scalarized methods would."""

from jpegmoo import RunBudget, Weights, hypervolume_2d, pf_select, run_pareto
from jpegmoo.image import textured_image
from jpegmoo.objectives import QTableProblem

img = textured_image(96, 96, 3, seed=6)

result = run_pareto("nsga2", QTableProblem(img), RunBudget(pop_size=20, nfe_max=400, seed=1))

print(f"final front: {len(result.front_points)} distinct trade-offs")
print(f"{'fs_ratio':>12}{'1/psnr':>12}{'psnr(dB)':>10}")
for f1, f2 in sorted(map(tuple, result.front_points)):
    print(f"{f1:>12.5f}{f2:>12.6f}{(1 / f2 if f2 else float('inf')):>10.2f}")

print(f"\nhypervolume reference point: ({result.hv_reference[0]:.4f}, {result.hv_reference[1]:.6f})")
print("hypervolume growth over the run:")
for nfe, hv in result.hv_trace[:: max(1, len(result.hv_trace) // 8)]:
    print(f"  nfe={nfe:>4}  hv={hv:.6f}")

final_hv = hypervolume_2d(result.front_points, result.hv_reference)
print(f"final front hypervolume: {final_hv:.6f}")

weights = Weights(1.0, 1.0)
chosen = pf_select(result.front_points, weights)
f1, f2 = result.front_points[chosen]
print(f"\nequal-weight selection from the front: fs={f1:.5f}, 1/psnr={f2:.6f} "
      f"(combined {f1 + f2:.5f})")
