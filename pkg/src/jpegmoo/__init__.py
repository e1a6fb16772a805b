"""Multi-objective search for JPEG quantization tables.

A baseline JPEG codec parameterized by arbitrary luminance/chrominance
quantization tables, two conflicting objectives (compressed size ratio and
PSNR), five scalarized metaheuristics, two Pareto-based evolutionary
algorithms, and the statistics to compare them.
"""

from .codec import CodecOptions, JpegStream, QuantTables, decode_jpeg, encode_jpeg, reconstruct
from .experiment import ExperimentConfig, run_experiment
from .image import ImageBuffer, read_ppm, write_ppm
from .metrics import hypervolume_2d, pearson, pf_select, rank_table, wilcoxon_signed_rank
from .objectives import ObjectiveRecord, QTableProblem, Weights, evaluate, fs_obj, psnr, scalarize
from .pareto import ParetoResult, das_dennis, dominates, non_dominated_sort, run_pareto
from .qtable import Bounds, annex_k_baseline, decode, quality_scale, random_population
from .scalar import RunBudget, RunResult, run_scalar

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "CodecOptions",
    "ExperimentConfig",
    "ImageBuffer",
    "JpegStream",
    "ObjectiveRecord",
    "ParetoResult",
    "QTableProblem",
    "QuantTables",
    "RunBudget",
    "RunResult",
    "Weights",
    "annex_k_baseline",
    "das_dennis",
    "decode",
    "decode_jpeg",
    "dominates",
    "encode_jpeg",
    "evaluate",
    "fs_obj",
    "hypervolume_2d",
    "non_dominated_sort",
    "pearson",
    "pf_select",
    "psnr",
    "quality_scale",
    "random_population",
    "rank_table",
    "read_ppm",
    "reconstruct",
    "run_experiment",
    "run_pareto",
    "run_scalar",
    "scalarize",
    "wilcoxon_signed_rank",
    "write_ppm",
]
