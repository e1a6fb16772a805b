"""Command-line interface.

Subcommands: compress, optimize, experiment, pareto-report, stats, correlate.
Exit codes: 0 success, 2 usage, 3 I/O, 4 configuration, 5 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import qtable
from .codec.stream import CodecOptions, encode_jpeg
from .errors import ConfigError, FormatError, JpegmooError
from .experiment import (
    PARETO_ALGORITHMS,
    SCALAR_ALGORITHMS,
    ExperimentConfig,
    _atomic_write,
    _fmt,
    algorithm_config,
    run_experiment,
)
from .image import load_image
from .metrics import hypervolume_2d, pearson, pf_select, rank_table, wilcoxon_signed_rank
from .objectives import QTableProblem, Weights, evaluate
from .pareto import non_dominated_sort, run_pareto
from .scalar import RunBudget, run_scalar


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jpegmoo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="encode one image with fixed tables")
    p.add_argument("image", help="input PPM/PGM file")
    p.add_argument("-o", "--output", help="output JFIF path", default=None)
    p.add_argument("--quality", type=int, default=None, help="scale the standard tables (1-100)")
    p.add_argument("--subsampling", choices=["444", "420"], default="444")

    p = sub.add_parser("optimize", help="run one algorithm on one image")
    p.add_argument("image")
    p.add_argument("--alg", required=True, help="enmoga|enmode|enmopso|enmoes|enmops|ennsgaii|ennsgaiii")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pop", type=int, default=50)
    p.add_argument("--nfe", type=int, default=1000)
    p.add_argument("--w1", type=float, default=1.0)
    p.add_argument("--w2", type=float, default=1.0)
    p.add_argument("--subsampling", choices=["444", "420"], default="444")
    p.add_argument("--psnr-mode", choices=["all", "luma"], default="all")
    p.add_argument("-o", "--output", default=None, help="directory for run artifacts")

    p = sub.add_parser("experiment", help="run a full experiment from a JSON config")
    p.add_argument("config", help="JSON experiment config")
    p.add_argument("--output", default=None, help="override output directory")
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="override master seed")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("pareto-report", help="hypervolume, merged fronts, selected points")
    p.add_argument("results", help="experiment output directory")
    p.add_argument("--w1", type=float, default=1.0)
    p.add_argument("--w2", type=float, default=1.0)

    p = sub.add_parser("stats", help="Wilcoxon tests and ranking over a summary.csv")
    p.add_argument("results", help="experiment output directory (or a summary.csv)")

    p = sub.add_parser("correlate", help="pairwise correlations from a CSV of measurements")
    p.add_argument("table", help="CSV with a label column and numeric columns")
    p.add_argument("-o", "--output", default=None, help="write the matrix as CSV")
    return parser


def _cmd_compress(args) -> int:
    img = load_image(args.image)
    tables = qtable.annex_k_baseline()
    if args.quality is not None:
        tables = qtable.quality_scale(tables, args.quality)
    opts = CodecOptions(subsampling=args.subsampling)
    stream = encode_jpeg(img, tables, opts)
    out = args.output or str(Path(args.image).with_suffix(".jpg"))
    Path(out).write_bytes(stream.data)
    rec = evaluate(qtable.as_genotype(tables), img, Weights(), opts)
    print(f"wrote {out}: {stream.size_bytes} bytes, fs_ratio={rec.fs_ratio:.6f}, psnr={rec.psnr_db:.4f} dB")
    return 0


def _cmd_optimize(args) -> int:
    alg = args.alg.lower()
    img = load_image(args.image)
    weights = Weights(args.w1, args.w2)
    problem = QTableProblem(
        img, weights=weights, opts=CodecOptions(subsampling=args.subsampling), psnr_mode=args.psnr_mode
    )
    budget = RunBudget(args.pop, args.nfe, args.seed)
    if alg in SCALAR_ALGORITHMS:
        result = run_scalar(SCALAR_ALGORITHMS[alg], problem, budget, algorithm_config(alg, None))
        rec = result.best_record
        print(
            f"{alg} seed={args.seed}: scalar={rec.scalar_value:.6f} "
            f"fs_ratio={rec.fs_ratio:.6f} psnr={rec.psnr_db:.4f} dB ({result.evaluations} evaluations)"
        )
        if args.output:
            outdir = Path(args.output)
            outdir.mkdir(parents=True, exist_ok=True)
            payload = {
                "algorithm": alg,
                "seed": args.seed,
                "best": {
                    "fs_ratio": rec.fs_ratio,
                    "psnr_db": rec.psnr_db,
                    "scalar_value": rec.scalar_value,
                },
                "genotype": [float(v) for v in result.best_genotype],
            }
            _atomic_write(outdir / f"optimize_{alg}_{args.seed}.json", json.dumps(payload, indent=1).encode())
    elif alg in PARETO_ALGORITHMS:
        result = run_pareto(PARETO_ALGORITHMS[alg], problem, budget, algorithm_config(alg, None))
        hv = result.hv_trace[-1][1]
        print(
            f"{alg} seed={args.seed}: front size={len(result.front_points)} "
            f"hypervolume={hv:.6f} (ref={result.hv_reference[0]:.4f},{result.hv_reference[1]:.6f}, "
            f"{result.evaluations} evaluations)"
        )
        if args.output:
            outdir = Path(args.output)
            outdir.mkdir(parents=True, exist_ok=True)
            lines = ["f1,f2,genotype_id"]
            for gid, (f1, f2) in enumerate(result.front_points):
                lines.append(f"{_fmt(f1)},{_fmt(f2)},{gid}")
            _atomic_write(outdir / f"front_{alg}_{args.seed}.csv", ("\n".join(lines) + "\n").encode())
            sidecar = {str(g): [float(v) for v in geno] for g, geno in enumerate(result.front_genotypes)}
            _atomic_write(outdir / f"genotypes_{alg}_{args.seed}.json", json.dumps(sidecar).encode())
    else:
        raise ConfigError(f"unknown algorithm {args.alg!r}")
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    overrides = {}
    if args.output is not None:
        overrides["output_dir"] = args.output
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        import dataclasses

        cfg = dataclasses.replace(cfg, **overrides)
    run_experiment(cfg)
    print(f"experiment complete: results in {cfg.output_dir}")
    return 0


def _load_fronts(results: Path) -> dict[str, dict[str, list[np.ndarray]]]:
    fronts: dict[str, dict[str, list[np.ndarray]]] = {}
    for image_dir in sorted(p for p in results.iterdir() if p.is_dir()):
        for alg in sorted(PARETO_ALGORITHMS):
            alg_dir = image_dir / alg
            if not alg_dir.is_dir():
                continue
            runs = []
            for front_file in sorted(alg_dir.glob("front_*.csv")):
                rows = front_file.read_text().strip().splitlines()[1:]
                pts = np.array([[float(v) for v in r.split(",")[:2]] for r in rows])
                runs.append(pts)
            if runs:
                fronts.setdefault(image_dir.name, {})[alg] = runs
    return fronts


def _cmd_pareto_report(args) -> int:
    results = Path(args.results)
    if not results.is_dir():
        raise FormatError(f"{results} is not a directory")
    fronts = _load_fronts(results)
    if not fronts:
        raise ConfigError(f"no Pareto fronts found under {results}")
    weights = Weights(args.w1, args.w2)
    hv_lines = ["image,algorithm,mean,std,rank,ref_f1,ref_f2"]
    pf_lines = ["image,algorithm,mean_selected_value"]
    print(f"{'image':<16}{'algorithm':<12}{'HV mean':>12}{'HV std':>12}{'selected':>12}")
    for image, by_alg in fronts.items():
        allpts = np.concatenate([p for runs in by_alg.values() for p in runs])
        hi = allpts.max(axis=0)
        ref = tuple(h * 1.05 if h * 1.05 > h else h + 1.0 for h in hi)
        stats_rows = []
        for alg, runs in by_alg.items():
            hvs = np.array([hypervolume_2d(p, ref) for p in runs])
            sel = np.array(
                [weights.w1 * p[i, 0] + weights.w2 * p[i, 1] for p in runs for i in [pf_select(p, weights)]]
            )
            stats_rows.append((alg, float(hvs.mean()), float(hvs.std(ddof=1)) if len(hvs) > 1 else 0.0, float(sel.mean())))
        from scipy.stats import rankdata

        ranks = rankdata([-r[1] for r in stats_rows], method="average")
        for (alg, mean, std, sel), rank in zip(stats_rows, ranks):
            rank_txt = str(int(rank)) if float(rank).is_integer() else _fmt(rank)
            hv_lines.append(
                f"{image},{alg},{_fmt(mean)},{_fmt(std)},{rank_txt},{_fmt(ref[0])},{_fmt(ref[1])}"
            )
            pf_lines.append(f"{image},{alg},{_fmt(sel)}")
            print(f"{image:<16}{alg:<12}{mean:>12.6f}{std:>12.6f}{sel:>12.6f}")
        merged = np.concatenate([p for runs in by_alg.values() for p in runs])
        assignment = non_dominated_sort(merged)
        front = merged[assignment.fronts[0]]
        front = front[np.lexsort((front[:, 1], front[:, 0]))]
        lines = ["f1,f2"] + [f"{_fmt(a)},{_fmt(b)}" for a, b in front]
        _atomic_write(results / f"merged_front_{image}.csv", ("\n".join(lines) + "\n").encode())
    _atomic_write(results / "hv_report.csv", ("\n".join(hv_lines) + "\n").encode())
    _atomic_write(results / "pf_selected.csv", ("\n".join(pf_lines) + "\n").encode())
    return 0


def _read_summary(path: Path) -> tuple[list[str], list[str], np.ndarray]:
    with open(path) as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise FormatError(f"{path} is empty")
    images = list(dict.fromkeys(r["image"] for r in rows))
    algs = list(dict.fromkeys(r["algorithm"] for r in rows))
    means = np.full((len(images), len(algs)), np.nan)
    for r in rows:
        means[images.index(r["image"]), algs.index(r["algorithm"])] = float(r["mean"])
    if np.isnan(means).any():
        raise FormatError(f"{path} has missing (image, algorithm) entries")
    return images, algs, means


def _cmd_stats(args) -> int:
    path = Path(args.results)
    summary = path if path.suffix == ".csv" else path / "summary.csv"
    if not summary.exists():
        raise FormatError(f"summary file {summary} not found")
    images, algs, means = _read_summary(summary)
    table = rank_table(means, images, algs)

    outdir = summary.parent
    lines = ["algorithm,average_rank,overall_rank"]
    print(f"{'algorithm':<12}{'avg rank':>10}{'overall':>9}")
    for j, alg in enumerate(algs):
        lines.append(f"{alg},{_fmt(table.average_rank[j])},{_fmt(table.overall_rank[j])}")
        print(f"{alg:<12}{table.average_rank[j]:>10.2f}{table.overall_rank[j]:>9.1f}")
    _atomic_write(outdir / "ranks.csv", ("\n".join(lines) + "\n").encode())

    lines = ["algorithm_a,algorithm_b,statistic,p_value,n,verdict_at_5pct"]
    print(f"\n{'pair':<28}{'W':>7}{'p':>10}  verdict")
    for i in range(len(algs)):
        for j in range(i + 1, len(algs)):
            res = wilcoxon_signed_rank(means[:, i], means[:, j])
            if res.pvalue < 0.05:
                verdict = f"{algs[i]} better" if means[:, i].mean() < means[:, j].mean() else f"{algs[j]} better"
            else:
                verdict = "similar"
            lines.append(f"{algs[i]},{algs[j]},{_fmt(res.statistic)},{_fmt(res.pvalue)},{res.n},{verdict}")
            print(f"{algs[i] + ' vs ' + algs[j]:<28}{res.statistic:>7.1f}{res.pvalue:>10.4f}  {verdict}")
    _atomic_write(outdir / "wilcoxon.csv", ("\n".join(lines) + "\n").encode())
    return 0


def _parse_measurement_csv(path: Path):
    with open(path) as f:
        rows = list(csv.reader(f))
    if len(rows) < 3:
        raise FormatError(f"{path}: need a header and at least 2 data rows")
    header = [h.strip() for h in rows[0]]
    columns: dict[str, list] = {h: [] for h in header}
    for row in rows[1:]:
        if not row:
            continue
        for h, tok in zip(header, row):
            columns[h].append(tok.strip())
    numeric = {}
    labels = {}
    for h, vals in columns.items():
        try:
            numeric[h] = np.array([float(v) for v in vals])
        except ValueError:
            labels[h] = vals
    if len(numeric) < 2:
        raise FormatError(f"{path}: need at least two numeric columns")
    original_mask = np.zeros(len(rows) - 1, dtype=bool)
    for vals in labels.values():
        original_mask |= np.array([v.lower() == "original" for v in vals])
    return numeric, original_mask


def _cmd_correlate(args) -> int:
    numeric, original_mask = _parse_measurement_csv(Path(args.table))
    names = list(numeric)
    out_lines = ["variant,column_a,column_b,pearson"]
    variants = [("all_rows", np.ones(len(original_mask), dtype=bool))]
    if original_mask.any():
        variants.append(("without_original", ~original_mask))
    for variant, mask in variants:
        print(f"[{variant}]")
        width = max(len(n) for n in names) + 2
        print(" " * width + "".join(f"{n:>{width}}" for n in names))
        for a in names:
            cells = []
            for b in names:
                if a == b:
                    cells.append(f"{'1':>{width}}")
                    continue
                try:
                    r = pearson(numeric[a][mask], numeric[b][mask])
                    cells.append(f"{r:>{width}.4f}")
                    out_lines.append(f"{variant},{a},{b},{_fmt(r)}")
                except ValueError:
                    cells.append(f"{'nan':>{width}}")
                    out_lines.append(f"{variant},{a},{b},nan")
            print(f"{a:>{width}}" + "".join(cells))
        print()
    if args.output:
        _atomic_write(Path(args.output), ("\n".join(out_lines) + "\n").encode())
    return 0


_COMMANDS = {
    "compress": _cmd_compress,
    "optimize": _cmd_optimize,
    "experiment": _cmd_experiment,
    "pareto-report": _cmd_pareto_report,
    "stats": _cmd_stats,
    "correlate": _cmd_correlate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except JpegmooError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
