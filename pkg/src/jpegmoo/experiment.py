"""Experiment orchestration: config parsing, multi-run dispatch, result tree.

Outputs are deterministic functions of (config, master seed): per-run seeds
are ``master_seed + run_index``, floats are serialized with shortest-repr
formatting, and files are written atomically (temp + rename).
"""

from __future__ import annotations

import dataclasses
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from . import qtable
from .codec.stream import CodecOptions
from .errors import ConfigError
from .image import ImageBuffer, load_image
from .metrics import hypervolume_2d
from .objectives import QTableProblem, Weights, evaluate
from .pareto import run_pareto
from .scalar import (
    DeConfig,
    EsConfig,
    GaConfig,
    PsConfig,
    PsoConfig,
    RunBudget,
    run_scalar,
)

SCALAR_ALGORITHMS = {
    "enmoga": "ga",
    "enmode": "de",
    "enmopso": "pso",
    "enmoes": "es",
    "enmops": "ps",
}
PARETO_ALGORITHMS = {"ennsgaii": "nsga2", "ennsgaiii": "nsga3"}
ALL_ALGORITHMS = ("baseline",) + tuple(SCALAR_ALGORITHMS) + tuple(PARETO_ALGORITHMS)

_CONFIG_TYPES = {
    "enmoga": GaConfig,
    "enmode": DeConfig,
    "enmopso": PsoConfig,
    "enmoes": EsConfig,
    "enmops": PsConfig,
    "ennsgaii": GaConfig,
    "ennsgaiii": GaConfig,
}


@dataclass
class ExperimentConfig:
    images: list[str]
    algorithms: list[str]
    runs: int = 30
    pop_size: int = 50
    nfe_max: int = 1000
    weights: Weights = field(default_factory=Weights)
    master_seed: int = 0
    output_dir: str = "results"
    subsampling: str = "444"
    psnr_mode: str = "all"
    fs_denominator: str = "raw"  # "raw" raster bytes or "file" source size
    workers: int | None = None
    algo_params: dict = field(default_factory=dict)
    nsga3_divisions: int | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if not self.images:
            raise ConfigError("no images configured")
        if not self.algorithms:
            raise ConfigError("no algorithms configured")
        self.algorithms = [a.lower() for a in self.algorithms]
        for alg in self.algorithms:
            if alg not in ALL_ALGORITHMS:
                raise ConfigError(f"unknown algorithm {alg!r}; options: {ALL_ALGORITHMS}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ConfigError("duplicate algorithm entries")
        if self.subsampling not in ("444", "420"):
            raise ConfigError(f"subsampling must be 444 or 420, got {self.subsampling}")
        if self.psnr_mode not in ("all", "luma"):
            raise ConfigError(f"psnr_mode must be all or luma, got {self.psnr_mode}")
        if self.fs_denominator not in ("raw", "file"):
            raise ConfigError(f"fs_denominator must be raw or file, got {self.fs_denominator}")
        names = [Path(p).stem for p in self.images]
        if len(set(names)) != len(names):
            raise ConfigError("image file names must be unique (ignoring directories)")
        for alg in self.algo_params:
            if alg.lower() not in _CONFIG_TYPES:
                raise ConfigError(f"algo_params for unknown algorithm {alg!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        data = dict(raw)
        budget = data.pop("budget", {})
        weights = data.pop("weights", {})
        kwargs = {
            "images": data.pop("images", []),
            "algorithms": data.pop("algorithms", []),
            "pop_size": int(budget.get("pop_size", 50)),
            "nfe_max": int(budget.get("nfe_max", 1000)),
            "weights": Weights(float(weights.get("w1", 1.0)), float(weights.get("w2", 1.0))),
        }
        for key in (
            "runs",
            "master_seed",
            "output_dir",
            "subsampling",
            "psnr_mode",
            "fs_denominator",
            "workers",
            "algo_params",
            "nsga3_divisions",
        ):
            if key in data:
                kwargs[key] = data.pop(key)
        if data:
            raise ConfigError(f"unknown config fields: {sorted(data)}")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as f:
                raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(raw)


def algorithm_config(name: str, overrides: dict | None):
    """Default config dataclass for an algorithm, with field overrides applied."""
    cfg = _CONFIG_TYPES[name]()
    if not overrides:
        return cfg
    valid = {f.name for f in dataclasses.fields(cfg)}
    unknown = set(overrides) - valid
    if unknown:
        raise ConfigError(f"unknown parameters for {name}: {sorted(unknown)}")
    return dataclasses.replace(cfg, **overrides)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _fmt(x) -> str:
    return repr(float(x))


def _problem_for(img: ImageBuffer, cfg: ExperimentConfig, file_bytes: int) -> QTableProblem:
    denom = file_bytes if cfg.fs_denominator == "file" else None
    return QTableProblem(
        img,
        weights=cfg.weights,
        opts=CodecOptions(subsampling=cfg.subsampling),
        original_bytes=denom,
        psnr_mode=cfg.psnr_mode,
    )


def _execute_unit(payload: dict) -> dict:
    """One (image, algorithm, seed) run; module-level so process pools can call it."""
    cfg = ExperimentConfig.from_dict(payload["config"])
    img = load_image(payload["image_path"])
    file_bytes = os.path.getsize(payload["image_path"])
    problem = _problem_for(img, cfg, file_bytes)
    alg = payload["algorithm"]
    seed = payload["seed"]
    budget = RunBudget(cfg.pop_size, cfg.nfe_max, seed)
    algo_cfg = algorithm_config(alg, cfg.algo_params.get(alg))
    started = time.perf_counter()
    if alg in SCALAR_ALGORITHMS:
        result = run_scalar(SCALAR_ALGORITHMS[alg], problem, budget, algo_cfg)
        wall = time.perf_counter() - started
        return {
            "kind": "scalar",
            "image": payload["image_name"],
            "algorithm": alg,
            "seed": seed,
            "best": {
                "fs_ratio": result.best_record.fs_ratio,
                "psnr_db": result.best_record.psnr_db,
                "scalar_value": result.best_record.scalar_value,
            },
            "genotype": [float(v) for v in result.best_genotype],
            "trace": [[p.nfe, p.best_scalar, p.best_fs, p.best_psnr] for p in result.trace],
            "evaluations": result.evaluations,
            "wall_time": wall,
        }
    result = run_pareto(
        PARETO_ALGORITHMS[alg], problem, budget, algo_cfg, ref_divisions=cfg.nsga3_divisions
    )
    wall = time.perf_counter() - started
    return {
        "kind": "pareto",
        "image": payload["image_name"],
        "algorithm": alg,
        "seed": seed,
        "front_points": [[float(a), float(b)] for a, b in result.front_points],
        "front_genotypes": [[float(v) for v in g] for g in result.front_genotypes],
        "hv_trace": [[nfe, hv] for nfe, hv in result.hv_trace],
        "hv_reference": list(result.hv_reference),
        "evaluations": result.evaluations,
        "wall_time": wall,
    }


def _write_scalar_run(outdir: Path, res: dict) -> None:
    run_dir = outdir / res["image"] / res["algorithm"]
    run_dir.mkdir(parents=True, exist_ok=True)
    meta = {k: res[k] for k in ("image", "algorithm", "seed", "best", "genotype", "evaluations", "wall_time")}
    _atomic_write(run_dir / f"run_{res['seed']}.json", json.dumps(meta, indent=1).encode())
    lines = ["nfe,best_scalar,best_fs,best_psnr"]
    for nfe, s, fs, ps in res["trace"]:
        lines.append(f"{nfe},{_fmt(s)},{_fmt(fs)},{_fmt(ps)}")
    _atomic_write(run_dir / f"trace_{res['seed']}.csv", ("\n".join(lines) + "\n").encode())


def _write_pareto_run(outdir: Path, res: dict) -> None:
    run_dir = outdir / res["image"] / res["algorithm"]
    run_dir.mkdir(parents=True, exist_ok=True)
    seed = res["seed"]
    meta = {
        k: res[k]
        for k in ("image", "algorithm", "seed", "hv_reference", "evaluations", "wall_time")
    }
    meta["front_size"] = len(res["front_points"])
    _atomic_write(run_dir / f"run_{seed}.json", json.dumps(meta, indent=1).encode())
    lines = ["f1,f2,genotype_id"]
    for gid, (f1, f2) in enumerate(res["front_points"]):
        lines.append(f"{_fmt(f1)},{_fmt(f2)},{gid}")
    _atomic_write(run_dir / f"front_{seed}.csv", ("\n".join(lines) + "\n").encode())
    sidecar = {str(gid): g for gid, g in enumerate(res["front_genotypes"])}
    _atomic_write(run_dir / f"genotypes_{seed}.json", json.dumps(sidecar).encode())
    lines = ["nfe,hypervolume"]
    for nfe, hv in res["hv_trace"]:
        lines.append(f"{nfe},{_fmt(hv)}")
    _atomic_write(run_dir / f"trace_{seed}.csv", ("\n".join(lines) + "\n").encode())


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every configured (image, algorithm, seed) unit and write the result
    tree; returns the summary as {image: {algorithm: [values...]}}."""
    name_by_path = {Path(p).stem: p for p in cfg.images}
    images = {name: load_image(path) for name, path in name_by_path.items()}  # fail fast

    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)

    baselines = {}
    for name, img in images.items():
        file_bytes = os.path.getsize(name_by_path[name])
        denom = file_bytes if cfg.fs_denominator == "file" else None
        rec = evaluate(
            qtable.as_genotype(qtable.annex_k_baseline()),
            img,
            cfg.weights,
            CodecOptions(subsampling=cfg.subsampling),
            denom,
            cfg.psnr_mode,
        )
        baselines[name] = rec
        (outdir / name).mkdir(parents=True, exist_ok=True)
        payload = {
            "image": name,
            "algorithm": "baseline",
            "fs_ratio": rec.fs_ratio,
            "psnr_db": rec.psnr_db,
            "scalar_value": rec.scalar_value,
        }
        _atomic_write(outdir / name / "baseline.json", json.dumps(payload, indent=1).encode())

    cfg_dict = config_to_dict(cfg)
    units = []
    for name in images:
        for alg in cfg.algorithms:
            if alg == "baseline":
                continue
            for i in range(cfg.runs):
                units.append(
                    {
                        "config": cfg_dict,
                        "image_name": name,
                        "image_path": name_by_path[name],
                        "algorithm": alg,
                        "seed": cfg.master_seed + i,
                    }
                )

    workers = cfg.workers if cfg.workers is not None else (os.cpu_count() or 1)
    if workers > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_execute_unit, units))
    else:
        results = [_execute_unit(u) for u in units]

    scalar_values: dict[str, dict[str, list[float]]] = {n: {} for n in images}
    pareto_results: dict[str, dict[str, list[dict]]] = {n: {} for n in images}
    for res in results:
        if res["kind"] == "scalar":
            _write_scalar_run(outdir, res)
            scalar_values[res["image"]].setdefault(res["algorithm"], []).append(
                res["best"]["scalar_value"]
            )
        else:
            _write_pareto_run(outdir, res)
            pareto_results[res["image"]].setdefault(res["algorithm"], []).append(res)

    _write_scalar_summary(outdir, cfg, images, baselines, scalar_values)
    if any(pareto_results[n] for n in images):
        _write_hv_summary(outdir, cfg, images, pareto_results)
    return {"scalar": scalar_values, "baseline": {n: baselines[n].scalar_value for n in baselines}}


def _write_scalar_summary(outdir, cfg, images, baselines, scalar_values) -> None:
    algs = [a for a in cfg.algorithms if a == "baseline" or a in SCALAR_ALGORITHMS]
    if not algs:
        return
    lines = ["image,algorithm,mean,std,rank"]
    for name in images:
        means = []
        rows = []
        for alg in algs:
            if alg == "baseline":
                mean, std = baselines[name].scalar_value, None
            else:
                vals = np.array(scalar_values[name].get(alg, []))
                if len(vals) == 0:
                    continue
                mean, std = float(vals.mean()), float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
            means.append(mean)
            rows.append((alg, mean, std))
        if not rows:
            continue
        ranks = rankdata(means, method="average")
        for (alg, mean, std), rank in zip(rows, ranks):
            std_txt = "" if std is None else _fmt(std)
            rank_txt = str(int(rank)) if float(rank).is_integer() else _fmt(rank)
            lines.append(f"{name},{alg},{_fmt(mean)},{std_txt},{rank_txt}")
    _atomic_write(outdir / "summary.csv", ("\n".join(lines) + "\n").encode())


def _write_hv_summary(outdir, cfg, images, pareto_results) -> None:
    lines = ["image,algorithm,mean,std,rank,ref_f1,ref_f2"]
    for name in images:
        by_alg = pareto_results[name]
        if not by_alg:
            continue
        fronts = [np.array(r["front_points"]) for runs in by_alg.values() for r in runs]
        allpts = np.concatenate(fronts)
        hi = allpts.max(axis=0)
        ref = tuple(h * 1.05 if h * 1.05 > h else h + 1.0 for h in hi)
        rows = []
        means = []
        for alg in cfg.algorithms:
            if alg not in by_alg:
                continue
            hvs = np.array(
                [hypervolume_2d(np.array(r["front_points"]), ref) for r in by_alg[alg]]
            )
            mean = float(hvs.mean())
            std = float(hvs.std(ddof=1)) if len(hvs) > 1 else 0.0
            rows.append((alg, mean, std))
            means.append(-mean)  # larger hypervolume ranks first
        ranks = rankdata(means, method="average")
        for (alg, mean, std), rank in zip(rows, ranks):
            rank_txt = str(int(rank)) if float(rank).is_integer() else _fmt(rank)
            lines.append(
                f"{name},{alg},{_fmt(mean)},{_fmt(std)},{rank_txt},{_fmt(ref[0])},{_fmt(ref[1])}"
            )
    _atomic_write(outdir / "hv_summary.csv", ("\n".join(lines) + "\n").encode())


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "images": list(cfg.images),
        "algorithms": list(cfg.algorithms),
        "runs": cfg.runs,
        "budget": {"pop_size": cfg.pop_size, "nfe_max": cfg.nfe_max},
        "weights": {"w1": cfg.weights.w1, "w2": cfg.weights.w2},
        "master_seed": cfg.master_seed,
        "output_dir": cfg.output_dir,
        "subsampling": cfg.subsampling,
        "psnr_mode": cfg.psnr_mode,
        "fs_denominator": cfg.fs_denominator,
        "workers": 1,  # units never nest their own pools
        "algo_params": cfg.algo_params,
        "nsga3_divisions": cfg.nsga3_divisions,
    }
