"""Experiment orchestration and the CLI surface: result tree layout, seed
determinism (byte-identical summaries), worker-count invariance, subcommands,
and exit codes."""

import json
from pathlib import Path

import pytest

from jpegmoo.cli import main
from jpegmoo.errors import ConfigError
from jpegmoo.experiment import ExperimentConfig, run_experiment
from jpegmoo.image import smooth_image, textured_image, write_ppm

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def image_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("imgs")
    write_ppm(d / "alpha.ppm", textured_image(32, 32, 3, seed=1))
    write_ppm(d / "beta.pgm", smooth_image(32, 32, 1, seed=2))
    return d


def tiny_config(image_dir, outdir, algorithms, runs=2, seed=0):
    return ExperimentConfig(
        images=[str(image_dir / "alpha.ppm"), str(image_dir / "beta.pgm")],
        algorithms=algorithms,
        runs=runs,
        pop_size=6,
        nfe_max=30,
        master_seed=seed,
        output_dir=str(outdir),
        workers=1,
    )


class TestRunExperiment:
    def test_result_tree_counting(self, image_dir, tmp_path):
        cfg = tiny_config(image_dir, tmp_path / "out", ["baseline", "enmoga"], runs=2)
        run_experiment(cfg)
        out = tmp_path / "out"
        assert (out / "summary.csv").exists()
        for image in ("alpha", "beta"):
            assert (out / image / "baseline.json").exists()
            runs = sorted((out / image / "enmoga").glob("run_*.json"))
            assert len(runs) == 2
            traces = sorted((out / image / "enmoga").glob("trace_*.csv"))
            assert len(traces) == 2

    def test_summary_structure_and_baseline_row(self, image_dir, tmp_path):
        cfg = tiny_config(image_dir, tmp_path / "out", ["baseline", "enmoga", "enmops"])
        run_experiment(cfg)
        lines = (tmp_path / "out" / "summary.csv").read_text().strip().splitlines()
        assert lines[0] == "image,algorithm,mean,std,rank"
        rows = [l.split(",") for l in lines[1:]]
        assert len(rows) == 6  # 2 images x 3 algorithms
        baseline_rows = [r for r in rows if r[1] == "baseline"]
        assert all(r[3] == "" for r in baseline_rows)  # no std for the deterministic row

    def test_master_seed_gives_byte_identical_summary(self, image_dir, tmp_path):
        cfg1 = tiny_config(image_dir, tmp_path / "a", ["baseline", "enmode", "ennsgaii"], seed=9)
        run_experiment(cfg1)
        cfg2 = tiny_config(image_dir, tmp_path / "b", ["baseline", "enmode", "ennsgaii"], seed=9)
        run_experiment(cfg2)
        for name in ("summary.csv", "hv_summary.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_different_seed_changes_results(self, image_dir, tmp_path):
        cfg1 = tiny_config(image_dir, tmp_path / "a", ["enmoga"], seed=1)
        cfg2 = tiny_config(image_dir, tmp_path / "b", ["enmoga"], seed=2)
        run_experiment(cfg1)
        run_experiment(cfg2)
        assert (tmp_path / "a" / "summary.csv").read_bytes() != (tmp_path / "b" / "summary.csv").read_bytes()

    def test_parallel_matches_sequential(self, image_dir, tmp_path):
        import dataclasses

        cfg_seq = tiny_config(image_dir, tmp_path / "seq", ["enmoga", "ennsgaii"], seed=4)
        run_experiment(cfg_seq)
        cfg_par = dataclasses.replace(
            tiny_config(image_dir, tmp_path / "par", ["enmoga", "ennsgaii"], seed=4), workers=2
        )
        run_experiment(cfg_par)
        for name in ("summary.csv", "hv_summary.csv"):
            assert (tmp_path / "seq" / name).read_bytes() == (tmp_path / "par" / name).read_bytes()

    def test_pareto_outputs(self, image_dir, tmp_path):
        cfg = tiny_config(image_dir, tmp_path / "out", ["ennsgaii"], runs=1)
        run_experiment(cfg)
        alg_dir = tmp_path / "out" / "alpha" / "ennsgaii"
        front = (alg_dir / "front_0.csv").read_text().strip().splitlines()
        assert front[0] == "f1,f2,genotype_id"
        sidecar = json.loads((alg_dir / "genotypes_0.json").read_text())
        assert len(sidecar) == len(front) - 1
        assert all(len(g) == 128 for g in sidecar.values())
        trace = (alg_dir / "trace_0.csv").read_text().strip().splitlines()
        assert trace[0] == "nfe,hypervolume"

    def test_trace_schema_scalar(self, image_dir, tmp_path):
        cfg = tiny_config(image_dir, tmp_path / "out", ["enmops"], runs=1)
        run_experiment(cfg)
        trace = (tmp_path / "out" / "alpha" / "enmops" / "trace_0.csv").read_text().splitlines()
        assert trace[0] == "nfe,best_scalar,best_fs,best_psnr"
        values = [float(t.split(",")[1]) for t in trace[1:]]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_unreadable_image_fails_fast(self, image_dir, tmp_path):
        cfg = tiny_config(image_dir, tmp_path / "out", ["enmoga"])
        cfg.images = [str(image_dir / "missing.ppm")]
        with pytest.raises(Exception):
            run_experiment(cfg)
        assert not (tmp_path / "out" / "summary.csv").exists()

    def test_config_validation(self, image_dir, tmp_path):
        with pytest.raises(ConfigError):
            tiny_config(image_dir, tmp_path, ["quantum"])
        with pytest.raises(ConfigError):
            tiny_config(image_dir, tmp_path, ["enmoga"], runs=0)
        with pytest.raises(ConfigError):
            ExperimentConfig(images=[], algorithms=["enmoga"])

    def test_from_json_rejects_unknown_fields(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"images": ["x.ppm"], "algorithms": ["enmoga"], "turbo": True}))
        with pytest.raises(ConfigError, match="turbo"):
            ExperimentConfig.from_json(path)

    def test_algo_params_validated(self, image_dir, tmp_path):
        from jpegmoo.experiment import algorithm_config

        cfg = algorithm_config("enmoga", {"crossover_prob": 0.7})
        assert cfg.crossover_prob == 0.7 and cfg.mutation_prob == 0.3
        with pytest.raises(ConfigError, match="warp"):
            algorithm_config("enmode", {"warp": 9})

    def test_file_size_denominator(self, image_dir, tmp_path):
        import dataclasses

        base = tiny_config(image_dir, tmp_path / "raw", ["baseline"], runs=1)
        run_experiment(base)
        cfg = dataclasses.replace(
            tiny_config(image_dir, tmp_path / "file", ["baseline"], runs=1), fs_denominator="file"
        )
        run_experiment(cfg)
        raw = json.loads((tmp_path / "raw" / "alpha" / "baseline.json").read_text())
        filed = json.loads((tmp_path / "file" / "alpha" / "baseline.json").read_text())
        # PPM header makes the file slightly larger than the raw raster
        assert filed["fs_ratio"] < raw["fs_ratio"]
        assert filed["psnr_db"] == raw["psnr_db"]


class TestCli:
    def test_compress_writes_jfif(self, image_dir, tmp_path, capsys):
        out = tmp_path / "out.jpg"
        code = main(["compress", str(image_dir / "alpha.ppm"), "-o", str(out), "--quality", "50"])
        assert code == 0
        data = out.read_bytes()
        assert data[:2] == b"\xff\xd8" and data[-2:] == b"\xff\xd9"
        assert "psnr" in capsys.readouterr().out

    def test_compress_missing_file_is_io_error(self, tmp_path):
        assert main(["compress", str(tmp_path / "nope.ppm")]) == 3

    def test_compress_bad_quality_is_config_error(self, image_dir, tmp_path):
        code = main(
            ["compress", str(image_dir / "alpha.ppm"), "-o", str(tmp_path / "x.jpg"), "--quality", "0"]
        )
        assert code == 4

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["optimize"])  # missing required args
        assert exc.value.code == 2

    def test_optimize_deterministic_output(self, image_dir, capsys):
        argv = [
            "optimize", str(image_dir / "beta.pgm"), "--alg", "enmoga",
            "--seed", "7", "--pop", "6", "--nfe", "24",
        ]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second
        assert "scalar=" in first

    def test_optimize_pareto(self, image_dir, tmp_path, capsys):
        argv = [
            "optimize", str(image_dir / "beta.pgm"), "--alg", "ennsgaiii",
            "--seed", "3", "--pop", "6", "--nfe", "18", "-o", str(tmp_path),
        ]
        assert main(argv) == 0
        assert "front size=" in capsys.readouterr().out
        assert (tmp_path / "front_ennsgaiii_3.csv").exists()

    def test_experiment_and_reports(self, image_dir, tmp_path, capsys):
        cfg = {
            "images": [str(image_dir / "alpha.ppm"), str(image_dir / "beta.pgm")],
            "algorithms": ["baseline", "enmoga", "enmops", "ennsgaii"],
            "runs": 2,
            "budget": {"pop_size": 6, "nfe_max": 24},
            "master_seed": 5,
            "workers": 1,
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "results"
        assert main(["experiment", str(cfg_path), "--output", str(out)]) == 0
        capsys.readouterr()

        assert main(["pareto-report", str(out)]) == 0
        report = capsys.readouterr().out
        assert "ennsgaii" in report
        assert (out / "hv_report.csv").exists()
        assert (out / "pf_selected.csv").exists()
        assert (out / "merged_front_alpha.csv").exists()

        assert main(["stats", str(out)]) == 0
        stats_out = capsys.readouterr().out
        assert "avg rank" in stats_out
        assert (out / "ranks.csv").exists()
        assert (out / "wilcoxon.csv").exists()

    def test_correlate_matches_reference_values(self, capsys, tmp_path):
        out = tmp_path / "corr.csv"
        assert main(["correlate", str(DATA / "energy_levels.csv"), "-o", str(out)]) == 0
        text = capsys.readouterr().out
        assert "0.9615" in text           # size vs psnr
        assert "0.9433" in text           # ec vs size, original row included
        assert "0.9754" in text           # ec vs psnr (finite pairs)
        assert "without_original" in text
        assert "0.9895" in text           # ec vs size, original row excluded
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "variant,column_a,column_b,pearson"

    def test_correlate_missing_file(self, tmp_path):
        assert main(["correlate", str(tmp_path / "none.csv")]) == 3
