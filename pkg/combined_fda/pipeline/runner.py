"""Runs one CLI command end to end and writes its artifacts."""

import logging
import platform
import time
from contextlib import contextmanager
from importlib.metadata import PackageNotFoundError, version
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .. import __version__
from ..analysis.baselines import mse_comparison
from ..analysis.decompose import decompose_records
from ..analysis.fccca import canonical_mode, fit_cca
from ..analysis.fcpca import estimate_C, fit_eigen, mode_of_variation
from ..analysis.studies import run_replicates, summarize
from ..config import Settings, get_settings
from ..data.ingest import ingest_csv
from ..data.simgen import SimConfig, SimDataset, generate
from ..data.smooth import RawRecord, smooth_curves
from ..errors import PhaseDomainError
from ..geometry import TimeGrid
from ..report.export import ArtifactWriter, curves_frame, glued_frame, write_json
from ..report.plots import plot_modes, plot_mse
from ..utils.parallel import parallel_map
from .schemas import CcaReport, ErrorResponse, RunConfig, RunManifest, ScaleReport, ScanPoint

logger = logging.getLogger(__name__)

PACKAGES = ("numpy", "scipy", "pandas", "numba", "matplotlib", "pydantic", "pydantic-settings")
MODE_Z = (-1.0, 0.0, 1.0)
CCA_MODE_STEPS = (-2.0, 0.0, 2.0)


def _versions() -> Dict[str, str]:
    found = {"python": platform.python_version(), "combined-fda": __version__}
    for name in PACKAGES:
        try:
            found[name] = version(name)
        except PackageNotFoundError:
            found[name] = "unknown"
    return found


class PipelineRunner:
    """Executes a RunConfig: load or simulate input, analyze, collect artifacts, write once."""

    def __init__(self, config: RunConfig, settings: Optional[Settings] = None):
        self.config = config
        self.settings = settings or get_settings()
        self.grid = TimeGrid.uniform(config.grid_k)
        self.writer = ArtifactWriter(
            config.output_dir, table_format=config.format, float_format=self.settings.csv_float_format
        )
        self.timings: Dict[str, float] = {}
        self.warnings: List[str] = []
        self.error: Optional[ErrorResponse] = None

    @contextmanager
    def _stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)

    def run(self) -> int:
        """Run the command; returns the process exit status."""
        handlers = {
            "smooth": self.smooth,
            "align": self.align,
            "fcpca": self.fcpca,
            "fccca": self.fccca,
            "simulate": self.simulate,
            "benchmark": self.benchmark,
            "replicate": self.replicate,
        }
        error = None
        artifacts: List[str] = []
        try:
            handlers[self.config.command]()
            with self._stage("write"):
                artifacts = self.writer.flush()
        except Exception as e:
            logger.exception("%s failed", self.config.command)
            error = ErrorResponse(error=type(e).__name__, detail=str(e))
            self.config.output_dir.mkdir(parents=True, exist_ok=True)
            write_json(self.config.output_dir / "error.json", error)
            artifacts = ["error.json"]

        manifest = RunManifest(
            command=self.config.command,
            status="error" if error else "ok",
            config=self.config.model_dump(mode="json"),
            seed=self.config.seed,
            versions=_versions(),
            timings=self.timings,
            artifacts=artifacts,
            warnings=self.warnings,
            error=error,
        )
        self.config.output_dir.mkdir(parents=True, exist_ok=True)
        write_json(self.config.output_dir / "run.json", manifest)
        self.error = error
        return 1 if error else 0

    # inputs

    def _sim_config(self) -> SimConfig:
        c = self.config
        return SimConfig(n=c.n, k=c.grid_k, seed=c.seed, noise_sd=c.noise_sd, model=c.model)

    def _records(self) -> Tuple[List[RawRecord], List[str]]:
        if self.config.input_path is not None:
            with self._stage("ingest"):
                ingested = ingest_csv(self.config.input_path)
            if ingested.rescaled:
                self.warnings.append("header times rescaled to [0, 1]")
            return ingested.records, ingested.ids
        with self._stage("simulate"):
            dataset = generate(self._sim_config())
        self._note_resampling(dataset)
        return [RawRecord.from_curve(f, id=i) for f, i in zip(dataset.fs, dataset.ids)], dataset.ids

    def _note_resampling(self, dataset: SimDataset) -> None:
        if dataset.resampled:
            self.warnings.append(f"resampled {dataset.resampled} out-of-domain phase draws")

    def _smoothing_options(self) -> dict:
        s = self.settings
        return {
            "degree": s.smoothing_degree,
            "penalty_order": s.penalty_order,
            "log10_min": s.gcv_log10_min,
            "log10_max": s.gcv_log10_max,
            "points": s.gcv_points,
        }

    def _decompose(self):
        records, ids = self._records()
        s = self.settings
        with self._stage("smooth+align"):
            alignment, smoothed, _ = decompose_records(
                records,
                self.grid,
                deriv_order=self.config.deriv_order,
                smoothing=self._smoothing_options(),
                tol=s.align_tol,
                max_iter=s.align_max_iter,
                karcher_tol=s.karcher_tol,
                karcher_max_iter=s.karcher_max_iter,
            )
        self.warnings.extend(alignment.warnings)
        return alignment, smoothed, ids

    # commands

    def smooth(self) -> None:
        records, ids = self._records()
        with self._stage("smooth"):
            fits, curves = smooth_curves(
                records,
                self.grid,
                deriv_order=self.config.deriv_order,
                lam=self.config.lam,
                **self._smoothing_options(),
            )
        self.writer.add_table("smoothed", curves_frame(curves, ids, self.grid))
        self.writer.add_table(
            "smoothing",
            pd.DataFrame(
                {
                    "id": ids,
                    "selected_lambda": [f.selected_lambda for f in fits],
                    "gcv_score": [f.gcv_score for f in fits],
                }
            ),
        )

    def align(self) -> None:
        alignment, _, ids = self._decompose()
        self.writer.add_table("aligned", curves_frame(alignment.aligned, ids, self.grid))
        self.writer.add_table("warps", curves_frame(alignment.warps, ids, self.grid))
        self.writer.add_table("phases", curves_frame(alignment.phases, ids, self.grid))

    def fcpca(self) -> None:
        alignment, smoothed, ids = self._decompose()
        ys, xs, m = alignment.aligned, alignment.phases, self.config.m
        s = self.settings
        with self._stage("estimate_C"):
            estimate = estimate_C(
                ys,
                xs,
                smoothed,
                m=m,
                log10_min=s.c_log10_min,
                log10_max=s.c_log10_max,
                scan_points=s.c_scan_points,
                map_fn=parallel_map,
            )
        if estimate.degenerate:
            self.warnings.append("reconstruction error is flat in C; C = 1 used")
        model = fit_eigen(ys, xs, estimate.C)
        r = model.n_components
        labels = [f"pc{j + 1}" for j in range(r)]

        self.writer.add_table(
            "eigenvalues",
            pd.DataFrame(
                {
                    "component": np.arange(1, r + 1),
                    "eigenvalue": model.eigenvalues,
                    "explained_variance_ratio": model.explained_variance_ratio,
                }
            ),
        )
        self.writer.add_table(
            "eigenfunctions", glued_frame(model.eigenfunctions, self.grid, {"component": labels})
        )
        scores = pd.DataFrame(model.scores, columns=labels)
        scores.insert(0, "id", ids)
        self.writer.add_table("scores", scores)
        self.writer.add_json(
            "C.json",
            ScaleReport(
                C=estimate.C,
                m=m,
                mse=estimate.mse,
                degenerate=estimate.degenerate,
                scan=[ScanPoint(log10_value=u, objective=v) for u, v in zip(estimate.search.scan_log10, estimate.search.scan_values)],
                explained_variance_ratio=model.explained_variance_ratio.tolist(),
            ),
        )
        for j in range(1, min(m, r) + 1):
            curves = {}
            for z in MODE_Z:
                try:
                    curves[z] = mode_of_variation(model, j, z)
                except PhaseDomainError as e:
                    self.warnings.append(f"mode pc{j}: {e}")
            share = 100 * model.explained_variance_ratio[j - 1]
            self.writer.add_figure(
                f"modes_pc{j}.svg", plot_modes(curves, f"Combined PC {j} ({share:.1f}% of variation, C = {estimate.C:.3g})")
            )

    def fccca(self) -> None:
        alignment, _, ids = self._decompose()
        s = self.settings
        with self._stage("fit_cca"):
            model = fit_cca(
                alignment.aligned,
                alignment.phases,
                lam=self.config.lam,
                n_pairs=self.config.m,
                log10_min=s.cca_log10_min,
                log10_max=s.cca_log10_max,
                grid_points=s.cca_grid_points,
            )
        self.warnings.extend(model.warnings)
        pairs = [f"pair{j + 1}" for j in range(model.n_pairs)]
        stacked = np.hstack([model.weights_y, model.weights_x])
        self.writer.add_table("cca_weights", glued_frame(stacked, self.grid, {"pair": pairs}))
        self.writer.add_json(
            "cca_report.json",
            CcaReport(
                lam=model.lam,
                correlations=model.correlations.tolist(),
                slopes=model.slopes.tolist(),
                cv_correlation=model.cv_correlation,
                cv_scan=[ScanPoint(log10_value=float(np.log10(lam_value)), objective=v) for lam_value, v in (model.cv_scan or [])],
                truncated=model.truncated,
                warnings=model.warnings,
            ),
        )
        for j in range(1, model.n_pairs + 1):
            sigma = model.amplitude_step(j)
            curves = {}
            for step in CCA_MODE_STEPS:
                try:
                    curves[step] = canonical_mode(model, j, step * sigma)
                except ValueError as e:
                    self.warnings.append(f"canonical mode {j}: {e}")
            self.writer.add_figure(
                f"cca_mode{j}.svg",
                plot_modes(curves, f"Canonical pair {j} (rho = {model.correlations[j - 1]:.2f})", label="a/sd"),
            )

    def simulate(self) -> None:
        with self._stage("simulate"):
            dataset = generate(self._sim_config())
        self._note_resampling(dataset)
        self.writer.add_table("dataset", curves_frame(dataset.fs, dataset.ids, dataset.grid))
        self.writer.add_json(
            "truth.json",
            {
                "config": dataset.config.model_dump(),
                "resampled": dataset.resampled,
                "scores": dataset.scores_true,
                **dataset.truth,
            },
        )

    def benchmark(self) -> None:
        alignment, smoothed, _ = self._decompose()
        with self._stage("mse_comparison"):
            curves = mse_comparison(
                alignment.aligned, alignment.phases, smoothed, self.config.m_max, map_fn=parallel_map
            )
        rows = []
        for curve in curves:
            for idx, m in enumerate(curve.m_values):
                rows.append(
                    {
                        "method": curve.method,
                        "m": int(m),
                        "mse": float(curve.mse[idx]),
                        "C": float(curve.c_values[idx]) if curve.c_values is not None else np.nan,
                    }
                )
        self.writer.add_table("mse_comparison", pd.DataFrame(rows))
        self.writer.add_figure(
            "mse_plot.svg", plot_mse(curves[0].m_values.tolist(), {c.method: c.mse for c in curves})
        )

    def replicate(self) -> None:
        c = self.config
        with self._stage("replicates"):
            table = run_replicates(c.model, c.n, c.reps, c.seed, k=c.grid_k, noise_sd=c.noise_sd)
        self.writer.add_table("replicates", table)
        self.writer.add_table("summary", summarize(table))


def run_pipeline(config: RunConfig, settings: Optional[Settings] = None) -> Tuple[int, Optional[ErrorResponse]]:
    """Run one command; returns (exit status, error or None)."""
    runner = PipelineRunner(config, settings)
    status = runner.run()
    return status, runner.error
