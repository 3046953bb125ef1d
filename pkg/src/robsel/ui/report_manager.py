# src/robsel/ui/report_manager.py
"""Collects job results and writes the CSV / JSON outputs of an experiment."""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from robsel import __version__
from robsel.config import ALGORITHMS
from robsel.interface.job_runner import JobResult
from robsel.logic.objective import memoizes_noise

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ['algorithm', 'k', 'm', 'repetition', 'seed', 'F', 'evaluations', 'wall_ms', 'subset']
SUMMARY_COLUMNS = ['algorithm', 'k', 'm', 'runs', 'mean_F', 'std_F', 'mean_evaluations', 'mean_wall_ms']
SWEEP_COLUMNS = ['axis', 'value', 'algorithm', 'runs', 'mean_F', 'std_F', 'mean_evaluations']
TRACE_COLUMNS = ['series', 'seed', 'iteration', 'iteration_kn', 'F']


def _fmt(value: float) -> str:
    return repr(float(value))


def _std(values: Sequence[float]) -> float:
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


class ReportManager:
    """Mediates between finished jobs and the files of one output directory."""

    def __init__(self, output_dir: Union[str, Path], timing: bool = True):
        """Initializes the ReportManager.

        Args:
            output_dir: Directory receiving every output file (created on demand).
            timing: When False, wall_ms is written as 0 so files are byte-reproducible.
        """
        self.output_dir = Path(output_dir)
        self.timing = timing
        self.results: List[JobResult] = []
        self.errors: List[str] = []
        self.sinks: Dict[str, Callable[[str], None]] = {}

    def register_sink(self, name: str, sink: Callable[[str], None]):
        """Registers a status sink (e.g. a console printer)."""
        self.sinks[name] = sink

    def _status(self, message: str):
        sink = self.sinks.get("status")
        if sink:
            sink(message)
        else:
            logger.info(message)

    # --- Callbacks ---

    def handle_job_result(self, success: bool, result: Union[JobResult, str]):
        """Callback for JobRunner after a job attempt."""
        if success and isinstance(result, JobResult):
            self.results.append(result)
            self._status(f"{result.job.algorithm} k={result.job.k} m={result.job.m} "
                         f"rep={result.job.repetition}: F={result.value:.6g}")
        else:
            message = str(result)
            self.errors.append(message)
            self._status(f"Error: {message}")

    # --- Rows ---

    def _ordered(self) -> List[JobResult]:
        def key(r: JobResult):
            job = r.job
            return (job.context.get('point', 0), ALGORITHMS.index(job.algorithm), job.k, job.m, job.repetition)
        return sorted(self.results, key=key)

    def result_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for r in self._ordered():
            rows.append({
                'algorithm': r.job.algorithm,
                'k': r.job.k,
                'm': r.job.m,
                'repetition': r.job.repetition,
                'seed': '' if r.job.seed is None else r.job.seed,
                'F': _fmt(r.value),
                'evaluations': r.evaluations,
                'wall_ms': f"{r.wall_ms:.3f}" if self.timing else '0',
                'subset': r.subset_labels,
            })
        return rows

    def _groups(self, key_fn: Callable[[JobResult], Tuple]) -> Dict[Tuple, List[JobResult]]:
        groups: Dict[Tuple, List[JobResult]] = {}
        for r in self._ordered():
            groups.setdefault(key_fn(r), []).append(r)
        return groups

    def summary_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for (algorithm, k, m), group in self._groups(lambda r: (r.job.algorithm, r.job.k, r.job.m)).items():
            values = [r.value for r in group]
            rows.append({
                'algorithm': algorithm,
                'k': k,
                'm': m,
                'runs': len(group),
                'mean_F': _fmt(np.mean(values)),
                'std_F': _fmt(_std(values)),
                'mean_evaluations': _fmt(np.mean([r.evaluations for r in group])),
                'mean_wall_ms': f"{np.mean([r.wall_ms for r in group]):.3f}" if self.timing else '0',
            })
        return rows

    def sweep_rows(self, axis: str) -> List[Dict[str, Any]]:
        rows = []
        groups = self._groups(lambda r: (r.job.k if axis == 'k' else r.job.m, r.job.algorithm))
        for (value, algorithm), group in groups.items():
            values = [r.value for r in group]
            rows.append({
                'axis': axis,
                'value': value,
                'algorithm': algorithm,
                'runs': len(group),
                'mean_F': _fmt(np.mean(values)),
                'std_F': _fmt(_std(values)),
                'mean_evaluations': _fmt(np.mean([r.evaluations for r in group])),
            })
        return rows

    def trace_rows(self, n: int, k: int) -> List[Dict[str, Any]]:
        """EPORSS samples plus a two-point horizontal line per deterministic algorithm."""
        unit = k * n
        rows = []
        horizon = 0
        for r in self._ordered():
            if r.job.algorithm != 'eporss':
                continue
            for step in r.trace.steps:
                horizon = max(horizon, step.iteration)
                rows.append({'series': 'eporss', 'seed': r.job.seed, 'iteration': step.iteration,
                             'iteration_kn': _fmt(step.iteration / unit), 'F': _fmt(step.value)})
        for r in self._ordered():
            if r.job.algorithm == 'eporss':
                continue
            for iteration in (0, horizon):
                rows.append({'series': r.job.algorithm, 'seed': r.job.repetition, 'iteration': iteration,
                             'iteration_kn': _fmt(iteration / unit), 'F': _fmt(r.value)})
        return rows

    # --- Writers ---

    def _write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        path = self.output_dir / name
        with path.open('w', newline='', encoding='utf-8') as handle:
            writer = csv.DictWriter(handle, fieldnames=list(columns), lineterminator='\n')
            writer.writeheader()
            writer.writerows(rows)
        self._status(f"wrote {path}")
        return path

    def write_results(self) -> Path:
        return self._write_csv('results.csv', RESULT_COLUMNS, self.result_rows())

    def write_summary(self) -> Path:
        return self._write_csv('summary.csv', SUMMARY_COLUMNS, self.summary_rows())

    def write_sweep(self, axis: str) -> Path:
        return self._write_csv('sweep.csv', SWEEP_COLUMNS, self.sweep_rows(axis))

    def write_trace(self, n: int, k: int) -> Path:
        return self._write_csv('trace.csv', TRACE_COLUMNS, self.trace_rows(n, k))

    def write_metadata(self, config_echo: Dict[str, Any], seed: int, oracle_mode: str,
                       extra: Optional[Dict[str, Any]] = None) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            'config': config_echo,
            'seed': seed,
            'version': __version__,
            'oracle_mode': oracle_mode,
            'memoized_noise': memoizes_noise(oracle_mode),
            'errors': self.errors,
        }
        payload.update(extra or {})
        path = self.output_dir / 'metadata.json'
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n', encoding='utf-8')
        return path
