"""Experiment orchestrator: builds ensembles, dispatches jobs, collects outputs."""

import logging
import queue
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from robsel.config import ExperimentConfig, worker_count
from robsel.errors import ConfigError, RobselError
from robsel.influence.graph import DirectedGraph, load_edge_list, top_active_subgraph
from robsel.interface.job_runner import AlgorithmJob, JobRunner
from robsel.logic.eporss import default_iterations
from robsel.logic.instance_builder import InstanceBuilder, build_perturbation_ensemble, build_snapshot_ensemble
from robsel.logic.objective import ObjectiveEnsemble
from robsel.ui.report_manager import ReportManager

logger = logging.getLogger(__name__)


def _load_graph(path: str) -> DirectedGraph:
    with open(path, encoding='utf-8') as stream:
        return load_edge_list(stream)


class RobselApplication:
    """Wires the instance builder, job runner and report manager for one experiment."""

    def __init__(self, config: ExperimentConfig, workers: Optional[int] = None):
        self.config = config
        self.workers = workers if workers is not None else worker_count()
        self.instance_builder: Optional[InstanceBuilder] = None
        self.job_runner = JobRunner(self, self.workers)
        self.report_manager = ReportManager(config.output_dir, config.timing)
        self.report_manager.register_sink("status", print)
        self._tasks: "queue.Queue[Tuple[Callable[..., Any], Tuple[Any, ...]]]" = queue.Queue()
        self._ensembles: Dict[int, ObjectiveEnsemble] = {}

    def schedule_task(self, callback: Callable[..., Any], *args: Any):
        """Queues `callback(*args)` for the collecting (main) thread.

        Job threads call this; only the main thread touches the report manager.
        """
        self._tasks.put((callback, args))

    def _drain(self, expected: int):
        for _ in range(expected):
            callback, args = self._tasks.get()
            callback(*args)

    # --- Ensembles ---

    def ensemble_for(self, m: int) -> ObjectiveEnsemble:
        """Ensemble with m functions; perturbation draws are shared across m."""
        if not self._ensembles:
            self._build_ensembles()
        return self._ensembles[m]

    def _build_ensembles(self):
        config = self.config
        if config.mode == 'perturb-ic':
            graph = _load_graph(config.graph_paths[0])
            graph = top_active_subgraph(graph, min(config.node_limit, graph.n))
            rng = np.random.default_rng(config.seed)
            full, _ = build_perturbation_ensemble(
                graph, max(config.m_values), rng, config.r, config.perturb_lo, config.perturb_hi,
                config.seed_policy, config.seed,
            )
            for m in config.m_values:
                self._ensembles[m] = ObjectiveEnsemble(full.functions[:m], seed=config.seed)
        elif config.mode == 'multi-graph-general-ic':
            graphs = [_load_graph(path) for path in config.graph_paths]
            ensemble = build_snapshot_ensemble(
                graphs, config.general_ic, config.r, config.node_limit, config.seed_policy, config.seed,
            )
            self._ensembles[ensemble.m] = ensemble
        else:
            self.instance_builder = InstanceBuilder.from_weights(config.weights)
            ensemble = self.instance_builder.build_ensemble(seed=config.seed)
            self._ensembles[ensemble.m] = ensemble
        n = next(iter(self._ensembles.values())).n
        too_large = [k for k in config.k_values if k > n]
        if too_large:
            raise ConfigError(f"k values {too_large} exceed the ground set size {n}", key='k')

    # --- Jobs ---

    def grid(self) -> List[Tuple[int, int]]:
        """(k, m) pairs in sweep order."""
        config = self.config
        if config.sweep_axis == 'm':
            return [(config.k, m) for m in config.m_values]
        return [(k, config.m) for k in config.k_values]

    def jobs_for(self, k: int, m: int, point: int = 0) -> List[AlgorithmJob]:
        """Repetition policy: EPORSS runs eporss_seeds seeds; the deterministic
        algorithms repeat only when the oracles are noisy."""
        config = self.config
        ensemble = self.ensemble_for(m)
        context = {'point': point}
        jobs = []
        for algorithm in config.algorithms:
            if algorithm == 'eporss':
                runs = config.eporss_seeds
            else:
                runs = config.repetitions if ensemble.stochastic else 1
            for rep in range(runs):
                seed = config.seed + rep
                jobs.append(AlgorithmJob(
                    algorithm, ensemble.fresh(seed), k, repetition=rep, seed=seed,
                    eporss_T=config.eporss_T, saturate=config.saturate, context=dict(context),
                ))
        return jobs

    def run_grid(self, points: Optional[List[Tuple[int, int]]] = None):
        jobs = []
        for index, (k, m) in enumerate(points if points is not None else self.grid()):
            jobs.extend(self.jobs_for(k, m, index))
        logger.info("dispatching %d jobs on %d workers", len(jobs), self.workers)
        for job in jobs:
            self.job_runner.run_async(job, self.report_manager.handle_job_result)
        self._drain(len(jobs))

    # --- Outputs ---

    def write_metadata(self, command: str):
        ensemble = next(iter(self._ensembles.values()), None)
        extra: Dict[str, Any] = {'command': command}
        oracle_mode = 'unknown'
        if ensemble is not None:
            oracle_mode = ensemble.oracle_mode
            extra['n'] = ensemble.n
            extra['eporss_T'] = {
                str(k): self.config.eporss_T if self.config.eporss_T is not None else default_iterations(ensemble.n, k)
                for k in self.config.k_values
            }
        self.report_manager.write_metadata(self.config.echo(), self.config.seed, oracle_mode, extra)

    def finish(self, command: str, writers: List[Callable[[], Any]]) -> int:
        for write in writers:
            write()
        self.write_metadata(command)
        if self.report_manager.errors:
            print(f"{len(self.report_manager.errors)} job(s) failed; see metadata.json", file=sys.stderr)
            return 1
        print(f"results written to {Path(self.config.output_dir)}")
        return 0

    def flush_partial(self, command: str):
        """Writes whatever finished before a failure."""
        try:
            if self.report_manager.results:
                self.report_manager.write_results()
                self.report_manager.write_summary()
            self.write_metadata(command)
        except OSError as e:
            logger.error("could not flush partial results: %s", e)


def _guarded(command: str, config: ExperimentConfig, body: Callable[[RobselApplication], int]) -> int:
    app = None
    try:
        app = RobselApplication(config)
        return body(app)
    except (RobselError, OSError) as e:
        logger.error("%s failed: %s", command, e)
        print(f"error: {e}", file=sys.stderr)
        if app is not None:
            app.report_manager.errors.append(str(e))
            app.flush_partial(command)
        return 1


def cmd_run(config: ExperimentConfig) -> int:
    """Runs every selected algorithm at each (k, m) point; writes results and summary."""
    def body(app: RobselApplication) -> int:
        app.run_grid()
        return app.finish('run', [app.report_manager.write_results, app.report_manager.write_summary])
    return _guarded('run', config, body)


def cmd_sweep(config: ExperimentConfig) -> int:
    """Like cmd_run plus sweep.csv keyed by the swept axis."""
    axis = config.sweep_axis or 'k'

    def body(app: RobselApplication) -> int:
        app.run_grid()
        rm = app.report_manager
        return app.finish('sweep', [rm.write_results, rm.write_summary, lambda: rm.write_sweep(axis)])
    return _guarded('sweep', config, body)


def cmd_trace(config: ExperimentConfig) -> int:
    """EPORSS anytime curve plus horizontal baselines for the other algorithms."""
    if 'eporss' not in config.algorithms:
        print("error: trace needs eporss among the algorithms", file=sys.stderr)
        return 1

    def body(app: RobselApplication) -> int:
        app.run_grid([(config.k, config.m)])
        rm = app.report_manager
        n = app.ensemble_for(config.m).n
        return app.finish('trace', [rm.write_results, rm.write_summary, lambda: rm.write_trace(n, config.k)])
    return _guarded('trace', config, body)
