# src/robsel/interface/job_runner.py
"""Executes algorithm runs in background threads and reports back through callbacks."""

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Dict, Optional, Union

import numpy as np

from robsel.logic.eporss import eporss_run
from robsel.logic.greedy import RunTrace, greedy_select, modified_greedy_select
from robsel.logic.objective import ObjectiveEnsemble
from robsel.logic.saturate import SaturateConfig, saturate_select

# Avoid circular import for type hinting
if TYPE_CHECKING:
    from robsel.main_app import RobselApplication

logger = logging.getLogger(__name__)


@dataclass
class AlgorithmJob:
    """One solver run on its own ensemble copy."""

    algorithm: str
    ensemble: ObjectiveEnsemble
    k: int
    repetition: int = 0
    seed: Optional[int] = None
    eporss_T: Optional[int] = None
    saturate: SaturateConfig = field(default_factory=SaturateConfig)
    context: Dict[str, Any] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.ensemble.m


@dataclass
class JobResult:
    job: AlgorithmJob
    bits: np.ndarray
    value: float
    evaluations: int
    wall_ms: float
    trace: RunTrace

    @property
    def subset_labels(self) -> str:
        return self.job.ensemble.ground.describe(self.bits)


def execute_job(job: AlgorithmJob) -> JobResult:
    """Runs the job's solver synchronously and measures it."""
    ensemble = job.ensemble
    start = time.perf_counter()
    if job.algorithm == 'greedy':
        bits, trace = greedy_select(ensemble, job.k)
    elif job.algorithm == 'modified-greedy':
        bits, trace = modified_greedy_select(ensemble, job.k)
    elif job.algorithm == 'saturate':
        bits, trace = saturate_select(ensemble, job.k, job.saturate)
    elif job.algorithm == 'eporss':
        bits, trace = eporss_run(ensemble, job.k, job.eporss_T, job.seed)
    else:
        raise ValueError(f"Unsupported algorithm: {job.algorithm}")
    wall_ms = (time.perf_counter() - start) * 1000.0
    evaluations = ensemble.eval_count
    # reported F goes through the uncounted path so the count stays the solver's own
    value = float(ensemble.evaluate_profile(bits, counted=False).min())
    return JobResult(job, bits, value, evaluations, wall_ms, trace)


class JobRunner:
    """Manages the execution of algorithm jobs in background threads."""

    def __init__(self, root_app: 'RobselApplication', workers: int = 1):
        """Initializes the JobRunner.

        Args:
            root_app: Application whose schedule_task delivers callbacks to the
                      collecting thread.
            workers: Maximum number of jobs running at once.
        """
        self.root_app = root_app
        self.workers = max(1, workers)
        self._slots = threading.BoundedSemaphore(self.workers)

    def run_async(self, job: AlgorithmJob, callback: Callable[[bool, Union[JobResult, str]], None]) -> threading.Thread:
        """Runs `job` in a background thread.

        Args:
            job: The run to perform.
            callback: Called on the collecting thread with
                      - success (bool): True if the solver finished.
                      - result: the JobResult on success, an error message otherwise.
        """
        thread = threading.Thread(target=self._run_job_thread, args=(job, callback), daemon=True)
        thread.start()
        return thread

    def _run_job_thread(self, job: AlgorithmJob, callback: Callable[[bool, Union[JobResult, str]], None]):
        success = False
        result: Union[JobResult, str] = "Unknown error during execution."
        with self._slots:
            try:
                logger.info("running %s (k=%d, m=%d, repetition %d)", job.algorithm, job.k, job.m, job.repetition)
                result = execute_job(job)
                success = True
            except Exception as e:
                result = f"{job.algorithm} failed (k={job.k}, repetition {job.repetition}): {e}"
                logger.error(result)
        try:
            self.root_app.schedule_task(callback, success, result)
        except Exception as cb_e:
            logger.error("failed to schedule callback for %s: %s", job.algorithm, cb_e)
