"""
Parallel trajectory executor.

Uses the same hybrid model as an agent executor:
- asyncio.gather() coordinates one coroutine per trajectory
- ThreadPoolExecutor runs each (synchronous) trajectory off the event loop

Trajectories share nothing mutable; results come back in submission order
so aggregation does not depend on scheduling.
"""

import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Generic, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class JobResult(Generic[T]):
    """Outcome of one trajectory job."""

    label: str
    value: Optional[T] = None
    error: Optional[BaseException] = None
    duration_seconds: float = 0.0

    @property
    def success(self) -> bool:
        return self.error is None


@dataclass
class TrajectoryJob(Generic[T]):
    label: str
    run: Callable[[], T]


class TrajectoryExecutor:
    """
    Run independent trajectory jobs on a thread pool.

    Usage:
        executor = TrajectoryExecutor(max_workers=4)
        results = executor.run(jobs)            # from sync code
        results = await executor.run_all(jobs)  # from async code
    """

    def __init__(self, max_workers: int = 1):
        self.max_workers = max(1, max_workers)

    async def run_all(self, jobs: List[TrajectoryJob[T]]) -> List[JobResult[T]]:
        """Execute every job concurrently and wait for all of them (full barrier)."""
        start_time = time.time()
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            loop = asyncio.get_running_loop()
            tasks = [self._execute(loop, pool, job) for job in jobs]
            results = await asyncio.gather(*tasks)

        failures = sum(1 for r in results if not r.success)
        logger.info(
            f"Executed {len(jobs)} trajectories on {self.max_workers} worker(s) "
            f"in {time.time() - start_time:.2f}s ({failures} failed)"
        )
        return list(results)

    async def _execute(
        self,
        loop: asyncio.AbstractEventLoop,
        pool: ThreadPoolExecutor,
        job: TrajectoryJob[T],
    ) -> JobResult[T]:
        start_time = time.time()
        try:
            value = await loop.run_in_executor(pool, job.run)
        except Exception as e:
            logger.error(f"Trajectory {job.label} failed: {e}")
            return JobResult(label=job.label, error=e, duration_seconds=time.time() - start_time)
        return JobResult(label=job.label, value=value, duration_seconds=time.time() - start_time)

    def run(self, jobs: List[TrajectoryJob[T]]) -> List[JobResult[T]]:
        return asyncio.run(self.run_all(jobs))
