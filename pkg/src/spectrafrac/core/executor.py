"""
Task execution engine for spectrafrac
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Generic, List, Optional, Sequence, TypeVar

import numpy as np

from ..exceptions import SpectraFracError

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class TaskResult(Generic[T]):
    """Result of one grid-point task"""
    index: int
    success: bool
    value: Optional[T]
    error: str
    execution_time: float


def task_seed(seed: int, index: int) -> int:
    """Per-task 64-bit seed from SeedSequence([seed, index]); independent of worker count."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


class TaskExecutor:
    """Run independent tasks over a thread pool, keeping submission order"""
    def __init__(self, jobs: Optional[int] = None):
        self.jobs = max(1, int(jobs)) if jobs else 1

    def _run_one(self, index: int, func: Callable[..., T], item: Any) -> TaskResult[T]:
        start_time = time.perf_counter()
        try:
            value = func(item)
            return TaskResult(
                index=index,
                success=True,
                value=value,
                error="",
                execution_time=time.perf_counter() - start_time,
            )
        except SpectraFracError as e:
            logger.warning(f"Task {index} failed: {e}")
            return TaskResult(
                index=index,
                success=False,
                value=None,
                error=str(e),
                execution_time=time.perf_counter() - start_time,
            )

    def map(self, func: Callable[[Any], T], items: Sequence[Any]) -> List[TaskResult[T]]:
        if self.jobs == 1 or len(items) <= 1:
            return [self._run_one(i, func, item) for i, item in enumerate(items)]
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            futures = [pool.submit(self._run_one, i, func, item) for i, item in enumerate(items)]
            return [f.result() for f in futures]

    def map_values(self, func: Callable[[Any], T], items: Sequence[Any]) -> List[T]:
        """Like `map` but re-raises the first failure."""
        results = self.map(func, items)
        for result in results:
            if not result.success:
                raise TaskFailedError(result.index, result.error)
        return [r.value for r in results]


class TaskFailedError(SpectraFracError):
    def __init__(self, index: int, message: str):
        super().__init__(f"task {index} failed: {message}")
        self.index = index
