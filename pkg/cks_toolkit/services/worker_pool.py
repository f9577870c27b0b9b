"""Thread pool for independent condition checks."""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from cks_toolkit.core.config import settings
from cks_toolkit.core.logging import logger

T = TypeVar("T")
R = TypeVar("R")


class ConditionWorkerPool:
    """Fans independent checks across worker threads; results come back in input order."""

    def __init__(self, max_workers: int = 1):
        """
        Initialize the worker pool.

        Args:
            max_workers: Maximum number of worker threads
        """
        self.max_workers = max_workers
        self.executor = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="cks_check")
        self.running = True
        logger.info(f"Condition worker pool initialized with {max_workers} workers")

    def map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """
        Apply ``fn`` to every item, concurrently when the pool has more than one worker.

        Exceptions raised by ``fn`` propagate to the caller once every task has settled.
        """
        items = list(items)
        if not self.running:
            raise RuntimeError("worker pool is shut down")
        if self.max_workers == 1:
            return [fn(item) for item in items]
        futures = [self.executor.submit(fn, item) for item in items]
        errors = [f.exception() for f in futures]
        for error in errors:
            if error is not None:
                raise error
        return [f.result() for f in futures]

    def shutdown(self, wait: bool = True):
        """
        Shutdown the worker pool.

        Args:
            wait: Whether to wait for pending checks to complete
        """
        self.running = False
        self.executor.shutdown(wait=wait)
        logger.info("Condition worker pool shut down")


# Global worker pool instance
_worker_pool: Optional[ConditionWorkerPool] = None


def get_worker_pool() -> ConditionWorkerPool:
    """Get or create the global worker pool, sized by ``settings.threads``."""
    global _worker_pool
    if _worker_pool is None:
        _worker_pool = ConditionWorkerPool(max_workers=settings.threads)
    return _worker_pool


def shutdown_worker_pool():
    """Shutdown the global worker pool."""
    global _worker_pool
    if _worker_pool:
        _worker_pool.shutdown()
        _worker_pool = None
