"""Threaded job orchestration shared by optimizer restarts and experiment cells."""

from __future__ import annotations

import logging
import os
import threading
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Generic, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_jobs() -> int:
    return os.cpu_count() or 1


class JobRunner(Generic[T, R]):
    """Run a function over independent work items, sequentially or in a thread pool.

    Results are returned in input order whatever the completion order, so
    a run is reproducible as long as every item carries its own random
    stream.  The first exception raised by an item is re-raised after the
    pool drains.
    """

    def __init__(self, fn: Callable[[T], R], jobs: int = 1, label: str = "job") -> None:
        self._fn = fn
        self._jobs = max(1, int(jobs))
        self._label = label
        self._lock = threading.Lock()
        self._processed = 0

    # ------------------------------------------------------------------
    # Public
    # ------------------------------------------------------------------

    def run(self, items: Sequence[T]) -> list[R]:
        total = len(items)
        self._processed = 0
        results: list[R | None] = [None] * total

        if self._jobs == 1 or total <= 1:
            for i, item in enumerate(items):
                results[i] = self._process_one(item, total)
            return results  # type: ignore[return-value]

        first_error: BaseException | None = None
        with ThreadPoolExecutor(max_workers=min(self._jobs, total)) as pool:
            futures = {pool.submit(self._process_one, item, total): i for i, item in enumerate(items)}
            for fut in as_completed(futures):
                i = futures[fut]
                try:
                    results[i] = fut.result()
                except Exception as exc:
                    logger.exception("Exception in %s %d", self._label, i)
                    if first_error is None:
                        first_error = exc

        if first_error is not None:
            raise first_error
        return results  # type: ignore[return-value]

    # ------------------------------------------------------------------
    # Single item
    # ------------------------------------------------------------------

    def _process_one(self, item: T, total: int) -> R:
        result = self._fn(item)
        with self._lock:
            self._processed += 1
            seq = self._processed
        width = len(str(total))
        logger.debug("(%*d/%d) %s finished", width, seq, total, self._label)
        return result
