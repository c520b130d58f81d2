"""Order-preserving parallel map over independent tasks."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from config.settings import settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Get the worker count, falling back to the configured default."""
    return max(1, int(threads if threads is not None else settings.threads))


def task_seed(master_seed: int, index: int) -> int:
    """Derive the seed of task *index* from the master seed."""
    return (int(master_seed) ^ int(index)) & 0xFFFFFFFFFFFFFFFF


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Apply *fn* to every item and return results in input order.

    Reductions over the returned list are left to the caller so they always
    run in the same sequence whatever the worker count.
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
