"""Order-preserving thread pool map."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from ..config import get_settings

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Apply ``fn`` to every item, in input order.

    Args:
        fn: Pure function of one item
        items: Work items
        threads: Worker count (default: ``FCPCA_THREADS``)

    Returns:
        Results in the same order as ``items``
    """
    items = list(items)
    workers = threads if threads is not None else get_settings().threads
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
