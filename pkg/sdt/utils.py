""" Module providing various utility functions.

Can be refactored into multiple files if necessary.
"""

import contextlib
import logging
import os
import pathlib
import tempfile
from concurrent import futures
from typing import Callable, Iterable, Iterator, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def derive_seed(master_seed: int, *keys: int) -> int:
    """Derives a child seed from a master seed and a sequence of integer keys.

    The derivation depends only on its arguments, so replicate j always receives
    the same stream whichever worker runs it.

    Args:
        master_seed: The user supplied seed.
        keys: Integers identifying the child stream (e.g. stream id, replicate index).

    Returns:
        A non-negative 63-bit integer seed.
    """
    sequence = np.random.SeedSequence([int(master_seed), *[int(key) for key in keys]])
    return int(sequence.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *[int(key) for key in keys]])


def parallel_map(
    function: Callable[[T], R], items: Iterable[T], workers: int = 1
) -> List[R]:
    """Applies a function to every item, preserving input order.

    Args:
        function: The function to apply. It must not share mutable state between calls.
        items: The inputs.
        workers: Number of threads. 1 runs serially in the calling thread.

    Returns:
        A list of results, in the order of items.
    """
    if workers <= 1:
        return [function(item) for item in items]
    with futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))


@contextlib.contextmanager
def atomic_path(path: pathlib.Path) -> Iterator[pathlib.Path]:
    """Yields a temporary path that replaces `path` once the block succeeds.

    The temporary file lives in the destination directory so the final rename
    never crosses file systems.
    """
    path = pathlib.Path(path)
    fd, temp_name = tempfile.mkstemp(
        prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or "."
    )
    os.close(fd)
    temp_path = pathlib.Path(temp_name)
    try:
        yield temp_path
        os.replace(temp_path, path)
    finally:
        if temp_path.exists():
            temp_path.unlink()


def geometric_grid(low: float, high: float, count: int) -> np.ndarray:
    return np.geomspace(low, high, count)


def first_argmax(values: Sequence[float]) -> int:
    # np.argmax returns the first occurrence, which is the tie rule everywhere in sdt
    return int(np.argmax(np.asarray(values)))
