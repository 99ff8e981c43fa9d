"""
Worker-pool related functions.
"""
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import click
import psutil

T = TypeVar("T")
R = TypeVar("R")


def available_cpus() -> int:
    """
    Return the number of physical CPUs, falling back to logical ones.
    """
    count = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    return int(count)


def parse_jobs(
    _ctx: click.Context,  # pyright: ignore
    _param: click.Parameter,  # pyright: ignore
    value: Optional[str],
) -> Optional[int]:
    """
    Return the value of the jobs option given as a string.

    The '%' suffix means a percentage of the physical CPUs; at least one
    worker is used.

    :param _ctx: Click Context. Unused.
    :param _param: Click Parameter. Unused.
    :param value: Option value as a string.
    :returns: The number of workers.
    :raise click.BadParameter: Exception raised if the option value
                               cannot be parsed or is not strictly
                               positive.
    """
    if value is None:
        return None
    if value.endswith("%"):
        val = value.removesuffix("%").rstrip()
        try:
            parsed = float(val)
        except ValueError:
            raise click.BadParameter(  # pylint: disable=raise-missing-from
                f"Cannot parse the number of jobs '{value}'."
            )
        if parsed <= 0 or parsed > 100:
            raise click.BadParameter(
                "The percentage must be above 0 and at most 100."
            )
        return max(1, int(available_cpus() * parsed / 100))
    try:
        jobs = int(value)
    except ValueError:
        raise click.BadParameter(  # pylint: disable=raise-missing-from
            f"Cannot parse the number of jobs '{value}'."
        )
    if jobs <= 0:
        raise click.BadParameter(
            f"Got value '{value}'. It must be strictly positive."
        )
    return jobs


def ordered_map(
    func: Callable[[T], R], items: Iterable[T], jobs: Optional[int] = None
) -> List[R]:
    """
    Apply func to every item, in a process pool when jobs > 1.

    Results come back in the order of the items.

    :param func: A picklable top-level function.
    :param items: The arguments.
    :param jobs: The number of workers; None or 1 means in-process.
    """
    work = list(items)
    if not jobs or jobs == 1 or len(work) < 2:
        return [func(item) for item in work]
    with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
        return list(pool.map(func, work))
