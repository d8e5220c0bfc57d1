"""Worker functions."""

import multiprocessing as mp
from typing import Any, Callable, List, Sequence, TypeVar

from MMWaveMC.helpers import hlogging

_log = hlogging.get_logger(__name__)

T = TypeVar("T")


def run_trials(
    worker_name: str,
    func: Callable[[T], Any],
    tasks: Sequence[T],
    processes: int = 1,
) -> List[Any]:
    """Run ``func`` on every task and return the results in task order.

    With ``processes`` greater than 1 the tasks are spread over a
    :class:`multiprocessing.Pool`; ``Pool.imap`` yields results in
    submission order, so aggregation downstream sees the same sequence as
    a serial run. ``func`` and the tasks must be picklable.

    Arguments:
        worker_name (str): Name used in log messages, e.g. the study name.
        func (callable): Function run once per task.
        tasks (list): Task arguments, one per call.
        processes (int): Number of worker processes; 1 runs serially.

    Returns:
        list: ``[func(task) for task in tasks]``.

    """
    _log.info(
        "trial_worker: %s: Started; %d tasks on %d process(es)", worker_name, len(tasks), processes
    )
    try:
        if processes <= 1 or len(tasks) <= 1:
            results = [func(task) for task in tasks]
        else:
            chunksize = max(1, len(tasks) // (processes * 4))
            with mp.Pool(processes=processes) as pool:
                results = list(pool.imap(func, tasks, chunksize=chunksize))
    except Exception as e:
        _log.exception(
            "trial_worker: %s: Failed; error: %s: %s", worker_name, type(e).__name__, e
        )
        raise

    _log.info("trial_worker: %s: Stopped", worker_name)
    return results
