from concurrent.futures import Future, ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List, Optional

from framework.error_code.errors import argument_error
from framework.interfaces.core import LogProvider


class RunScheduler:
    """Runs independent benchmark runs with at most ``max_concurrent`` in flight

    Results come back in run-index order whatever the completion order.
    With ``max_concurrent == 1`` everything runs in-process.
    """

    def __init__(self, max_concurrent: int = 1):
        if max_concurrent < 1:
            raise argument_error("max_concurrent must be at least 1", max_concurrent=max_concurrent)
        self.max_concurrent = max_concurrent
        self.running: Dict[int, Future] = {}

    def can_submit(self) -> bool:
        return len(self.running) < self.max_concurrent

    def map_runs(
        self,
        fn: Callable[..., Any],
        cfg: Any,
        indices: Iterable[int],
        log: Optional[LogProvider] = None,
    ) -> List[Any]:
        order = list(indices)
        if self.max_concurrent == 1:
            return [fn(cfg, index, log) for index in order]

        # workers log through their own structlog logger
        results: Dict[int, Any] = {}
        pending = list(reversed(order))
        with ProcessPoolExecutor(max_workers=self.max_concurrent) as pool:
            while pending or self.running:
                while pending and self.can_submit():
                    index = pending.pop()
                    self.running[index] = pool.submit(fn, cfg, index)
                oldest = min(self.running)
                results[oldest] = self.running.pop(oldest).result()
        return [results[index] for index in order]
