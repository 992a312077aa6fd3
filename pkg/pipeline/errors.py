from __future__ import annotations

import logging
import time
from functools import wraps
from typing import Callable, ParamSpec, TypeVar

logger = logging.getLogger(__name__)

P = ParamSpec("P")
T = TypeVar("T")


def retry_with_backoff(
    max_retries: int = 3,
    initial_delay: float = 0.2,
    backoff_factor: float = 2.0,
    retryable_exceptions: tuple[type[Exception], ...] = (Exception,),
):
    """Call the wrapped function up to ``max_retries + 1`` times.

    The pause starts at ``initial_delay`` seconds (0 means no pause) and grows
    by ``backoff_factor``. Only ``retryable_exceptions`` are retried; the last
    one is re-raised once attempts run out.
    """

    def decorator(func: Callable[P, T]) -> Callable[P, T]:
        @wraps(func)
        def wrapper(*args: P.args, **kwargs: P.kwargs) -> T:
            pause = initial_delay
            total = max_retries + 1
            for attempt in range(1, total + 1):
                try:
                    return func(*args, **kwargs)
                except retryable_exceptions as exc:
                    if attempt == total:
                        logger.error(f"{func.__name__}: giving up after {total} attempts ({exc})")
                        raise
                    logger.warning(f"{func.__name__}: attempt {attempt}/{total} hit {exc!r}, next try in {pause:.2f}s")
                    if pause > 0:
                        time.sleep(pause)
                    pause *= backoff_factor
            raise RuntimeError("unreachable")

        return wrapper

    return decorator


def retry_on_io_error(max_retries: int = 3, initial_delay: float = 0.2):
    """Retry witness-store reads and appends on transient filesystem errors.

    Missing files and permission problems are not transient and propagate at once.
    """
    return retry_with_backoff(max_retries, initial_delay, 2.0, (BlockingIOError, InterruptedError, TimeoutError))


def handle_node_error(node_name: str, state: dict, error: Exception, is_critical: bool = True) -> dict:
    """Record a node failure in ``state["errors"]`` (critical) or ``state["warnings"]``.

    Critical errors are re-raised by the caller.
    """
    message = f"{node_name} failed: {error}"
    if is_critical:
        logger.error(message)
        state.setdefault("errors", []).append(message)
    else:
        logger.warning(f"Non-critical error in {node_name}, continuing: {error}")
        state.setdefault("warnings", []).append(message)
    return state


# Quick validation when run directly: python -m pipeline.errors
if __name__ == "__main__":
    calls = [0]

    @retry_with_backoff(max_retries=2, initial_delay=0.0)
    def flaky() -> str:
        calls[0] += 1
        if calls[0] < 3:
            raise BlockingIOError("store locked")
        return "ok"

    assert flaky() == "ok" and calls[0] == 3
    state = handle_node_error("dicks", {"errors": []}, ValueError("boom"), is_critical=False)
    assert state["warnings"] == ["dicks failed: boom"]
    print("✓ error handling utilities validated")
