"""Async executor utilities.

This module runs synchronous (blocking) engine and oracle work in a thread
pool so replay steps can overlap them without blocking the event loop.
"""

import asyncio
from collections.abc import Callable, Sequence
from typing import Any, TypeVar

T = TypeVar("T")

Call = tuple[Callable[..., Any], tuple[Any, ...]]


class AsyncExecutor:
    """Thread-pool helpers for the async replay pipeline."""

    @staticmethod
    async def run(func: Callable[..., T], *args: Any, **kwargs: Any) -> T:
        """Await func(*args, **kwargs) on the default executor.

        Args:
            func: Blocking callable, e.g. an engine update or an oracle closure.
            *args: Positional arguments for func.
            **kwargs: Keyword arguments for func.

        Returns:
            Whatever func returns.
        """
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(None, lambda: func(*args, **kwargs))

    @staticmethod
    async def gather(calls: Sequence[Call]) -> list[Any]:
        """Run several (func, args) calls concurrently; results keep call order.

        The first exception raised by any call propagates.
        """
        return list(
            await asyncio.gather(*(AsyncExecutor.run(func, *args) for func, args in calls))
        )
