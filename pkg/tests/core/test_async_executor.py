"""Test suite for async_executor.py"""

import asyncio
import time

import pytest

from bulk_reach.core.async_executor import AsyncExecutor
from bulk_reach.core.errors import ChangeError
from bulk_reach.core.models import Graph
from bulk_reach.core.oracle import transitive_closure


class TestRun:
    """Tests for AsyncExecutor.run"""

    @pytest.mark.asyncio
    async def test_run_function_with_positional_arguments(self):
        """Test run function with positional arguments"""
        g = Graph(3, frozenset({(0, 1), (1, 2)}))

        result = await AsyncExecutor.run(transitive_closure, g)
        assert result == {(0, 1), (1, 2), (0, 2)}

    @pytest.mark.asyncio
    async def test_run_function_with_keyword_arguments(self):
        """Test run function with keyword arguments"""
        def build(n, directed):
            return Graph(n, directed=directed)

        result = await AsyncExecutor.run(build, n=4, directed=False)
        assert result == Graph(4, directed=False)

    @pytest.mark.asyncio
    async def test_blocking_function_doesnt_block_event_loop(self):
        """Test blocking function doesn't block event loop"""
        def blocking_func(duration):
            time.sleep(duration)
            return "done"

        tasks = [AsyncExecutor.run(blocking_func, 0.1) for _ in range(3)]
        start = time.time()
        results = await asyncio.gather(*tasks)
        elapsed = time.time() - start

        # If running concurrently in thread pool, should take ~0.1s, not 0.3s
        assert elapsed < 0.5
        assert all(r == "done" for r in results)

    @pytest.mark.asyncio
    async def test_exception_propagation(self):
        """Test exception propagation"""
        def failing_func():
            raise ChangeError("Test error")

        with pytest.raises(ChangeError) as exc_info:
            await AsyncExecutor.run(failing_func)
        assert str(exc_info.value) == "Test error"

    @pytest.mark.asyncio
    async def test_function_returning_none(self):
        """Test function returning None"""
        result = await AsyncExecutor.run(lambda: None)
        assert result is None


class TestGather:
    """Tests for AsyncExecutor.gather"""

    @pytest.mark.asyncio
    async def test_results_keep_call_order(self):
        def slow_identity(value, delay):
            time.sleep(delay)
            return value

        calls = [(slow_identity, (1, 0.05)), (slow_identity, (2, 0.0)), (slow_identity, (3, 0.02))]
        assert await AsyncExecutor.gather(calls) == [1, 2, 3]

    @pytest.mark.asyncio
    async def test_empty_call_list(self):
        assert await AsyncExecutor.gather([]) == []

    @pytest.mark.asyncio
    async def test_first_exception_propagates(self):
        def ok():
            return "fine"

        def bad():
            raise ValueError("boom")

        with pytest.raises(ValueError, match="boom"):
            await AsyncExecutor.gather([(ok, ()), (bad, ())])
