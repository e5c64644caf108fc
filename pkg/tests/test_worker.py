import time

import pytest

from minsumkd.worker import Worker
from minsumkd.worker import WorkerStats


class TestWorkerStats:
    def test_successes_when_should_be_negative_returns_zero(self):
        stats = WorkerStats(100)
        stats._total_errors = 101
        assert not stats.total_successes

    def test_results_are_in_submission_order(self):
        stats = WorkerStats(3)
        stats.add_result(2, "c")
        stats.add_result(0, "a")
        stats.add_result(1, "b")
        assert stats.results == ["a", "b", "c"]

    def test_first_error_is_lowest_index(self):
        stats = WorkerStats(3)
        late = ValueError("late")
        early = ValueError("early")
        stats.add_error(2, late)
        stats.add_error(1, early)
        assert stats.first_error is early


class TestWorker:
    def test_is_async(self):
        worker = Worker(5, 2)
        demo_ls = []

        def async_func():
            # Wait so that the line under `do_async` happens first, proving that it's async
            time.sleep(0.01)
            demo_ls.append(2)

        worker.do_async(async_func)
        demo_ls.append(1)
        worker.wait()
        assert demo_ls == [1, 2]
        worker.close()

    def test_map_returns_results_in_item_order(self):
        def slow_square(x):
            time.sleep(0.001 * (5 - x))
            return x * x

        with Worker(4) as worker:
            assert worker.map(slow_square, range(5)) == [0, 1, 4, 9, 16]
            assert worker.map(slow_square, [3]) == [9]

    def test_map_reraises_first_failure(self):
        def fail_on_odd(x):
            if x % 2:
                raise ValueError(f"odd {x}")
            return x

        with Worker(3) as worker:
            with pytest.raises(ValueError) as err:
                worker.map(fail_on_odd, range(6))
        assert str(err.value) == "odd 1"

    def test_stats_count_errors(self):
        def raise_error():
            raise RuntimeError("boom")

        with Worker(2) as worker:
            worker.do_async(raise_error)
            worker.do_async(lambda: 1)
            worker.wait()
            assert worker.stats.total_errors == 1
            assert worker.stats.total_processed == 2
