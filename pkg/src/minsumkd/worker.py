import queue
from threading import Condition
from threading import Lock
from threading import Thread

from minsumkd.logger import get_main_cli_logger

_STOP = object()


class WorkerStats:
    """Stats about the tasks that have run. Results are kept by submission index."""

    def __init__(self, total):
        self.total = total
        self._total_processed = 0
        self._total_errors = 0
        self._results = {}
        self._errors = {}
        self.__lock = Lock()

    @property
    def total_processed(self):
        """The total number of tasks executed."""
        return self._total_processed

    @property
    def total_errors(self):
        """The amount of errors that occurred."""
        return self._total_errors

    @property
    def total_successes(self):
        val = self._total_processed - self._total_errors
        return val if val >= 0 else 0

    @property
    def results(self):
        """Results of the successful tasks, in submission order."""
        return [self._results[i] for i in sorted(self._results)]

    @property
    def first_error(self):
        if not self._errors:
            return None
        return self._errors[min(self._errors)]

    def __str__(self):
        return f"{self.total_successes} succeeded, {self._total_errors} failed out of {self.total}"

    def increment_total_processed(self):
        """+1 to self.total_processed"""
        with self.__lock:
            self._total_processed += 1

    def add_error(self, index, err):
        with self.__lock:
            self._total_errors += 1
            self._errors[index] = err

    def add_result(self, index, result):
        with self.__lock:
            self._results[index] = result

    def reset_results(self):
        with self.__lock:
            self._results = {}
            self._errors = {}


class Worker:
    """A pool of threads draining a task queue. numpy kernels release the GIL, so decoding
    chunks overlap on multiple cores.

    Usage:

        with Worker(4) as worker:
            results = worker.map(decode_chunk, chunks)
    """

    def __init__(self, thread_count, expected_total=0, stats=None):
        self._queue = queue.Queue()
        self._thread_count = max(1, int(thread_count))
        self._stats = stats or WorkerStats(expected_total)
        self._tasks = 0
        self._threads = []
        self.__started = False
        self.__start_lock = Lock()
        self.__done = Condition()
        self._logger = get_main_cli_logger()

    def do_async(self, func, *args, **kwargs):
        """Execute the given func asynchronously given *args and **kwargs.

        Args:
            func (callable): The function to execute asynchronously.
            *args (iter): Positional args to pass to the function.
            **kwargs (dict): Key-value args to pass to the function.

        Returns:
            int: The submission index of the task.
        """
        if not self.__started:
            with self.__start_lock:
                if not self.__started:
                    self.__start()
                    self.__started = True
        index = self._tasks
        self._tasks += 1
        self._queue.put({"index": index, "func": func, "args": args, "kwargs": kwargs})
        return index

    @property
    def stats(self):
        """Stats about the tasks that have been executed, such as the total errors that occurred."""
        return self._stats

    def wait(self):
        """Wait for the tasks in the queue to complete."""
        with self.__done:
            self.__done.wait_for(lambda: self._stats.total_processed >= self._tasks)

    def map(self, func, items):
        """Runs `func` on every item and returns the results in item order. The first failing
        item's exception (by item order) is re-raised after all tasks finish."""
        self._stats.reset_results()
        for item in items:
            self.do_async(func, item)
        self.wait()
        error = self._stats.first_error
        if error is not None:
            raise error
        return self._stats.results

    def close(self):
        for _ in self._threads:
            self._queue.put(_STOP)
        for thread in self._threads:
            thread.join()
        self._threads = []
        self.__started = False

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
        return False

    def _process_queue(self):
        while True:
            task = self._queue.get()
            if task is _STOP:
                self._queue.task_done()
                return
            index = task["index"]
            try:
                func = task["func"]
                args = task["args"]
                kwargs = task["kwargs"]
                self._stats.add_result(index, func(*args, **kwargs))
            except Exception as err:
                self._stats.add_error(index, err)
                self._logger.log_error(f"Task {index} failed: {err}")
            finally:
                self._stats.increment_total_processed()
                self._queue.task_done()
                with self.__done:
                    self.__done.notify_all()

    def __start(self):
        for _ in range(0, self._thread_count):
            t = Thread(target=self._process_queue)
            t.daemon = True
            t.start()
            self._threads.append(t)
