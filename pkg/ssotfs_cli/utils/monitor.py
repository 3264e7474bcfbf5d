import _thread
import logging
import threading
import time

import psutil


class ResourceMonitor:
    """Monitors memory usage and timeout constraints of a simulation run.

    Worker processes spawned for trial-parallel execution are included in the
    memory figure. On a breach the main thread is interrupted.
    """

    def __init__(self, memory_threshold: int, timeout: int, interval: float = 5.0):
        self.memory_threshold = memory_threshold
        self.timeout = timeout
        self.interval = interval
        self.start_time = time.time()
        self.process = psutil.Process()
        self.logger = logging.getLogger(__name__)
        self.breach = None
        self._stop = threading.Event()

    def memory_usage(self) -> int:
        """Resident set size of this process and its children, in bytes."""
        usage = self.process.memory_info().rss
        for child in self.process.children(recursive=True):
            try:
                usage += child.memory_info().rss
            except psutil.NoSuchProcess:
                continue
        return usage

    def check(self):
        """Runs one sample; returns a breach description or None."""
        elapsed_time = time.time() - self.start_time
        memory_usage_gb = self.memory_usage() / (1024**3)
        self.logger.debug(f"Total Memory Usage: {memory_usage_gb:.2f} GB")

        if memory_usage_gb > self.memory_threshold / (1024**3):
            self.logger.error(f"Memory usage exceeded: {memory_usage_gb:.2f} GB")
            return "memory"
        if elapsed_time > self.timeout:
            self.logger.error("Execution timeout exceeded.")
            return "timeout"
        return None

    def monitor(self):
        """Samples until stopped or until a limit is breached."""
        while not self._stop.is_set():
            self.breach = self.check()
            if self.breach:
                _thread.interrupt_main()
                return
            self._stop.wait(self.interval)

    def start(self) -> threading.Thread:
        thread = threading.Thread(target=self.monitor, daemon=True)
        thread.start()
        return thread

    def stop(self):
        self._stop.set()
