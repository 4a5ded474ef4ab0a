"""
Classifier living in a child process, spoken to over newline-delimited JSON

Request per series:  {"id": k, "series": [...]}
Response per series: {"id": k, "probs": [...]}
"""

import json
import logging
import queue
import shlex
import subprocess
import tempfile
import threading
from typing import Optional, List

import numpy as np

from config import ADAPTER_TIMEOUT_S
from core.errors import AdapterError, AdapterTimeout, ProtocolError, ConfigError

from .classifier import Classifier, check_distribution

logger = logging.getLogger(__name__)

_EOF = object()


class ExternalClassifier(Classifier):
    """
    Handle owning one child process

    Calls are serialised with a lock, so one handle may be shared between
    threads; open several handles for parallel inference.
    """

    kind = 'external'

    def __init__(self, command: str, num_classes: Optional[int] = None, timeout: float = ADAPTER_TIMEOUT_S):
        argv = shlex.split(command)
        if not argv:
            raise ConfigError("External model command is empty")
        super().__init__(num_classes or 0, metadata=command)
        self.command = command
        self.timeout = timeout
        self._lock = threading.Lock()
        self._next_id = 0
        self._failure: Optional[str] = None
        self._stderr = tempfile.TemporaryFile(mode='w+', encoding='utf-8')
        try:
            self._process = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=self._stderr,
                text=True,
                encoding='utf-8',
                bufsize=1,
            )
        except OSError as e:
            self._stderr.close()
            raise AdapterError(f"Cannot launch external model '{command}': {e}") from e

        self._lines: 'queue.Queue' = queue.Queue()
        self._reader = threading.Thread(target=self._pump_stdout, daemon=True)
        self._reader.start()
        logger.info(f"Started external model (pid {self._process.pid}): {command}")

    def _pump_stdout(self) -> None:
        for line in self._process.stdout:
            self._lines.put(line)
        self._lines.put(_EOF)

    def _captured_stderr(self) -> str:
        try:
            self._stderr.flush()
            self._stderr.seek(0)
            return self._stderr.read()
        except (OSError, ValueError):
            return ''

    def _dead(self, message: str) -> AdapterError:
        # give the child a moment to finish writing stderr
        try:
            self._process.wait(timeout=1.0)
        except subprocess.TimeoutExpired:
            pass
        return AdapterError(message, stderr=self._captured_stderr())

    def _send(self, requests: List[str]) -> None:
        try:
            self._process.stdin.write(''.join(requests))
            self._process.stdin.flush()
        except (BrokenPipeError, OSError, ValueError) as e:
            raise self._dead(f"External model stopped accepting input: {e}") from e

    def _receive(self, expected_id: int) -> List[float]:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise AdapterTimeout(
                f"External model did not answer within {self.timeout:g} s",
                stderr=self._captured_stderr(),
            )
        if line is _EOF:
            raise self._dead(f"External model exited with code {self._process.poll()} mid-stream")
        if not line.strip():
            raise ProtocolError("External model sent an empty reply line")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as e:
            raise ProtocolError(f"External model sent invalid JSON: {line.strip()[:200]!r}") from e
        if not isinstance(reply, dict) or 'probs' not in reply:
            raise ProtocolError(f"Reply lacks a 'probs' field: {line.strip()[:200]!r}")
        if reply.get('id') != expected_id:
            raise ProtocolError(f"Reply id {reply.get('id')!r} does not match request id {expected_id}")
        if not isinstance(reply['probs'], list):
            raise ProtocolError("'probs' must be a list of numbers")
        return reply['probs']

    def _abandon(self, reason: str) -> None:
        """Stop the child; its reply stream can no longer be matched to requests"""
        self._failure = reason
        if self._process.poll() is None:
            self._process.kill()
            self._process.wait()
        logger.warning(f"External model stopped after a failed exchange: {reason}")

    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        with self._lock:
            if self._failure is not None:
                raise AdapterError(f"External model is unusable after an earlier failure: {self._failure}")
            if self._process.poll() is not None:
                raise self._dead(f"External model is not running (exit code {self._process.returncode})")
            ids = list(range(self._next_id, self._next_id + X.shape[0]))
            self._next_id += X.shape[0]
            try:
                self._send([
                    json.dumps({'id': k, 'series': row.tolist()}) + '\n'
                    for k, row in zip(ids, X)
                ])
                rows = [self._receive(k) for k in ids]
            except (AdapterError, ProtocolError) as e:
                self._abandon(str(e))
                raise

        try:
            probs = np.array(rows, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise ProtocolError(f"Ragged or non-numeric probabilities: {e}") from e
        if probs.ndim != 2 or probs.shape[1] < 1:
            raise ProtocolError(f"Expected one probability vector per series, got shape {probs.shape}")
        if self.num_classes == 0:
            self.num_classes = probs.shape[1]
        return check_distribution(probs, self.num_classes)

    def close(self) -> None:
        if self._process.poll() is None:
            try:
                self._process.stdin.close()
                self._process.wait(timeout=2.0)
            except (OSError, subprocess.TimeoutExpired):
                self._process.kill()
                self._process.wait()
        self._stderr.close()
        logger.debug(f"External model closed: {self.command}")


def external_adapter(command: str, num_classes: Optional[int] = None,
                     timeout: float = ADAPTER_TIMEOUT_S) -> ExternalClassifier:
    """
    Launch ``command`` and return a classifier handle speaking NDJSON to it

    Args:
        command: Shell-style command line (split with shlex, no shell)
        num_classes: Expected C; learned from the first reply when omitted
        timeout: Seconds to wait for each reply line

    Raises:
        AdapterError: The command cannot be launched
    """
    return ExternalClassifier(command, num_classes=num_classes, timeout=timeout)
