"""Black-box scoring oracles.

Every saliency method talks to a :class:`ScoringOracle`: a batch of
image tensors in, one scalar score per tensor out, with a running count
of tensors scored (the cost unit for all efficiency accounting). The
analytic proxies here make desk-scale ground truth possible; the
external oracle speaks the wire protocol to a model served out of
process. Whether a served score is pre- or post-softmax is the serving
side's choice; curves and AUCs are therefore score-scale dependent.
"""

from __future__ import annotations

import os
import select
import shlex
import socket
import struct
import subprocess
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np

from .arrays import ImageTensor, ScalarField2D
from .errors import (
    DimensionError,
    HandshakeError,
    OracleTimeoutError,
    ProtocolError,
)
from . import protocol

__all__ = [
    "ScoringOracle",
    "WeightedSumProxy",
    "MultiClassProxy",
    "ExternalProcessOracle",
    "OraclePool",
    "open_external",
]


class ScoringOracle(ABC):
    """Batch scoring interface with oracle-call accounting.

    call_count counts tensors scored, not batches.
    """

    def __init__(self):
        self.call_count = 0

    def score_batch(self, inputs: Sequence[ImageTensor]) -> list[float]:
        if len(inputs) < 1:
            raise DimensionError("batch must contain at least one tensor")
        shape = inputs[0].shape
        for t in inputs[1:]:
            if t.shape != shape:
                raise DimensionError(f"mixed shapes in batch: {shape} vs {t.shape}")
        scores = self._score(inputs)
        self.call_count += len(inputs)
        return scores

    @abstractmethod
    def _score(self, inputs: Sequence[ImageTensor]) -> list[float]: ...


class WeightedSumProxy(ScoringOracle):
    """score(x) = sum over channels and pixels of weights[i,j] * x[c,i,j].

    Linear in the input, so per-region ground-truth salience is exactly
    the sum of weights*values over that region.
    """

    def __init__(self, weights: ScalarField2D):
        super().__init__()
        self.weights = weights

    @classmethod
    def uniform(cls, height: int, width: int, value: float = 1.0) -> "WeightedSumProxy":
        return cls(ScalarField2D(np.full((height, width), value, dtype=np.float32)))

    def _score(self, inputs: Sequence[ImageTensor]) -> list[float]:
        if inputs[0].shape[1:] != self.weights.shape:
            raise DimensionError(
                f"input {inputs[0].height}x{inputs[0].width} does not match "
                f"weights {self.weights.height}x{self.weights.width}"
            )
        batch = np.stack([t.values for t in inputs]).astype(np.float64)
        w = self.weights.values.astype(np.float64)
        return np.einsum("bchw,hw->b", batch, w).tolist()


class MultiClassProxy(ScoringOracle):
    """One weight field per class; behaves as a WeightedSumProxy for the
    currently selected target class."""

    def __init__(self, class_weights: Sequence[ScalarField2D], target: int = 0):
        super().__init__()
        if len(class_weights) < 1:
            raise ValueError("need at least one class weight field")
        shape = class_weights[0].shape
        for f in class_weights[1:]:
            if f.shape != shape:
                raise DimensionError("class weight fields must share one shape")
        self.class_weights = list(class_weights)
        self.target = 0
        self.set_target(target)

    @property
    def class_count(self) -> int:
        return len(self.class_weights)

    def set_target(self, target: int) -> None:
        if not 0 <= target < len(self.class_weights):
            raise ValueError(f"target {target} out of range 0..{len(self.class_weights) - 1}")
        self.target = target

    def _score(self, inputs: Sequence[ImageTensor]) -> list[float]:
        w = self.class_weights[self.target]
        if inputs[0].shape[1:] != w.shape:
            raise DimensionError("input dims do not match class weight fields")
        batch = np.stack([t.values for t in inputs]).astype(np.float64)
        return np.einsum("bchw,hw->b", batch, w.values.astype(np.float64)).tolist()


class _StdioTransport:
    """Length-delimited exchange with a child process over its stdin/stdout."""

    def __init__(self, command: Union[str, Sequence[str]]):
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
        )
        self._fd = self.proc.stdout.fileno()
        os.set_blocking(self._fd, False)

    def send(self, data: bytes) -> None:
        try:
            self.proc.stdin.write(data)
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"scoring process closed its input: {exc}") from exc

    def recv_exact(self, n: int, deadline: float) -> bytes:
        chunks = bytearray()
        while len(chunks) < n:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise OracleTimeoutError("timed out waiting for scoring process")
            ready, _, _ = select.select([self._fd], [], [], remaining)
            if not ready:
                continue
            piece = os.read(self._fd, n - len(chunks))
            if piece == b"":
                raise ProtocolError("scoring process closed its output mid-exchange")
            chunks.extend(piece)
        return bytes(chunks)

    def close(self) -> None:
        for stream in (self.proc.stdin, self.proc.stdout):
            try:
                stream.close()
            except OSError:
                pass
        if self.proc.poll() is None:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


class _TcpTransport:
    def __init__(self, host: str, port: int, timeout: float):
        self.sock = socket.create_connection((host, port), timeout=timeout)

    def send(self, data: bytes) -> None:
        try:
            self.sock.sendall(data)
        except OSError as exc:
            raise ProtocolError(f"scoring connection lost: {exc}") from exc

    def recv_exact(self, n: int, deadline: float) -> bytes:
        chunks = bytearray()
        while len(chunks) < n:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise OracleTimeoutError("timed out waiting for scoring server")
            self.sock.settimeout(remaining)
            try:
                piece = self.sock.recv(n - len(chunks))
            except socket.timeout as exc:
                raise OracleTimeoutError("timed out waiting for scoring server") from exc
            except OSError as exc:
                raise ProtocolError(f"scoring connection lost: {exc}") from exc
            if piece == b"":
                raise ProtocolError("scoring server closed the connection mid-exchange")
            chunks.extend(piece)
        return bytes(chunks)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


class ExternalProcessOracle(ScoringOracle):
    """Client for the scoring wire protocol, over a child process's stdio
    or a TCP connection. Requests are serialized: one in flight at a time."""

    def __init__(self, transport, timeout: float = 30.0):
        super().__init__()
        self._transport = transport
        self.timeout = timeout
        self.shape: Optional[tuple[int, int, int]] = None
        self._handshake()

    @classmethod
    def launch(cls, command: Union[str, Sequence[str]], timeout: float = 30.0):
        return cls(_StdioTransport(command), timeout=timeout)

    @classmethod
    def connect(cls, host: str, port: int, timeout: float = 30.0):
        return cls(_TcpTransport(host, port, timeout), timeout=timeout)

    def _deadline(self) -> float:
        return time.monotonic() + self.timeout

    def _handshake(self) -> None:
        self._transport.send(protocol.client_hello())
        reply = self._transport.recv_exact(protocol.HELLO_REPLY_LEN, self._deadline())
        try:
            version, shape = protocol.parse_server_hello(reply)
        except ProtocolError as exc:
            raise HandshakeError(str(exc)) from exc
        if version != protocol.VERSION:
            raise HandshakeError(f"server speaks protocol v{version}, expected v{protocol.VERSION}")
        self.shape = shape

    def _exchange(self, frame: bytes) -> tuple[int, bytes]:
        self._transport.send(frame)
        deadline = self._deadline()
        (frame_len,) = struct.unpack("<I", self._transport.recv_exact(4, deadline))
        payload = self._transport.recv_exact(frame_len, deadline)
        opcode, body = protocol.decode_frame(payload)
        if opcode == protocol.OP_ERROR:
            raise ProtocolError(f"server error: {protocol.parse_error_body(body)}")
        return opcode, body

    def _score(self, inputs: Sequence[ImageTensor]) -> list[float]:
        if inputs[0].shape != self.shape:
            raise DimensionError(
                f"server accepts shape {self.shape}, got {inputs[0].shape}"
            )
        batch = np.stack([t.values for t in inputs])
        opcode, body = self._exchange(protocol.encode_score_request(batch))
        if opcode != protocol.OP_SCORES:
            raise ProtocolError(f"expected SCORES reply, got opcode {opcode}")
        scores = protocol.parse_scores_body(body)
        if len(scores) != len(inputs):
            raise ProtocolError(
                f"server answered {len(scores)} scores for a batch of {len(inputs)}"
            )
        return [float(s) for s in scores]

    def set_target(self, class_index: int) -> None:
        frame = protocol.encode_frame(protocol.OP_SET_TARGET, struct.pack("<I", class_index))
        opcode, _ = self._exchange(frame)
        if opcode != protocol.OP_ACK:
            raise ProtocolError(f"expected ACK for SET_TARGET, got opcode {opcode}")

    def close(self) -> None:
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


class OraclePool(ScoringOracle):
    """Fans each batch out over several single-connection oracles so
    external scoring runs in parallel; scores come back in input order,
    so results are identical to a single-oracle run."""

    def __init__(self, oracles: Sequence[ScoringOracle]):
        super().__init__()
        if len(oracles) < 1:
            raise ValueError("pool needs at least one oracle")
        self._oracles = list(oracles)

    @property
    def shape(self):
        return getattr(self._oracles[0], "shape", None)

    def _score(self, inputs: Sequence[ImageTensor]) -> list[float]:
        workers = min(len(self._oracles), len(inputs))
        if workers == 1:
            return self._oracles[0].score_batch(list(inputs))
        bounds = np.linspace(0, len(inputs), workers + 1).astype(int)
        slices = [list(inputs[a:b]) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=len(slices)) as pool:
            parts = pool.map(
                lambda pair: pair[0].score_batch(pair[1]), zip(self._oracles, slices)
            )
            return [score for part in parts for score in part]

    def set_target(self, class_index: int) -> None:
        for oracle in self._oracles:
            oracle.set_target(class_index)

    def close(self) -> None:
        for oracle in self._oracles:
            close = getattr(oracle, "close", None)
            if close:
                close()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def open_external(spec: str, timeout: float = 30.0) -> ExternalProcessOracle:
    """Open an external oracle from a spec string: ``exec:<command>`` for a
    stdio child process or ``tcp:<host>:<port>`` for a running server."""
    if spec.startswith("exec:"):
        return ExternalProcessOracle.launch(spec[len("exec:") :], timeout=timeout)
    if spec.startswith("tcp:"):
        host, _, port = spec[len("tcp:") :].rpartition(":")
        if not host:
            raise ValueError(f"tcp spec needs host:port, got {spec!r}")
        return ExternalProcessOracle.connect(host, int(port), timeout=timeout)
    raise ValueError(f"unknown external oracle spec {spec!r}")
