"""Scoring wire protocol v1: framing shared by the client and any server.

All integers little-endian. The handshake is unframed:

    client -> ``HSP1`` + u32 version(=1)
    server -> ``HSP1`` + u32 version + u32 c + u32 h + u32 w

Everything after the handshake is length-prefixed frames; `frame_len`
counts the bytes that follow it (opcode + body):

    SCORE      (1):  u32 batch, then batch*c*h*w binary32 values
    SCORES     (2):  u32 batch, then batch binary32 scores
    SET_TARGET (3):  u32 class_index
    ACK        (4):  empty body
    ERROR    (255):  u32 msg_len, then UTF-8 message
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ProtocolError

__all__ = [
    "MAGIC",
    "VERSION",
    "OP_SCORE",
    "OP_SCORES",
    "OP_SET_TARGET",
    "OP_ACK",
    "OP_ERROR",
    "encode_frame",
    "decode_frame",
    "client_hello",
    "server_hello",
    "parse_server_hello",
    "encode_score_request",
    "encode_scores_response",
    "encode_error",
]

MAGIC = b"HSP1"
VERSION = 1

OP_SCORE = 1
OP_SCORES = 2
OP_SET_TARGET = 3
OP_ACK = 4
OP_ERROR = 255

HELLO_REPLY_LEN = 4 + 4 + 12


def encode_frame(opcode: int, body: bytes = b"") -> bytes:
    return struct.pack("<IB", 1 + len(body), opcode) + body


def decode_frame(payload: bytes) -> tuple[int, bytes]:
    """Split a frame payload (the bytes after frame_len) into opcode and body."""
    if len(payload) < 1:
        raise ProtocolError("empty frame")
    return payload[0], payload[1:]


def client_hello() -> bytes:
    return MAGIC + struct.pack("<I", VERSION)


def server_hello(shape: tuple[int, int, int]) -> bytes:
    return MAGIC + struct.pack("<IIII", VERSION, *shape)


def parse_server_hello(blob: bytes) -> tuple[int, tuple[int, int, int]]:
    if len(blob) != HELLO_REPLY_LEN or blob[:4] != MAGIC:
        raise ProtocolError("bad handshake reply")
    version, c, h, w = struct.unpack("<IIII", blob[4:])
    return version, (c, h, w)


def encode_score_request(batch_values: np.ndarray) -> bytes:
    """batch_values: (batch, c, h, w) float32."""
    body = struct.pack("<I", batch_values.shape[0])
    body += np.ascontiguousarray(batch_values, dtype="<f4").tobytes()
    return encode_frame(OP_SCORE, body)


def encode_scores_response(scores: np.ndarray) -> bytes:
    body = struct.pack("<I", len(scores))
    body += np.ascontiguousarray(scores, dtype="<f4").tobytes()
    return encode_frame(OP_SCORES, body)


def encode_error(message: str) -> bytes:
    data = message.encode("utf-8")
    return encode_frame(OP_ERROR, struct.pack("<I", len(data)) + data)


def parse_scores_body(body: bytes) -> np.ndarray:
    if len(body) < 4:
        raise ProtocolError("scores frame too short")
    (batch,) = struct.unpack("<I", body[:4])
    if len(body) != 4 + 4 * batch:
        raise ProtocolError(f"scores frame length mismatch for batch {batch}")
    return np.frombuffer(body, dtype="<f4", count=batch, offset=4)


def parse_error_body(body: bytes) -> str:
    if len(body) < 4:
        raise ProtocolError("error frame too short")
    (msg_len,) = struct.unpack("<I", body[:4])
    return body[4 : 4 + msg_len].decode("utf-8", errors="replace")
