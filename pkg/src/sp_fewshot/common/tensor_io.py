#
# SP Few-Shot - Tensor-Block Container Format
#
# Copyright (c) 2026 Shareef Jalloq
# SPDX-License-Identifier: BSD-2-Clause
#
# Binary container shared by model checkpoints and dataset record files.
#
# IMPORTANT: This module must have NO torch dependency. Model code converts
# parameters to numpy before calling in here.
#

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import CheckpointError


# =============================================================================
# Format Constants
# =============================================================================

MAGIC = b"SPFSL1"
HEADER_ENCODING = "utf-8"
U32 = struct.Struct("<I")
PAYLOAD_DTYPE = np.dtype("<f8")


# =============================================================================
# Layout Documentation
# =============================================================================
#
# All integers little-endian.
#
#   magic        : 6 bytes "SPFSL1"
#   header       : UTF-8 "key=value\n" lines, terminated by an empty line "\n"
#   blocks       : repeated until EOF
#       name_len : u32
#       name     : name_len bytes (UTF-8)
#       rank     : u32
#       dims     : rank x u32
#       payload  : prod(dims) x f64, row-major
#


# =============================================================================
# Data Structures
# =============================================================================

@dataclass
class Container:
    """Decoded container: ordered header items plus named float64 arrays."""
    header: dict[str, str] = field(default_factory=dict)
    blocks: dict[str, np.ndarray] = field(default_factory=dict)

    def require(self, key: str) -> str:
        try:
            return self.header[key]
        except KeyError:
            raise CheckpointError(f"missing header key '{key}'") from None

    def block(self, name: str) -> np.ndarray:
        try:
            return self.blocks[name]
        except KeyError:
            raise CheckpointError(f"missing tensor block '{name}'") from None


# =============================================================================
# Encoding
# =============================================================================

def encode_header(items: Iterable[tuple[str, str]]) -> bytes:
    lines = []
    for key, value in items:
        if not key or "=" in key or "\n" in key or "\n" in value:
            raise CheckpointError(f"header item not encodable: {key!r}={value!r}")
        lines.append(f"{key}={value}\n")
    lines.append("\n")
    return "".join(lines).encode(HEADER_ENCODING)


def encode_block(name: str, array: np.ndarray) -> bytes:
    """Serialize one named array as a tensor block (payload cast to f64 LE)."""
    name_bytes = name.encode(HEADER_ENCODING)
    arr = np.ascontiguousarray(array, dtype=PAYLOAD_DTYPE)
    parts = [U32.pack(len(name_bytes)), name_bytes, U32.pack(arr.ndim)]
    parts.extend(U32.pack(d) for d in arr.shape)
    parts.append(arr.tobytes(order="C"))
    return b"".join(parts)


def encode_container(
    header: Union[Mapping[str, str], Iterable[tuple[str, str]]],
    blocks: Mapping[str, np.ndarray],
) -> bytes:
    items = header.items() if isinstance(header, Mapping) else header
    out = [MAGIC, encode_header(items)]
    out.extend(encode_block(name, arr) for name, arr in blocks.items())
    return b"".join(out)


# =============================================================================
# Decoding
# =============================================================================

def _decode_header(data: bytes, offset: int) -> tuple[dict[str, str], int]:
    # Empty header: the terminator directly follows the magic
    if data[offset:offset + 1] == b"\n":
        return {}, offset + 1
    end = data.find(b"\n\n", offset)
    if end < 0:
        raise CheckpointError("unterminated header")
    text = data[offset:end].decode(HEADER_ENCODING)
    header = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        key, sep, value = line.partition("=")
        if not sep:
            raise CheckpointError(f"header line without '=': {line!r}", lineno)
        header[key] = value
    return header, end + 2


def _unpack_u32(data: bytes, offset: int) -> tuple[int, int]:
    if offset + U32.size > len(data):
        raise CheckpointError("truncated block header")
    return U32.unpack_from(data, offset)[0], offset + U32.size


def decode_container(data: bytes) -> Container:
    """Parse container bytes. Raises CheckpointError on any malformed input."""
    if not data.startswith(MAGIC):
        raise CheckpointError("bad magic, not an SPFSL1 container")

    header, offset = _decode_header(data, len(MAGIC))
    blocks: dict[str, np.ndarray] = {}

    while offset < len(data):
        name_len, offset = _unpack_u32(data, offset)
        if offset + name_len > len(data):
            raise CheckpointError("truncated block name")
        name = data[offset:offset + name_len].decode(HEADER_ENCODING)
        offset += name_len
        if name in blocks:
            raise CheckpointError(f"duplicate tensor block '{name}'")

        rank, offset = _unpack_u32(data, offset)
        dims = []
        for _ in range(rank):
            d, offset = _unpack_u32(data, offset)
            dims.append(d)

        count = int(np.prod(dims, dtype=np.int64)) if dims else 1
        nbytes = count * PAYLOAD_DTYPE.itemsize
        if offset + nbytes > len(data):
            raise CheckpointError(f"truncated payload for block '{name}'")
        arr = np.frombuffer(data, dtype=PAYLOAD_DTYPE, count=count, offset=offset)
        blocks[name] = arr.reshape(dims).astype(np.float64, copy=True)
        offset += nbytes

    return Container(header=header, blocks=blocks)


# =============================================================================
# File Helpers
# =============================================================================

def write_container(
    path: Union[str, Path],
    header: Union[Mapping[str, str], Iterable[tuple[str, str]]],
    blocks: Mapping[str, np.ndarray],
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_container(header, blocks))
    return path


def read_container(path: Union[str, Path]) -> Container:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read {path}: {e}") from e
    try:
        return decode_container(data)
    except CheckpointError as e:
        raise CheckpointError(f"{path}: {e}") from e
