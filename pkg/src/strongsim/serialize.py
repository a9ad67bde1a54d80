"""Binary files for precomputed bases (FSA1) and index maps (FSM1).

Layout, all little-endian::

    magic    4s   b"FSA1" | b"FSM1"
    version  u16
    m        u16
    k        u16
    width    u8   bytes per mode position (FSA1) or per parent rank (FSM1)
    count    u64  number of states in the (child) layer
    records  count * k * width bytes
    crc32    u32  over everything above

Unused FSM1 slots are all 0xFF.
"""
from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .fock import FockBasis, FockIndexMap, StructureError, index_map_from_ranks

VERSION = 1
BASIS_MAGIC = b"FSA1"
MAP_MAGIC = b"FSM1"
_HEADER = struct.Struct("<4sHHHBQ")
_CRC = struct.Struct("<I")


class FormatError(ValueError):
    """Malformed, truncated or corrupted structure file."""


def _pack_ints(values: np.ndarray, width: int) -> bytes:
    raw = np.ascontiguousarray(values, dtype="<i8").view("<u8").view(np.uint8)
    return raw.reshape(-1, 8)[:, :width].tobytes()


def _unpack_ints(buf: bytes, width: int, total: int) -> np.ndarray:
    raw = np.frombuffer(buf, dtype=np.uint8).reshape(total, width)
    padded = np.zeros((total, 8), dtype=np.uint8)
    padded[:, :width] = raw
    values = padded.view("<u8").ravel()
    out = values.astype(np.int64)
    out[values == (1 << (8 * width)) - 1] = -1
    return out


def _frame(magic: bytes, m: int, k: int, width: int, count: int, body: bytes) -> bytes:
    head = _HEADER.pack(magic, VERSION, m, k, width, count)
    return head + body + _CRC.pack(zlib.crc32(head + body))


def _unframe(data: bytes, magic: bytes) -> tuple[int, int, int, int, bytes]:
    if len(data) < _HEADER.size + _CRC.size:
        raise FormatError("file truncated before the end of the header")
    got, version, m, k, width, count = _HEADER.unpack_from(data)
    if got != magic:
        raise FormatError(f"bad magic {got!r}, expected {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if not 1 <= width <= 8:
        raise FormatError(f"invalid field width {width}")
    expected = _HEADER.size + count * k * width + _CRC.size
    if len(data) != expected:
        raise FormatError(f"expected {expected} bytes, got {len(data)}")
    (crc,) = _CRC.unpack_from(data, len(data) - _CRC.size)
    if zlib.crc32(data[: -_CRC.size]) != crc:
        raise FormatError("checksum mismatch")
    return m, k, width, count, data[_HEADER.size : -_CRC.size]


def serialize_basis(basis: FockBasis) -> bytes:
    width = 1 if basis.m <= 256 else 2
    body = _pack_ints(basis.sequences.ravel(), width)
    return _frame(BASIS_MAGIC, basis.m, basis.k, width, basis.count, body)


def deserialize_basis(data: bytes) -> FockBasis:
    m, k, width, count, body = _unframe(data, BASIS_MAGIC)
    seqs = _unpack_ints(body, width, count * k).reshape(count, k)
    if seqs.size and (seqs.min() < 0 or seqs.max() >= m):
        raise FormatError("mode position out of range")
    if k > 1 and np.any(np.diff(seqs, axis=1) < 0):
        raise FormatError("photon positions are not nondecreasing")
    if count > 1:
        diff = seqs[1:] != seqs[:-1]
        first = np.argmax(diff, axis=1)
        rows = np.arange(count - 1)
        if not np.all(diff.any(axis=1)) or np.any(seqs[1:][rows, first] < seqs[:-1][rows, first]):
            raise FormatError("states are not strictly increasing")
    return FockBasis(m, k, np.ascontiguousarray(seqs))


def serialize_index_map(index_map: FockIndexMap) -> bytes:
    width = index_map.index_width_bytes
    body = _pack_ints(index_map.parent_indices.ravel(), width)
    return _frame(MAP_MAGIC, index_map.m, index_map.k, width, index_map.count, body)


def deserialize_index_map(data: bytes, child: FockBasis) -> FockIndexMap:
    """Decode an FSM1 payload; ``child`` supplies the slot modes."""
    m, k, width, count, body = _unframe(data, MAP_MAGIC)
    if (m, k, count) != (child.m, child.k, child.count):
        raise FormatError(
            f"index map (m={m}, k={k}, count={count}) does not match child basis "
            f"(m={child.m}, k={child.k}, count={child.count})"
        )
    ranks = _unpack_ints(body, width, count * k).reshape(count, k)
    try:
        return index_map_from_ranks(child, np.ascontiguousarray(ranks), width)
    except StructureError as exc:
        raise FormatError(str(exc)) from exc


def basis_filename(m: int, k: int) -> str:
    return f"fsa_m{m}_k{k}.bin"


def index_map_filename(m: int, k: int) -> str:
    return f"fsm_m{m}_k{k}.bin"


def write_structures(directory: str | Path, bases, maps) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for basis in bases:
        path = directory / basis_filename(basis.m, basis.k)
        path.write_bytes(serialize_basis(basis))
        written.append(path)
    for index_map in maps:
        if index_map is None:
            continue
        path = directory / index_map_filename(index_map.m, index_map.k)
        path.write_bytes(serialize_index_map(index_map))
        written.append(path)
    return written


def read_structures(directory: str | Path, m: int, n: int):
    """Load the FSA1/FSM1 files of layers ``0..n``; raises FileNotFoundError if any is missing."""
    from .fock import LayerStructures

    directory = Path(directory)
    bases = []
    for k in range(n + 1):
        basis = deserialize_basis((directory / basis_filename(m, k)).read_bytes())
        if (basis.m, basis.k) != (m, k):
            raise FormatError(f"{basis_filename(m, k)} holds layer m={basis.m}, k={basis.k}")
        bases.append(basis)
    maps = [None]
    for k in range(1, n + 1):
        data = (directory / index_map_filename(m, k)).read_bytes()
        maps.append(deserialize_index_map(data, bases[k]))
    return LayerStructures(m, n, tuple(bases), tuple(maps))
