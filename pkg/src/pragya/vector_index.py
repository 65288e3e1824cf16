"""Exact top-k cosine search over stored verse embeddings, with persistence.

At corpus scale (hundreds to low thousands of verses) a flat exact scan is
fast and makes evaluation deterministic, so there is no approximate
structure. Stored vectors are float32 (the persistence precision); scores
are computed in float64.

File format (little-endian): magic ``PRGX``, version u8=1, dim u32,
count u32, then count records of (verse_id u32, dim x f32), then CRC32 of
everything between the version byte and the checksum.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embedding import EmbeddingVector
from .errors import PragyaError

MAGIC = b"PRGX"
FORMAT_VERSION = 1
NORM_TOLERANCE = 1e-5


class VectorIndexError(PragyaError):
    code = "vector_index_error"


class DimensionMismatch(VectorIndexError):
    code = "dimension_mismatch"


class DuplicateId(VectorIndexError):
    code = "duplicate_id"


class NotNormalized(VectorIndexError):
    code = "not_normalized"


class EmptyIndex(VectorIndexError):
    code = "empty_index"


class IndexIoError(VectorIndexError):
    code = "index_io_error"


class BadMagic(VectorIndexError):
    code = "bad_magic"


class UnsupportedVersion(VectorIndexError):
    code = "unsupported_version"


class TruncatedFile(VectorIndexError):
    code = "truncated_file"


class ScoredHit:
    """One ranked retrieval hit: verse id plus cosine similarity."""

    __slots__ = ("verse_id", "score")

    def __init__(self, verse_id: int, score: float):
        self.verse_id = verse_id
        self.score = score

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ScoredHit)
            and self.verse_id == other.verse_id
            and self.score == other.score
        )

    def __repr__(self) -> str:
        return f"ScoredHit(verse_id={self.verse_id}, score={self.score!r})"


class VectorIndex:
    """Immutable id -> unit-vector store with exact top-k search."""

    def __init__(self, dim: int, ids: np.ndarray, vectors32: np.ndarray):
        # internal constructor; use build_index / load_index
        self._dim = dim
        self._ids = ids
        self._vectors32 = vectors32
        self._vectors64 = vectors32.astype(np.float64)
        for arr in (self._ids, self._vectors32, self._vectors64):
            arr.flags.writeable = False

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return int(self._ids.shape[0])

    @property
    def ids(self) -> np.ndarray:
        return self._ids

    @property
    def vectors(self) -> np.ndarray:
        """Stored vectors as float32, one row per id."""
        return self._vectors32

    def entries(self) -> Iterable[tuple[int, np.ndarray]]:
        for i in range(len(self)):
            yield int(self._ids[i]), self._vectors32[i]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VectorIndex)
            and self._dim == other._dim
            and np.array_equal(self._ids, other._ids)
            and self._vectors32.tobytes() == other._vectors32.tobytes()
        )


def _as_array(vector) -> np.ndarray:
    if isinstance(vector, EmbeddingVector):
        return vector.values
    return np.asarray(vector, dtype=np.float64)


def build_index(
    dim: int,
    items: Sequence[tuple[int, "EmbeddingVector | Sequence[float] | np.ndarray"]],
) -> VectorIndex:
    """Build an index over (verse_id, vector) pairs.

    Vectors must have length ``dim`` and unit norm (within 1e-5); ids must
    be unique non-negative integers.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    ids = np.empty(len(items), dtype=np.uint32)
    vectors = np.empty((len(items), dim), dtype=np.float32)
    seen: set[int] = set()
    for row, (verse_id, vector) in enumerate(items):
        verse_id = int(verse_id)
        if verse_id < 0 or verse_id > 0xFFFFFFFF:
            raise ValueError(f"verse id {verse_id} out of u32 range")
        if verse_id in seen:
            raise DuplicateId(f"duplicate verse id {verse_id}")
        seen.add(verse_id)
        arr = _as_array(vector)
        if arr.ndim != 1 or arr.shape[0] != dim:
            raise DimensionMismatch(
                f"vector for id {verse_id} has dimension {arr.shape}, index dim is {dim}"
            )
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise NotNormalized(f"vector for id {verse_id} has norm {norm!r}")
        ids[row] = verse_id
        vectors[row] = arr.astype(np.float32)
    return VectorIndex(dim, ids, vectors)


def search(index: VectorIndex, query: "EmbeddingVector | np.ndarray", k: int) -> list[ScoredHit]:
    """Exact top-k by inner product, ties broken by ascending verse id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        raise EmptyIndex("cannot search an empty index")
    q = _as_array(query)
    if q.ndim != 1 or q.shape[0] != index.dim:
        raise DimensionMismatch(
            f"query dimension {q.shape} does not match index dim {index.dim}"
        )
    scores = index._vectors64 @ q.astype(np.float64)
    # lexsort orders by the last key first: descending score, then ascending id
    order = np.lexsort((index.ids, -scores))
    top = order[: min(k, len(index))]
    return [ScoredHit(int(index.ids[i]), float(scores[i])) for i in top]


def save_index(index: VectorIndex, path: str | Path) -> None:
    """Write the index; the on-disk f32 payload round-trips bit-exactly."""
    payload = bytearray()
    payload += struct.pack("<II", index.dim, len(index))
    for row in range(len(index)):
        payload += struct.pack("<I", int(index.ids[row]))
        payload += index.vectors[row].astype("<f4").tobytes()
    blob = MAGIC + struct.pack("<B", FORMAT_VERSION) + payload
    blob += struct.pack("<I", zlib.crc32(bytes(payload)))
    try:
        Path(path).write_bytes(blob)
    except OSError as exc:
        raise IndexIoError(f"cannot write index to {path}: {exc}") from exc


def load_index(path: str | Path) -> VectorIndex:
    """Read an index written by save_index, verifying structure and CRC."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise IndexIoError(f"cannot read index from {path}: {exc}") from exc

    if len(blob) < len(MAGIC) or blob[: len(MAGIC)] != MAGIC:
        raise BadMagic(f"{path} is not an index file (bad magic)")
    if len(blob) < len(MAGIC) + 1:
        raise TruncatedFile(f"{path} ends before the version byte")
    version = blob[len(MAGIC)]
    if version != FORMAT_VERSION:
        raise UnsupportedVersion(f"index format version {version} is not supported")

    body = blob[len(MAGIC) + 1 :]
    if len(body) < 8 + 4:
        raise TruncatedFile(f"{path} is too short for a header and checksum")
    dim, count = struct.unpack_from("<II", body, 0)
    record_size = 4 + 4 * dim
    expected = 8 + count * record_size + 4
    if len(body) != expected:
        raise TruncatedFile(
            f"{path} has {len(body)} payload bytes, expected {expected} "
            f"for dim={dim} count={count}"
        )
    payload = body[:-4]
    (crc_stored,) = struct.unpack_from("<I", body, len(body) - 4)
    if zlib.crc32(payload) != crc_stored:
        raise TruncatedFile(f"{path} failed its checksum")

    records = np.frombuffer(
        payload[8:], dtype=np.dtype([("id", "<u4"), ("vec", "<f4", (dim,))])
    )
    ids = records["id"].astype(np.uint32)
    vectors = np.ascontiguousarray(records["vec"], dtype=np.float32)
    vectors = vectors.reshape(count, dim)
    return VectorIndex(int(dim), ids, vectors)
