"""Hashed character n-gram features with IDF weighting.

Grams are drawn from whitespace tokens padded with one boundary marker
on each side, hashed with 64-bit FNV-1a into a power-of-two table, and
weighted by a smoothed inverse document frequency.  Hash collisions are
accepted: colliding grams simply share a bucket and their counts add.
"""

from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyCorpus

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF

IDF_MAGIC = b"NADIIDF1"


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return h


@dataclass(frozen=True, slots=True)
class FeatureConfig:
    n_min: int = 2
    n_max: int = 5
    dim: int = 1 << 18
    seed: int = 0
    pad_token: str = "_"

    def __post_init__(self) -> None:
        if not (1 <= self.n_min <= self.n_max <= 8):
            raise ValueError(f"need 1 <= n_min <= n_max <= 8, got [{self.n_min}, {self.n_max}]")
        if self.dim < 2 or self.dim & (self.dim - 1):
            raise ValueError(f"dim must be a power of two >= 2, got {self.dim}")
        if len(self.pad_token) != 1:
            raise ValueError("pad_token must be a single character")


DEFAULT_FEATURES = FeatureConfig()


def config_fingerprint(config: FeatureConfig) -> str:
    """Stable hex digest of a feature configuration, for pairing a model
    with the featurizer it was trained against."""
    canon = (
        f"n_min={config.n_min};n_max={config.n_max};dim={config.dim};"
        f"seed={config.seed};pad={config.pad_token}"
    )
    return f"{fnv1a64(canon.encode('utf-8')):016x}"


def char_ngrams(text: str, config: FeatureConfig = DEFAULT_FEATURES) -> Counter[str]:
    """Multiset of character n-grams, n in [n_min, n_max].

    Each whitespace token is padded with one pad_token on each side, and
    grams never cross token boundaries.  The empty string yields an
    empty multiset.
    """
    grams: Counter[str] = Counter()
    pad = config.pad_token
    for token in text.split():
        padded = pad + token + pad
        length = len(padded)
        for n in range(config.n_min, config.n_max + 1):
            if n > length:
                break
            for i in range(length - n + 1):
                grams[padded[i : i + n]] += 1
    return grams


def hash_index(gram: str, config: FeatureConfig = DEFAULT_FEATURES) -> int:
    """Bucket index of a gram: FNV-1a of its UTF-8 bytes, xor-folded with
    the seed, masked to the table size."""
    return (fnv1a64(gram.encode("utf-8")) ^ (config.seed & _U64)) & (config.dim - 1)


@dataclass(frozen=True)
class IdfTable:
    """Per-bucket IDF weights fitted on one corpus."""

    weights: np.ndarray
    doc_count: int

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])


def fit_idf(corpus: Sequence[Counter[str]], config: FeatureConfig = DEFAULT_FEATURES) -> IdfTable:
    """Fit smoothed IDF weights: ln((1 + N) / (1 + df)) + 1 per bucket.

    df counts documents containing at least one gram hashing to the
    bucket.  Raises EmptyCorpus on an empty corpus.
    """
    if not corpus:
        raise EmptyCorpus("cannot fit idf on zero documents")
    df = np.zeros(config.dim, dtype=np.int64)
    for grams in corpus:
        buckets = {hash_index(g, config) for g in grams}
        if buckets:
            df[list(buckets)] += 1
    n = len(corpus)
    weights = np.log((1.0 + n) / (1.0 + df)) + 1.0
    return IdfTable(weights=weights, doc_count=n)


@dataclass(frozen=True)
class SparseVector:
    """Sorted sparse vector of one document.

    indices are strictly increasing bucket positions below dim; values
    are the matching nonzero weights.
    """

    indices: np.ndarray
    values: np.ndarray
    dim: int

    @property
    def nnz(self) -> int:
        return int(self.indices.shape[0])


def empty_vector(dim: int) -> SparseVector:
    return SparseVector(
        indices=np.zeros(0, dtype=np.int64), values=np.zeros(0, dtype=np.float64), dim=dim
    )


def vectorize(
    text: str, config: FeatureConfig = DEFAULT_FEATURES, idf: IdfTable | None = None
) -> SparseVector:
    """Hashed gram counts, IDF-weighted, L2 normalized.

    With no idf table the raw counts are normalized directly.  Text with
    no grams yields the empty vector.
    """
    if idf is not None and idf.dim != config.dim:
        raise ValueError(f"idf table dim {idf.dim} != config dim {config.dim}")
    grams = char_ngrams(text, config)
    if not grams:
        return empty_vector(config.dim)
    buckets: dict[int, float] = {}
    for gram, count in grams.items():
        j = hash_index(gram, config)
        buckets[j] = buckets.get(j, 0.0) + float(count)
    indices = np.array(sorted(buckets), dtype=np.int64)
    values = np.array([buckets[int(j)] for j in indices], dtype=np.float64)
    if idf is not None:
        values = values * idf.weights[indices]
    norm = float(np.sqrt(np.dot(values, values)))
    values = values / norm
    return SparseVector(indices=indices, values=values, dim=config.dim)


def save_idf(table: IdfTable, path: str) -> None:
    """Binary layout: magic, u32 dim, u64 doc_count, dim little-endian
    float64 weights."""
    with open(path, "wb") as fh:
        fh.write(IDF_MAGIC)
        fh.write(struct.pack("<IQ", table.dim, table.doc_count))
        fh.write(table.weights.astype("<f8").tobytes())


def load_idf(path: str) -> IdfTable:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(IDF_MAGIC)] != IDF_MAGIC:
        raise ValueError(f"{path}: not an idf table (bad magic)")
    offset = len(IDF_MAGIC)
    dim, doc_count = struct.unpack_from("<IQ", blob, offset)
    offset += struct.calcsize("<IQ")
    expected = offset + 8 * dim
    if len(blob) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(blob)}")
    weights = np.frombuffer(blob, dtype="<f8", count=dim, offset=offset).copy()
    return IdfTable(weights=weights, doc_count=doc_count)
