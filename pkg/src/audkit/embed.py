"""Fixed-dimension segment embeddings: average and s-way downsampling.

The downsampling method cuts a segment of L frames into s consecutive
sub-segments with boundaries floor(i*L/s) (balanced integer partition)
and concatenates the per-sub-segment means, giving an s*d vector. With
s=1 this is exactly the average method. Segments shorter than s replicate
frames: slot i averages the single frame at min(floor(i*L/s), L-1).
Means accumulate in float64 regardless of storage precision.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, DimensionError, EmptySegmentError
from .segmenter import extract_segments

METHODS = ("avg", "ds")


@dataclass(frozen=True)
class EmbedConfig:
    method: str = "avg"
    s: int = 1
    znorm: bool = False  # optional per-dimension z-normalization of frames

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.s < 1:
            raise ConfigError(f"s must be >= 1, got {self.s}")
        if self.method == "avg" and self.s != 1:
            raise ConfigError("method 'avg' forces s=1")

    @property
    def effective_method(self) -> str:
        # s=1 downsampling is definitionally the average method
        return "avg" if self.s == 1 else "ds"

    @property
    def n_slots(self) -> int:
        return 1 if self.method == "avg" else self.s


@dataclass
class SegmentEmbeddingSet:
    """One embedding row per segment, with (utt_id, start, end) back-references."""

    dim: int
    rows: np.ndarray
    index: list

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2 or self.rows.shape[1] != self.dim:
            raise DimensionError(
                f"embedding rows have shape {self.rows.shape}, expected (*, {self.dim})"
            )
        if len(self.rows) != len(self.index):
            raise DimensionError(
                f"{len(self.rows)} rows but {len(self.index)} index entries"
            )
        if self.rows.size and not np.isfinite(self.rows).all():
            raise DataError("embedding rows contain non-finite values")

    def __len__(self):
        return len(self.index)


def _slot_mean(frames: np.ndarray, a: int, b: int) -> np.ndarray:
    return frames[a:b].mean(axis=0, dtype=np.float64)


def embed_segment(seg_frames, cfg: EmbedConfig) -> np.ndarray:
    """Embed one L x d segment into an (n_slots * d) float64 vector."""
    frames = np.asarray(seg_frames)
    if frames.ndim != 2:
        raise DimensionError(f"segment must be 2-D, got shape {frames.shape}")
    L = frames.shape[0]
    if L == 0:
        raise EmptySegmentError("cannot embed a zero-length segment")
    if cfg.method == "avg":
        return _slot_mean(frames, 0, L)
    s = cfg.s
    if L >= s:
        parts = [_slot_mean(frames, i * L // s, (i + 1) * L // s) for i in range(s)]
    else:
        parts = [_slot_mean(frames, min(i * L // s, L - 1), min(i * L // s, L - 1) + 1)
                 for i in range(s)]
    return np.concatenate(parts)


def embed_corpus(archive, segs, cfg: EmbedConfig) -> SegmentEmbeddingSet:
    """Embed every segment of every segmented utterance.

    Rows are ordered by archive (insertion) order, then segment order, so
    the output is deterministic regardless of how `segs` is collected.
    """
    seg_map = {s.utt_id: s for s in segs}
    missing = [u for u in seg_map if u not in archive]
    if missing:
        raise DimensionError(f"segmented utterances missing from archive: {sorted(missing)}")

    dim = cfg.n_slots * (archive.dim or 0)

    mu = sigma = None
    if cfg.znorm and len(archive) and seg_map:
        stacked = np.concatenate(
            [archive[u].values for u in archive.utt_ids() if u in seg_map]
        ).astype(np.float64)
        mu = stacked.mean(axis=0)
        sigma = stacked.std(axis=0)
        sigma[sigma == 0] = 1.0

    rows, index = [], []
    for utt_id in archive.utt_ids():
        if utt_id not in seg_map:
            continue
        utt = archive[utt_id]
        seg = seg_map[utt_id]
        if seg.n_frames != utt.n_frames:
            raise DimensionError(
                f"{utt_id}: segmentation covers {seg.n_frames} frames, "
                f"features have {utt.n_frames}"
            )
        values = utt.values
        if mu is not None:
            values = (values.astype(np.float64) - mu) / sigma
        for start, end, piece in extract_segments(
            type(utt)(utt_id, values) if mu is not None else utt, seg
        ):
            rows.append(embed_segment(piece, cfg))
            index.append((utt_id, start, end))

    rows_arr = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, dim))
    return SegmentEmbeddingSet(dim=dim, rows=rows_arr, index=index)
