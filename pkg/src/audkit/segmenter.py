"""Segment boundaries from label discontinuities, and segment/label plumbing.

A boundary is a frame index t where label(t) != label(t-1). Utterance
start (0) and end (T) are never internal boundaries: they are trivially
shared by hypothesis and reference, so emitting them would inflate the
boundary F-score.
"""

from dataclasses import dataclass

from .errors import DataError, DimensionError
from .featio import Alignment, FrameMatrix


@dataclass(frozen=True)
class Segmentation:
    """Internal boundary frames of one utterance; defines len(boundaries)+1 segments."""

    utt_id: str
    boundaries: tuple
    n_frames: int

    def __init__(self, utt_id: str, boundaries, n_frames: int):
        boundaries = tuple(int(b) for b in boundaries)
        if any(b2 <= b1 for b1, b2 in zip(boundaries, boundaries[1:])):
            raise DataError(f"{utt_id}: boundaries not strictly increasing: {boundaries}")
        if boundaries and not (0 < boundaries[0] and boundaries[-1] < n_frames):
            raise DataError(f"{utt_id}: boundaries must satisfy 0 < b < T={n_frames}")
        if n_frames < 1:
            raise DataError(f"{utt_id}: n_frames must be >= 1")
        object.__setattr__(self, "utt_id", utt_id)
        object.__setattr__(self, "boundaries", boundaries)
        object.__setattr__(self, "n_frames", n_frames)

    @property
    def n_segments(self) -> int:
        return len(self.boundaries) + 1

    def segments(self):
        """(start, end) pairs tiling [0, T)."""
        edges = (0,) + self.boundaries + (self.n_frames,)
        return list(zip(edges[:-1], edges[1:]))

    def to_alignment(self, label: str = "_") -> Alignment:
        """Label-free alignment carrier (used when persisting a segmentation)."""
        return Alignment(self.utt_id, [(s, e, label) for s, e in self.segments()])

    @classmethod
    def from_alignment(cls, al: Alignment) -> "Segmentation":
        """Entry starts become boundaries; labels are ignored (no fusing)."""
        return cls(al.utt_id, [start for start, _, _ in al.entries[1:]], al.n_frames)


def merge_adjacent_units(units: Alignment) -> Alignment:
    """Collapse maximal runs of consecutive equal-label entries. Idempotent."""
    merged = []
    for start, end, label in units.entries:
        if merged and merged[-1][2] == label:
            merged[-1] = (merged[-1][0], end, label)
        else:
            merged.append((start, end, label))
    return Alignment(units.utt_id, merged)


def boundaries_from_labels(labels: Alignment) -> Segmentation:
    """Boundaries at label discontinuities (equal-label neighbors fused first)."""
    merged = merge_adjacent_units(labels)
    return Segmentation(labels.utt_id, [s for s, _, _ in merged.entries[1:]], labels.n_frames)


def extract_segments(features: FrameMatrix, seg: Segmentation):
    """Slice the feature matrix into per-segment sub-matrices.

    Returns (start, end, sub-matrix) triples whose concatenation reproduces
    the input exactly.
    """
    if seg.n_frames != features.n_frames:
        raise DimensionError(
            f"{features.utt_id}: segmentation covers {seg.n_frames} frames, "
            f"features have {features.n_frames}"
        )
    return [(s, e, features.values[s:e]) for s, e in seg.segments()]


def broadcast_to_frames(units: Alignment) -> list[str]:
    """Per-frame label sequence of length T."""
    out = []
    for start, end, label in units.entries:
        out.extend([label] * (end - start))
    return out
