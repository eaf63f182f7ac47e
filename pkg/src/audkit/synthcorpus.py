"""Synthetic corpora with known phone structure, and gold-alignment corruption.

The generative model is deliberately the k-means modeling assumption:
one Gaussian blob per phone (centroid drawn once per corpus, isotropic
noise per frame), so a clean corpus is an exact oracle for clustering
metrics. Corruption simulates an imperfect external label stream by
jittering boundaries and substituting labels.

Randomness: PCG64 streams derived via seeding.derive_seed. The centroid
stream uses index 0 and utterance i uses index i+1, so utterances can be
generated in parallel without changing the output.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .featio import Alignment, FeatureArchive, FrameMatrix
from .seeding import derive_seed, make_rng


@dataclass(frozen=True)
class SynthSpec:
    """Corpus shape: P phone blobs in d dimensions over n_utts utterances."""

    n_phones: int
    dim: int
    n_utts: int
    phones_per_utt: tuple  # inclusive (lo, hi)
    dur_frames: tuple      # inclusive (lo, hi), in frames
    noise_sigma: float
    centroid_scale: float = 10.0
    frame_shift_ms: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.n_phones < 2:
            raise DataError(f"n_phones must be >= 2, got {self.n_phones}")
        if self.dim < 1 or self.n_utts < 1:
            raise DataError("dim and n_utts must be positive")
        for name in ("phones_per_utt", "dur_frames"):
            lo, hi = getattr(self, name)
            if not (1 <= lo <= hi):
                raise DataError(f"{name} range ({lo}, {hi}) invalid: need 1 <= lo <= hi")
        if self.noise_sigma < 0:
            raise DataError(f"noise_sigma must be non-negative, got {self.noise_sigma}")
        if not (self.centroid_scale > 0):
            raise DataError(f"centroid_scale must be positive, got {self.centroid_scale}")


@dataclass(frozen=True)
class CorruptionSpec:
    """Boundary jitter of +-jitter_frames and label substitution at rate rho."""

    jitter_frames: int = 0
    substitution_rate: float = 0.0
    min_dur_frames: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.jitter_frames < 0:
            raise DataError(f"jitter_frames must be >= 0, got {self.jitter_frames}")
        if not (0.0 <= self.substitution_rate <= 1.0):
            raise DataError(f"substitution_rate {self.substitution_rate} outside [0, 1]")
        if self.min_dur_frames < 1:
            raise DataError(f"min_dur_frames must be >= 1, got {self.min_dur_frames}")


def phone_label(index: int, n_phones: int) -> str:
    """Zero-padded label so lexicographic order matches phone index order."""
    width = len(str(n_phones - 1))
    return f"p{index:0{width}d}"


def generate_corpus(spec: SynthSpec):
    """Draw a corpus; returns (FeatureArchive, list of gold Alignment).

    Centroid coordinates are independent uniform draws in
    [-centroid_scale, +centroid_scale]; each utterance is a uniformly
    random phone sequence with uniform per-phone durations; each frame is
    its phone's centroid plus isotropic Gaussian noise (noise_sigma).
    Bit-identical output for identical specs.
    """
    centroid_rng = make_rng(derive_seed(spec.seed, 0))
    centroids = centroid_rng.uniform(
        -spec.centroid_scale, spec.centroid_scale, size=(spec.n_phones, spec.dim)
    )

    utt_width = len(str(spec.n_utts - 1)) if spec.n_utts > 1 else 1
    archive = FeatureArchive(frame_shift_ms=spec.frame_shift_ms)
    alignments = []
    for i in range(spec.n_utts):
        rng = make_rng(derive_seed(spec.seed, i + 1))
        n_ph = int(rng.integers(spec.phones_per_utt[0], spec.phones_per_utt[1] + 1))
        phones = rng.integers(0, spec.n_phones, size=n_ph)
        durs = rng.integers(spec.dur_frames[0], spec.dur_frames[1] + 1, size=n_ph)
        total = int(durs.sum())
        frames = np.repeat(centroids[phones], durs, axis=0)
        frames = frames + rng.normal(0.0, spec.noise_sigma, size=(total, spec.dim))

        utt_id = f"u{i:0{utt_width}d}"
        archive.add(FrameMatrix(utt_id, frames.astype(np.float32)))
        entries = []
        start = 0
        for ph, dur in zip(phones, durs):
            entries.append((start, start + int(dur), phone_label(int(ph), spec.n_phones)))
            start += int(dur)
        alignments.append(Alignment(utt_id, entries))
    return archive, alignments


def corrupt_alignment(gold: Alignment, spec: CorruptionSpec, rng=None) -> Alignment:
    """Jitter internal boundaries and substitute labels; deterministic given seed.

    Each internal boundary b moves to b + u with u uniform in
    [-jitter_frames, +jitter_frames]; a move that would leave any segment
    shorter than min_dur_frames is discarded (that boundary keeps its gold
    position), which keeps the per-boundary displacement bound exact.
    Labels are then independently replaced with probability
    substitution_rate by a uniformly random *different* label from the
    utterance's own label set (never substituted when the set has one
    label). Utterance start/end never move; segment count is preserved.
    """
    if rng is None:
        rng = make_rng(spec.seed)
    gold_bounds = [start for start, _, _ in gold.entries[1:]]
    n_frames = gold.n_frames
    min_dur = spec.min_dur_frames

    new_bounds = []
    if spec.jitter_frames > 0 and gold_bounds:
        offsets = rng.integers(-spec.jitter_frames, spec.jitter_frames + 1,
                               size=len(gold_bounds))
        prev = 0
        for idx, g in enumerate(gold_bounds):
            next_gold = gold_bounds[idx + 1] if idx + 1 < len(gold_bounds) else n_frames
            p = g + int(offsets[idx])
            # Accept only if the segment to the left and the (gold-bounded)
            # segment to the right both keep min_dur; otherwise keep gold.
            if p - prev >= min_dur and next_gold - p >= min_dur:
                new_bounds.append(p)
            else:
                new_bounds.append(g)
            prev = new_bounds[-1]
    else:
        new_bounds = list(gold_bounds)

    labels = gold.labels()
    if spec.substitution_rate > 0:
        label_set = sorted(gold.label_set())
        new_labels = []
        for lab in labels:
            others = [x for x in label_set if x != lab]
            if others and rng.random() < spec.substitution_rate:
                new_labels.append(others[int(rng.integers(0, len(others)))])
            else:
                new_labels.append(lab)
        labels = new_labels

    edges = [0] + new_bounds + [n_frames]
    entries = [(edges[i], edges[i + 1], labels[i]) for i in range(len(labels))]
    return Alignment(gold.utt_id, entries)


def corrupt_corpus(golds, spec: CorruptionSpec) -> list[Alignment]:
    """Corrupt a collection, one derived RNG stream per utterance index."""
    return [
        corrupt_alignment(g, spec, rng=make_rng(derive_seed(spec.seed, i)))
        for i, g in enumerate(golds)
    ]
