"""Reading and writing of feature archives, alignments, and eval reports.

On-disk formats (all platform-independent):

AUDF feature archive (binary, little-endian)
    magic "AUDF" | version u32=1 | frame_shift_ms f64 | n_utts u32
    then per utterance:
    utt_id byte length u32 | utt_id UTF-8 bytes | T u32 | d u32 | T*d f32 row-major

Alignment file (UTF-8 text)
    one entry per line: `utt_id start_frame end_frame label`, single-space
    separated, no trailing whitespace; lines grouped by utterance and sorted
    by start_frame; '#'-prefixed lines are comments. end_frame is exclusive.

Eval report (JSON text)
    keys as in EvalReport; floats rendered with 6 decimal digits.
"""

import json
import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContiguityError,
    CoverageError,
    DataError,
    DimensionError,
    FormatError,
    IoError,
)

AUDF_MAGIC = b"AUDF"
AUDF_VERSION = 1

_U32 = struct.Struct("<I")
_F64 = struct.Struct("<d")


class FrameMatrix:
    """Per-utterance T x d matrix of frame-level feature vectors.

    Values are stored as float32 (the archive storage precision); one row
    per 10-ms-hop frame (hop configurable at the archive level).
    """

    __slots__ = ("utt_id", "values")

    def __init__(self, utt_id: str, values):
        if not utt_id:
            raise DataError("utt_id must be a non-empty string")
        values = np.asarray(values, dtype=np.float32)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DimensionError(
                f"{utt_id}: feature matrix must be 2-D with T >= 1 and d >= 1, "
                f"got shape {values.shape}"
            )
        if not np.isfinite(values).all():
            raise DataError(f"{utt_id}: feature matrix contains non-finite values")
        self.utt_id = utt_id
        self.values = values

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, FrameMatrix):
            return NotImplemented
        return self.utt_id == other.utt_id and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"FrameMatrix({self.utt_id!r}, T={self.n_frames}, d={self.dim})"


class FeatureArchive:
    """Ordered collection of FrameMatrix keyed by utt_id.

    Iteration order is insertion order. All utterances share one feature
    dimension; `dim` may be passed explicitly for an empty archive.
    """

    def __init__(self, utterances=(), frame_shift_ms: float = 10.0, dim: int | None = None):
        if not (frame_shift_ms > 0):
            raise DataError(f"frame_shift_ms must be positive, got {frame_shift_ms}")
        self.frame_shift_ms = float(frame_shift_ms)
        self._utts: dict[str, FrameMatrix] = {}
        self._dim = dim
        for utt in utterances:
            self.add(utt)

    def add(self, utt: FrameMatrix):
        if utt.utt_id in self._utts:
            raise DataError(f"duplicate utt_id {utt.utt_id!r} in archive")
        if self._dim is None:
            self._dim = utt.dim
        elif utt.dim != self._dim:
            raise DimensionError(
                f"{utt.utt_id}: dimension {utt.dim} differs from archive dimension {self._dim}"
            )
        self._utts[utt.utt_id] = utt

    @property
    def dim(self) -> int | None:
        return self._dim

    def utt_ids(self):
        return list(self._utts.keys())

    def __iter__(self):
        return iter(self._utts.values())

    def __len__(self):
        return len(self._utts)

    def __contains__(self, utt_id):
        return utt_id in self._utts

    def __getitem__(self, utt_id: str) -> FrameMatrix:
        return self._utts[utt_id]

    def __eq__(self, other):
        if not isinstance(other, FeatureArchive):
            return NotImplemented
        return (
            self.frame_shift_ms == other.frame_shift_ms
            and self.utt_ids() == other.utt_ids()
            and all(a == b for a, b in zip(self, other))
        )

    def __repr__(self):
        return f"FeatureArchive({len(self)} utts, d={self.dim}, shift={self.frame_shift_ms}ms)"


@dataclass(frozen=True)
class Alignment:
    """Contiguous labeled intervals over one utterance, in frames.

    Entries are (start_frame, end_frame, label) with exclusive end; they
    tile [0, T) without gaps or overlaps. Labels are opaque strings: the
    same type carries gold phone alignments, OOD-style label streams, and
    discovered-unit transcriptions.
    """

    utt_id: str
    entries: tuple

    def __init__(self, utt_id: str, entries):
        if not utt_id:
            raise DataError("utt_id must be a non-empty string")
        entries = tuple((int(s), int(e), str(lab)) for s, e, lab in entries)
        if not entries:
            raise DataError(f"{utt_id}: alignment must have at least one entry")
        if entries[0][0] != 0:
            raise ContiguityError(f"{utt_id}: first entry starts at {entries[0][0]}, expected 0")
        prev_end = 0
        for start, end, _ in entries:
            if start != prev_end:
                raise ContiguityError(
                    f"{utt_id}: entry starting at {start} does not follow previous end {prev_end}"
                )
            if start >= end:
                raise ContiguityError(f"{utt_id}: empty or inverted entry ({start}, {end})")
            prev_end = end
        object.__setattr__(self, "utt_id", utt_id)
        object.__setattr__(self, "entries", entries)

    @property
    def n_frames(self) -> int:
        return self.entries[-1][1]

    def labels(self):
        return [lab for _, _, lab in self.entries]

    def label_set(self):
        return set(self.labels())


@dataclass
class MetricRow:
    """Metrics of one k-means repetition."""

    nmi_pct: float
    precision_pct: float
    recall_pct: float
    fscore_pct: float
    n_hyp_boundaries: int
    n_ref_boundaries: int
    inertia: float | None = None

    def __post_init__(self):
        for name in ("nmi_pct", "precision_pct", "recall_pct", "fscore_pct"):
            v = getattr(self, name)
            if not (0.0 <= v <= 100.0):
                raise DataError(f"{name}={v} outside [0, 100]")
        if self.inertia is not None and self.inertia < 0:
            raise DataError(f"inertia must be non-negative, got {self.inertia}")


METRIC_FIELDS = (
    "nmi_pct",
    "precision_pct",
    "recall_pct",
    "fscore_pct",
    "n_hyp_boundaries",
    "n_ref_boundaries",
    "inertia",
)


@dataclass
class EvalReport:
    """Per-repetition metrics plus mean/std aggregates and a config echo."""

    config: dict
    per_rep: list
    mean: dict = field(default_factory=dict)
    std: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in self.std.values():
            if v is not None and v < 0:
                raise DataError(f"std must be non-negative, got {v}")


# ---------------------------------------------------------------------------
# AUDF feature archives
# ---------------------------------------------------------------------------


def _atomic_write(path, data: bytes):
    """Write bytes to path via a same-directory temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".audkit-tmp-")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e


def write_feature_archive(archive: FeatureArchive, path):
    """Serialize an archive to the AUDF binary format (atomic, byte-stable)."""
    parts = [AUDF_MAGIC, _U32.pack(AUDF_VERSION), _F64.pack(archive.frame_shift_ms),
             _U32.pack(len(archive))]
    for utt in archive:
        utt_bytes = utt.utt_id.encode("utf-8")
        parts.append(_U32.pack(len(utt_bytes)))
        parts.append(utt_bytes)
        parts.append(_U32.pack(utt.n_frames))
        parts.append(_U32.pack(utt.dim))
        parts.append(np.ascontiguousarray(utt.values, dtype="<f4").tobytes())
    _atomic_write(path, b"".join(parts))


class _Cursor:
    """Sequential reader with truncation checks."""

    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(f"{self.path}: truncated archive (needed {n} bytes at offset {self.pos})")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def f64(self) -> float:
        return _F64.unpack(self.take(8))[0]


def read_feature_archive(path) -> FeatureArchive:
    """Read an AUDF archive; round-trips bit-exactly with write_feature_archive."""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    cur = _Cursor(data, path)
    if cur.take(4) != AUDF_MAGIC:
        raise FormatError(f"{path}: bad magic, not an AUDF archive")
    version = cur.u32()
    if version != AUDF_VERSION:
        raise FormatError(f"{path}: unsupported AUDF version {version}")
    frame_shift_ms = cur.f64()
    if not (frame_shift_ms > 0) or not np.isfinite(frame_shift_ms):
        raise FormatError(f"{path}: invalid frame_shift_ms {frame_shift_ms}")
    n_utts = cur.u32()
    archive = FeatureArchive(frame_shift_ms=frame_shift_ms)
    for _ in range(n_utts):
        utt_id = cur.take(cur.u32()).decode("utf-8")
        n_frames = cur.u32()
        dim = cur.u32()
        if n_frames < 1 or dim < 1:
            raise FormatError(f"{path}: utterance {utt_id!r} has T={n_frames}, d={dim}")
        raw = cur.take(4 * n_frames * dim)
        values = np.frombuffer(raw, dtype="<f4").reshape(n_frames, dim)
        archive.add(FrameMatrix(utt_id, values))
    if cur.pos != len(data):
        raise FormatError(f"{path}: {len(data) - cur.pos} trailing bytes after archive")
    return archive


# ---------------------------------------------------------------------------
# Alignment files
# ---------------------------------------------------------------------------


def _check_token(token: str, what: str):
    if not token or any(c.isspace() for c in token):
        raise FormatError(f"{what} {token!r} is empty or contains whitespace")


def parse_alignment_file(path, expected_frames=None) -> list[Alignment]:
    """Parse an alignment file into one Alignment per utterance.

    Utterance blocks must be contiguous in the file. If expected_frames
    (a utt_id -> T map) is given, every parsed utterance must appear in it
    with matching total coverage, and every mapped utterance must appear
    in the file.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().split("\n")
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e

    per_utt: dict[str, list] = {}
    current = None
    for lineno, line in enumerate(lines, start=1):
        if not line or line.startswith("#"):
            continue
        if line != line.rstrip():
            raise FormatError(f"{path}:{lineno}: trailing whitespace")
        fields = line.split(" ")
        if len(fields) != 4 or any(not f for f in fields):
            raise FormatError(f"{path}:{lineno}: expected 'utt_id start end label', got {line!r}")
        utt_id, start_s, end_s, label = fields
        try:
            start, end = int(start_s), int(end_s)
        except ValueError:
            raise FormatError(f"{path}:{lineno}: non-integer frame index in {line!r}") from None
        if start < 0 or end < 0:
            raise FormatError(f"{path}:{lineno}: negative frame index")
        if utt_id != current:
            if utt_id in per_utt:
                raise FormatError(f"{path}:{lineno}: utterance {utt_id!r} not grouped contiguously")
            per_utt[utt_id] = []
            current = utt_id
        per_utt[utt_id].append((start, end, label))

    alignments = []
    for utt_id, entries in per_utt.items():
        if any(entries[i][0] > entries[i + 1][0] for i in range(len(entries) - 1)):
            raise FormatError(f"{path}: entries of {utt_id!r} not sorted by start_frame")
        alignments.append(Alignment(utt_id, entries))

    if expected_frames is not None:
        for al in alignments:
            if al.utt_id not in expected_frames:
                raise CoverageError(f"{path}: unexpected utterance {al.utt_id!r}")
            if al.n_frames != expected_frames[al.utt_id]:
                raise CoverageError(
                    f"{path}: {al.utt_id!r} covers {al.n_frames} frames, "
                    f"expected {expected_frames[al.utt_id]}"
                )
        missing = set(expected_frames) - {al.utt_id for al in alignments}
        if missing:
            raise CoverageError(f"{path}: missing utterances {sorted(missing)}")
    return alignments


def serialize_alignment(alignments, path):
    """Write alignments in file order; parse_alignment_file inverts this."""
    out = []
    for al in alignments:
        _check_token(al.utt_id, "utt_id")
        if al.utt_id.startswith("#"):
            raise FormatError(f"utt_id {al.utt_id!r} would be parsed as a comment")
        for start, end, label in al.entries:
            _check_token(label, "label")
            out.append(f"{al.utt_id} {start} {end} {label}\n")
    _atomic_write(path, "".join(out).encode("utf-8"))


# ---------------------------------------------------------------------------
# Eval reports
# ---------------------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not np.isfinite(x):
        raise DataError(f"cannot serialize non-finite value {x}")
    return f"{x + 0.0:.6f}"  # +0.0 normalizes -0.0


def _render_json(obj, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {_render_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise DataError(f"cannot serialize object of type {type(obj).__name__}")


def render_report_json(report: EvalReport) -> str:
    """Deterministic JSON text for a report (floats at 6 decimal digits)."""
    payload = {
        "config": report.config,
        "per_rep": [
            {name: getattr(row, name) for name in METRIC_FIELDS} for row in report.per_rep
        ],
        "mean": report.mean,
        "std": report.std,
    }
    return _render_json(payload, 0) + "\n"


def write_report(report: EvalReport, path):
    _atomic_write(path, render_report_json(report).encode("utf-8"))


def read_report(path) -> EvalReport:
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid report JSON: {e}") from e
    try:
        rows = [MetricRow(**row) for row in payload["per_rep"]]
        return EvalReport(config=payload["config"], per_rep=rows,
                          mean=payload["mean"], std=payload["std"])
    except (KeyError, TypeError) as e:
        raise FormatError(f"{path}: report missing required keys: {e}") from e
