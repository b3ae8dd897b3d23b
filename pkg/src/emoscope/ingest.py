"""Bundle loading, laughter masking, and the corpus store.

A bundle is a directory describing one video:

    meta.json      {id, title, category, duration, frameRate}
    frames.jsonl   one frame per line: {t, faceDetected, box?, emotions{...}}
    segments.json  [{id, start, end, text, words:[{w, start, end}],
                     textEmotion{...}, audioEmotion{...}}]
    laughter.json  [{start, end}]            (optional)
    audio.wav      RIFF/WAVE PCM 16-bit      (optional)

Loading is deterministic: identical bytes produce a structurally
identical record, and a record written back out reloads equal.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

from . import prosody
from .model import (
    EmotionDistribution,
    FrameAnnotation,
    Segment,
    TimeSpan,
    ValidationReport,
    VideoRecord,
    WordToken,
    validate,
)

LAUGHTER_OVERLAP_THRESHOLD = 0.5  # fraction of segment duration

META_FILE = "meta.json"
FRAMES_FILE = "frames.jsonl"
SEGMENTS_FILE = "segments.json"
LAUGHTER_FILE = "laughter.json"
AUDIO_FILE = "audio.wav"


class ParseError(ValueError):
    """A bundle file is malformed; message carries file and position."""

    def __init__(self, path: Path, message: str, line: int | None = None):
        at = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{at}: {message}")
        self.path = path
        self.line = line


class ValidationError(ValueError):
    """A parsed bundle violates record invariants."""

    def __init__(self, video_id: str, report: ValidationReport):
        super().__init__(f"bundle {video_id!r} invalid:\n{report}")
        self.video_id = video_id
        self.report = report


@dataclass(frozen=True)
class BundleManifest:
    """Locations of one bundle's documents."""

    meta_path: Path
    frames_path: Path
    segments_path: Path
    laughter_path: Path | None = None
    audio_path: Path | None = None

    @classmethod
    def from_dir(cls, bundle_dir: str | Path) -> "BundleManifest":
        d = Path(bundle_dir)
        for name in (META_FILE, FRAMES_FILE, SEGMENTS_FILE):
            if not (d / name).is_file():
                raise FileNotFoundError(f"{d / name} missing from bundle")
        laughter = d / LAUGHTER_FILE
        audio = d / AUDIO_FILE
        return cls(
            meta_path=d / META_FILE,
            frames_path=d / FRAMES_FILE,
            segments_path=d / SEGMENTS_FILE,
            laughter_path=laughter if laughter.is_file() else None,
            audio_path=audio if audio.is_file() else None,
        )


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _load_json(path: Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.msg, line=exc.lineno) from exc


def _distribution(raw: Any, path: Path, where: str) -> EmotionDistribution:
    if raw is None:
        return EmotionDistribution.empty()
    if not isinstance(raw, dict):
        raise ParseError(path, f"{where}: expected an object of category confidences")
    try:
        return EmotionDistribution(raw)
    except ValueError as exc:
        raise ParseError(path, f"{where}: {exc}") from exc


def _span(raw: dict, path: Path, where: str) -> TimeSpan:
    try:
        return TimeSpan(float(raw["start"]), float(raw["end"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(path, f"{where}: bad span: {exc}") from exc


def _parse_frames(path: Path) -> list[FrameAnnotation]:
    frames: list[FrameAnnotation] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, exc.msg, line=lineno) from exc
            try:
                box = tuple(float(v) for v in raw["box"]) if raw.get("box") else None
                frames.append(
                    FrameAnnotation(
                        timestamp=float(raw["t"]),
                        face_detected=bool(raw["faceDetected"]),
                        distribution=_distribution(raw.get("emotions"), path, f"line {lineno}"),
                        bounding_box=box,
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(path, f"bad frame record: {exc}", line=lineno) from exc
    return frames


def _parse_segments(path: Path) -> list[Segment]:
    raw = _load_json(path)
    if not isinstance(raw, list):
        raise ParseError(path, "expected a top-level array of segments")
    segments = []
    for i, item in enumerate(raw):
        where = f"segments[{i}]"
        try:
            words = tuple(
                WordToken(str(w["w"]), _span(w, path, f"{where}.words"))
                for w in item.get("words", [])
            )
            segments.append(
                Segment(
                    id=int(item["id"]),
                    span=_span(item, path, where),
                    text=str(item.get("text", "")),
                    words=words,
                    text_emotion=_distribution(item.get("textEmotion"), path, f"{where}.textEmotion"),
                    audio_emotion=_distribution(item.get("audioEmotion"), path, f"{where}.audioEmotion"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(path, f"{where}: {exc}") from exc
    return segments


def load_bundle(source: str | Path | BundleManifest) -> VideoRecord:
    """Parse and validate one bundle into a VideoRecord.

    Frames come back sorted by timestamp and segments by start time;
    any invariant violation raises ValidationError with the full report.
    """
    manifest = source if isinstance(source, BundleManifest) else BundleManifest.from_dir(source)

    meta = _load_json(manifest.meta_path)
    if not isinstance(meta, dict):
        raise ParseError(manifest.meta_path, "expected a metadata object")
    try:
        video_id = str(meta["id"])
        title = str(meta.get("title", video_id))
        category = str(meta.get("category", ""))
        duration = float(meta["duration"])
        frame_rate = float(meta["frameRate"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(manifest.meta_path, f"bad metadata: {exc}") from exc

    frames = sorted(_parse_frames(manifest.frames_path), key=lambda f: f.timestamp)
    segments = sorted(_parse_segments(manifest.segments_path), key=lambda s: s.span.start)

    laughter: list[TimeSpan] = []
    if manifest.laughter_path is not None:
        raw = _load_json(manifest.laughter_path)
        if not isinstance(raw, list):
            raise ParseError(manifest.laughter_path, "expected an array of spans")
        laughter = [_span(item, manifest.laughter_path, f"laughter[{i}]") for i, item in enumerate(raw)]

    audio = prosody.read_wav(manifest.audio_path) if manifest.audio_path is not None else None

    record = VideoRecord(
        id=video_id,
        title=title,
        category=category,
        duration=duration,
        frame_rate=frame_rate,
        frames=tuple(frames),
        segments=tuple(segments),
        laughter_spans=tuple(laughter),
        audio=audio,
    )
    report = validate(record)
    if not report.ok:
        raise ValidationError(video_id, report)
    return record


# ---------------------------------------------------------------------------
# Serialization (round-trips with load_bundle)
# ---------------------------------------------------------------------------


def _dist_dict(dist: EmotionDistribution) -> dict[str, float]:
    return {cat.value: value for cat, value in dist.items()}


def write_bundle(record: VideoRecord, bundle_dir: str | Path) -> None:
    """Write a record back out in the bundle directory layout."""
    d = Path(bundle_dir)
    d.mkdir(parents=True, exist_ok=True)

    meta = {
        "id": record.id,
        "title": record.title,
        "category": record.category,
        "duration": record.duration,
        "frameRate": record.frame_rate,
    }
    (d / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")

    with open(d / FRAMES_FILE, "w", encoding="utf-8") as fh:
        for frame in record.frames:
            row: dict[str, Any] = {
                "t": frame.timestamp,
                "faceDetected": frame.face_detected,
                "emotions": _dist_dict(frame.distribution),
            }
            if frame.bounding_box is not None:
                row["box"] = list(frame.bounding_box)
            fh.write(json.dumps(row) + "\n")

    segments = [
        {
            "id": seg.id,
            "start": seg.span.start,
            "end": seg.span.end,
            "text": seg.text,
            "words": [{"w": w.text, "start": w.span.start, "end": w.span.end} for w in seg.words],
            "textEmotion": _dist_dict(seg.text_emotion),
            "audioEmotion": _dist_dict(seg.audio_emotion),
        }
        for seg in record.segments
    ]
    (d / SEGMENTS_FILE).write_text(json.dumps(segments, indent=1) + "\n", encoding="utf-8")

    if record.laughter_spans:
        spans = [{"start": s.start, "end": s.end} for s in record.laughter_spans]
        (d / LAUGHTER_FILE).write_text(json.dumps(spans) + "\n", encoding="utf-8")

    if record.audio is not None:
        prosody.write_wav(d / AUDIO_FILE, record.audio)


# ---------------------------------------------------------------------------
# Laughter masking
# ---------------------------------------------------------------------------


def _merge_spans(spans: Iterable[TimeSpan]) -> list[TimeSpan]:
    ordered = sorted(spans, key=lambda s: s.start)
    merged: list[TimeSpan] = []
    for span in ordered:
        if merged and span.start <= merged[-1].end:
            merged[-1] = TimeSpan(merged[-1].start, max(merged[-1].end, span.end))
        else:
            merged.append(span)
    return merged


def mask_laughter(
    segments: tuple[Segment, ...],
    laughter_spans: Iterable[TimeSpan],
    threshold: float = LAUGHTER_OVERLAP_THRESHOLD,
) -> tuple[Segment, ...]:
    """Clear the audio emotion of segments dominated by laughter.

    A segment whose overlap with laughter exceeds `threshold` of its
    duration gets an empty audio distribution; face and text channels
    are untouched.  Idempotent.
    """
    merged = _merge_spans(laughter_spans)
    if not merged:
        return segments
    out = []
    for seg in segments:
        overlap = sum(seg.span.overlap(ls) for ls in merged)
        if seg.duration > 0 and overlap / seg.duration > threshold and not seg.audio_emotion.is_empty:
            seg = Segment(
                id=seg.id,
                span=seg.span,
                text=seg.text,
                words=seg.words,
                text_emotion=seg.text_emotion,
                audio_emotion=EmotionDistribution.empty(),
            )
        out.append(seg)
    return tuple(out)


# ---------------------------------------------------------------------------
# Corpus store
# ---------------------------------------------------------------------------


def _bundle_digest(bundle_dir: Path) -> str:
    """Content hash over the bundle's files, order-independent of listing."""
    h = hashlib.sha256()
    for name in (META_FILE, FRAMES_FILE, SEGMENTS_FILE, LAUGHTER_FILE, AUDIO_FILE):
        p = bundle_dir / name
        if p.is_file():
            h.update(name.encode())
            h.update(p.read_bytes())
    return h.hexdigest()


def _params_digest(params: dict[str, Any]) -> str:
    return hashlib.sha256(json.dumps(params, sort_keys=True).encode()).hexdigest()[:16]


class CorpusStore:
    """On-disk corpus of ingested videos plus a derived-model cache.

    Layout under `root`:

        videos/<id>/   normalized bundle (masked audio emotions applied)
        cache/<id>/    derived models as JSON, content-addressed by
                       bundle digest + parameter digest

    One writer during ingestion, many concurrent readers afterwards.
    Derived entries fill lazily under a per-key single-flight lock.
    """

    def __init__(self, root: str | Path, laughter_threshold: float = LAUGHTER_OVERLAP_THRESHOLD):
        self.root = Path(root)
        self.laughter_threshold = laughter_threshold
        self._records: dict[str, VideoRecord] = {}
        self._digests: dict[str, str] = {}
        self._derived: dict[tuple, Any] = {}
        self._locks: dict[tuple, threading.Lock] = {}
        self._master = threading.Lock()
        if self.root.is_dir():
            self._scan()

    # -- ingestion ---------------------------------------------------------

    def ingest(self, bundle_dir: str | Path) -> VideoRecord:
        """Load, mask laughter, and persist one bundle into the store."""
        record = load_bundle(bundle_dir)
        masked = mask_laughter(record.segments, record.laughter_spans, self.laughter_threshold)
        record = VideoRecord(
            id=record.id,
            title=record.title,
            category=record.category,
            duration=record.duration,
            frame_rate=record.frame_rate,
            frames=record.frames,
            segments=masked,
            laughter_spans=record.laughter_spans,
            audio=record.audio,
        )
        target = self.root / "videos" / record.id
        if target.exists():
            shutil.rmtree(target)
        write_bundle(record, target)
        with self._master:
            self._records[record.id] = record
            self._digests[record.id] = _bundle_digest(target)
            # Derived models of a replaced video are stale.
            for key in [k for k in self._derived if k[0] == record.id]:
                del self._derived[key]
        return record

    def _scan(self) -> None:
        videos = self.root / "videos"
        if not videos.is_dir():
            return
        for bundle_dir in sorted(videos.iterdir()):
            if bundle_dir.is_dir():
                record = load_bundle(bundle_dir)
                self._records[record.id] = record
                self._digests[record.id] = _bundle_digest(bundle_dir)

    # -- reads -------------------------------------------------------------

    def ids(self) -> list[str]:
        return sorted(self._records)

    def __contains__(self, video_id: str) -> bool:
        return video_id in self._records

    def get(self, video_id: str) -> VideoRecord:
        try:
            return self._records[video_id]
        except KeyError:
            raise KeyError(f"unknown video {video_id!r}") from None

    def media_path(self, video_id: str) -> Path | None:
        self.get(video_id)
        p = self.root / "videos" / video_id / AUDIO_FILE
        return p if p.is_file() else None

    # -- derived-model cache -------------------------------------------------

    def derived(
        self,
        video_id: str,
        kind: str,
        params: dict[str, Any],
        build: Callable[[], Any],
        cache_json: bool = False,
    ) -> Any:
        """Compute-or-fetch a derived model for (video, kind, params).

        Keys include the bundle content digest, so reingesting identical
        bytes hits the same entries.  A missing entry is computed exactly
        once even under concurrent requests.  With `cache_json` the value
        (a JSON-able dict) is also persisted under cache/.
        """
        digest = self._digests[video_id]
        key = (video_id, kind, digest, _params_digest(params))
        with self._master:
            if key in self._derived:
                return self._derived[key]
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            with self._master:
                if key in self._derived:
                    return self._derived[key]
            value = None
            disk = self.root / "cache" / video_id / f"{kind}-{key[3]}-{digest[:16]}.json"
            if cache_json and disk.is_file():
                value = json.loads(disk.read_text(encoding="utf-8"))
            if value is None:
                value = build()
                if cache_json:
                    disk.parent.mkdir(parents=True, exist_ok=True)
                    disk.write_text(json.dumps(value), encoding="utf-8")
            with self._master:
                self._derived[key] = value
                self._locks.pop(key, None)
            return value
