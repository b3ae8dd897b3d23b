"""Canonical domain types for multimodal emotion records.

All timestamps and spans are in seconds from the start of the video.
Every type here is immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np


class NoDetection(ValueError):
    """An operation required a detection where none exists."""


class EmotionCategory(str, Enum):
    """Unified emotion category set shared by the face, text and audio channels.

    Declaration order is the canonical order; every deterministic
    tie-break in the engine walks categories in this order.  Contempt is
    representable in all channels even though only the face recognizer
    emits it.
    """

    ANGER = "anger"
    CONTEMPT = "contempt"
    DISGUST = "disgust"
    FEAR = "fear"
    HAPPINESS = "happiness"
    NEUTRAL = "neutral"
    SADNESS = "sadness"
    SURPRISE = "surprise"


CATEGORIES: tuple[EmotionCategory, ...] = tuple(EmotionCategory)
N_CATEGORIES = len(CATEGORIES)
_CATEGORY_INDEX = {c: i for i, c in enumerate(CATEGORIES)}


def category_index(category: EmotionCategory) -> int:
    """Position of a category in the canonical order."""
    return _CATEGORY_INDEX[category]


class EmotionDistribution:
    """Map category -> confidence in [0, 1].  Missing categories mean 0.

    A distribution with no positive confidence is "empty": it represents
    the absence of a detection.  Confidences are not required to sum
    to 1; the recognizers that produce them differ on that point.
    """

    __slots__ = ("_conf",)

    def __init__(self, confidences: Mapping[EmotionCategory | str, float] | None = None):
        conf: dict[EmotionCategory, float] = {}
        if confidences:
            for key, value in confidences.items():
                cat = key if isinstance(key, EmotionCategory) else EmotionCategory(key)
                conf[cat] = float(value)
        self._conf = MappingProxyType(conf)

    @classmethod
    def empty(cls) -> "EmotionDistribution":
        return cls()

    def get(self, category: EmotionCategory) -> float:
        return self._conf.get(category, 0.0)

    @property
    def is_empty(self) -> bool:
        return not any(v > 0.0 for v in self._conf.values())

    def as_vector(self) -> tuple[float, ...]:
        """Confidences in canonical category order (length 8)."""
        return tuple(self._conf.get(c, 0.0) for c in CATEGORIES)

    def items(self) -> Iterator[tuple[EmotionCategory, float]]:
        """Nonzero entries in canonical order."""
        for c in CATEGORIES:
            v = self._conf.get(c, 0.0)
            if v != 0.0:
                yield c, v

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmotionDistribution):
            return NotImplemented
        return self.as_vector() == other.as_vector()

    def __hash__(self) -> int:
        return hash(self.as_vector())

    def __repr__(self) -> str:
        inner = ", ".join(f"{c.value}={v:g}" for c, v in self.items())
        return f"EmotionDistribution({inner})"


def dominant(dist: EmotionDistribution) -> tuple[EmotionCategory, float]:
    """Category with maximal confidence; ties go to canonical order.

    Raises NoDetection for an empty distribution.  The result does not
    depend on the storage order of the mapping.
    """
    if dist.is_empty:
        raise NoDetection("empty distribution has no dominant emotion")
    best_cat = CATEGORIES[0]
    best_val = dist.get(best_cat)
    for cat in CATEGORIES[1:]:
        v = dist.get(cat)
        if v > best_val:
            best_cat, best_val = cat, v
    return best_cat, best_val


@dataclass(frozen=True)
class TimeSpan:
    """Half-open interval [start, end) in seconds; end must exceed start."""

    start: float
    end: float

    @property
    def duration(self) -> float:
        return self.end - self.start

    def contains(self, t: float) -> bool:
        return self.start <= t < self.end

    def overlap(self, other: "TimeSpan") -> float:
        """Length of the intersection, 0 when disjoint."""
        return max(0.0, min(self.end, other.end) - max(self.start, other.start))


@dataclass(frozen=True)
class FrameAnnotation:
    """One face-recognizer observation at a video timestamp."""

    timestamp: float
    face_detected: bool
    distribution: EmotionDistribution = field(default_factory=EmotionDistribution)
    bounding_box: tuple[float, float, float, float] | None = None  # normalized [0,1]


@dataclass(frozen=True)
class WordToken:
    """One transcript word with its detected time span.  Original case kept."""

    text: str
    span: TimeSpan

    @property
    def normalized(self) -> str:
        """Lowercased form used by all word statistics."""
        return self.text.lower()


@dataclass(frozen=True)
class Segment:
    """One transcript segment: the engine's "sentence" unit.

    Text and audio emotions are uniform over the segment; ids are the
    0-based index in time order.
    """

    id: int
    span: TimeSpan
    text: str
    words: tuple[WordToken, ...]
    text_emotion: EmotionDistribution
    audio_emotion: EmotionDistribution

    @property
    def duration(self) -> float:
        return self.span.duration


class AudioTrack:
    """Mono audio samples in [-1, 1] with their sample rate."""

    __slots__ = ("samples", "sample_rate")

    def __init__(self, samples: np.ndarray, sample_rate: int):
        self.samples = np.asarray(samples, dtype=np.float64)
        self.sample_rate = int(sample_rate)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AudioTrack):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )

    def __repr__(self) -> str:
        return f"AudioTrack({len(self.samples)} samples @ {self.sample_rate} Hz)"


@dataclass(frozen=True)
class VideoRecord:
    """One ingested talk: metadata, annotations, optional raw audio."""

    id: str
    title: str
    category: str
    duration: float
    frame_rate: float
    frames: tuple[FrameAnnotation, ...]
    segments: tuple[Segment, ...]
    laughter_spans: tuple[TimeSpan, ...] = ()
    audio: AudioTrack | None = None

    def frame_times(self) -> np.ndarray:
        return np.array([f.timestamp for f in self.frames], dtype=np.float64)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    path: str
    reason: str

    def __str__(self) -> str:
        return f"{self.path}: {self.reason}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def _check_distribution(dist: EmotionDistribution, path: str, out: list[Violation]) -> None:
    for cat, value in dist.items():
        if not math.isfinite(value) or not (0.0 <= value <= 1.0):
            out.append(Violation(f"{path}.{cat.value}", f"confidence {value!r} outside [0, 1]"))


def _check_span(span: TimeSpan, duration: float, path: str, out: list[Violation]) -> None:
    if not (math.isfinite(span.start) and math.isfinite(span.end)):
        out.append(Violation(path, "span bounds not finite"))
        return
    if span.end <= span.start:
        out.append(Violation(path, "span inverted (end <= start)"))
    if span.start < 0 or span.end > duration:
        out.append(Violation(path, f"span [{span.start:g}, {span.end:g}] outside video [0, {duration:g}]"))


def validate(video: VideoRecord) -> ValidationReport:
    """Check every record invariant; the empty report means well-formed."""
    out: list[Violation] = []

    if not video.id:
        out.append(Violation("id", "empty video id"))
    if not (math.isfinite(video.duration) and video.duration > 0):
        out.append(Violation("duration", f"duration {video.duration!r} must be positive"))
    if not (math.isfinite(video.frame_rate) and video.frame_rate > 0):
        out.append(Violation("frameRate", f"frame rate {video.frame_rate!r} must be positive"))

    prev_t = -math.inf
    for i, frame in enumerate(video.frames):
        path = f"frames[{i}]"
        if not math.isfinite(frame.timestamp):
            out.append(Violation(path, "timestamp not finite"))
            continue
        if frame.timestamp <= prev_t:
            out.append(Violation(path, f"timestamp {frame.timestamp:g} not strictly increasing"))
        prev_t = frame.timestamp
        if frame.timestamp < 0 or frame.timestamp > video.duration:
            out.append(Violation(path, f"timestamp {frame.timestamp:g} outside video [0, {video.duration:g}]"))
        if frame.face_detected and frame.distribution.is_empty:
            out.append(Violation(path, "face detected but distribution empty"))
        if not frame.face_detected and not frame.distribution.is_empty:
            out.append(Violation(path, "no face detected but distribution non-empty"))
        _check_distribution(frame.distribution, f"{path}.emotions", out)
        if frame.bounding_box is not None:
            if len(frame.bounding_box) != 4 or any(
                not (math.isfinite(v) and 0.0 <= v <= 1.0) for v in frame.bounding_box
            ):
                out.append(Violation(f"{path}.box", "bounding box not in [0,1]^4"))

    prev_end = -math.inf
    for i, seg in enumerate(video.segments):
        path = f"segments[{i}]"
        if seg.id != i:
            out.append(Violation(f"{path}.id", f"id {seg.id} does not match time-order index {i}"))
        _check_span(seg.span, video.duration, f"{path}.span", out)
        if seg.span.start < prev_end:
            out.append(
                Violation(f"{path}.span", f"segment {seg.id} overlaps previous segment")
            )
        prev_end = max(prev_end, seg.span.end)
        _check_distribution(seg.text_emotion, f"{path}.textEmotion", out)
        _check_distribution(seg.audio_emotion, f"{path}.audioEmotion", out)

        prev_word_end = -math.inf
        for j, word in enumerate(seg.words):
            wpath = f"{path}.words[{j}]"
            if not word.text:
                out.append(Violation(wpath, "empty word text"))
            if word.span.end <= word.span.start:
                out.append(Violation(f"{wpath}.span", "span inverted (end <= start)"))
                continue
            if word.span.start < seg.span.start or word.span.end > seg.span.end:
                out.append(Violation(f"{wpath}.span", "word outside segment"))
            if word.span.start < prev_word_end:
                out.append(Violation(f"{wpath}.span", "word overlaps previous word"))
            prev_word_end = max(prev_word_end, word.span.end)

    for i, span in enumerate(video.laughter_spans):
        _check_span(span, video.duration, f"laughter[{i}]", out)

    if video.audio is not None and video.audio.sample_rate <= 0:
        out.append(Violation("audio.sampleRate", "sample rate must be positive"))

    return ValidationReport(tuple(out))
