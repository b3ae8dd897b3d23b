"""Multi-level fusion: sentence triples, coherence degrees, word and
frame alignment, and facial transition detection.

The three channels arrive at different granularities: text and audio
emotions per segment, face emotions per frame.  Sentence-level fusion
reduces the face channel to the most frequent per-frame dominant within
the sentence span; word-level fusion assigns frame intervals to words.

Frame i covers the half-open interval [t_i, t_{i+1}), with the last
frame extended to the end of the video.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .model import (
    CATEGORIES,
    EmotionCategory,
    EmotionDistribution,
    FrameAnnotation,
    Segment,
    TimeSpan,
    VideoRecord,
    dominant,
)

DEFAULT_MIN_HOLD_FRAMES = 3  # debounce against single-frame recognizer flicker


@dataclass(frozen=True)
class TransitionPoint:
    """A debounced change of the frame-level dominant facial emotion."""

    time: float
    before: EmotionCategory
    after: EmotionCategory
    word_index: int | None = None  # word whose span contains the time, if any


@dataclass(frozen=True)
class SentenceFusion:
    """Per-sentence channel dominants, coherence degree and transitions.

    The coherence degree is defined exactly when all three channels have
    a detection.  Channel distributions are kept alongside the dominants
    so downstream feature vectors can be derived from this record alone.
    """

    segment_id: int
    span: TimeSpan
    face: tuple[EmotionCategory, float] | None
    text: tuple[EmotionCategory, float] | None
    audio: tuple[EmotionCategory, float] | None
    face_distribution_mean: EmotionDistribution
    text_distribution: EmotionDistribution
    audio_distribution: EmotionDistribution
    coherence: int | None
    transitions: tuple[TransitionPoint, ...]
    frames_in_span: int
    detected_frames: int


@dataclass(frozen=True)
class WordFusion:
    """Per-word-occurrence face time split by category.

    face_durations plus undetected_duration always sums exactly to the
    word span duration: every instant is covered by one frame interval
    (dominant category or undetected frame) or by no frame at all.
    """

    word: str  # lowercased
    segment_id: int
    span: TimeSpan
    face_durations: dict[EmotionCategory, float]
    undetected_duration: float
    text_emotion: tuple[EmotionCategory, float] | None
    audio_emotion: tuple[EmotionCategory, float] | None


def coherence_degree(
    face: EmotionCategory, text: EmotionCategory, audio: EmotionCategory
) -> int:
    """Agreement of the three channel dominants: 2 all equal, 0 all
    distinct, 1 otherwise.  Symmetric in its arguments."""
    if face == text == audio:
        return 2
    if face != text and text != audio and face != audio:
        return 0
    return 1


def frames_in_span(video: VideoRecord, span: TimeSpan) -> tuple[FrameAnnotation, ...]:
    """Frames whose timestamp falls in [span.start, span.end)."""
    times = video.frame_times()
    lo = int(np.searchsorted(times, span.start, side="left"))
    hi = int(np.searchsorted(times, span.end, side="left"))
    return video.frames[lo:hi]


def sentence_face_emotion(
    frames: tuple[FrameAnnotation, ...],
) -> tuple[EmotionCategory, float] | None:
    """Most frequent per-frame dominant among detected frames.

    Confidence is the mean confidence of the winning category over the
    frames it won.  Ties break to the higher mean confidence, then to
    canonical category order.  None when no frame has a detected face.
    """
    counts: dict[EmotionCategory, int] = {}
    conf_sums: dict[EmotionCategory, float] = {}
    for frame in frames:
        if not frame.face_detected:
            continue
        cat, conf = dominant(frame.distribution)
        counts[cat] = counts.get(cat, 0) + 1
        conf_sums[cat] = conf_sums.get(cat, 0.0) + conf
    if not counts:
        return None
    best: EmotionCategory | None = None
    best_key = (-1, -1.0)
    for cat in CATEGORIES:
        if cat not in counts:
            continue
        key = (counts[cat], conf_sums[cat] / counts[cat])
        if key > best_key:
            best, best_key = cat, key
    assert best is not None
    return best, conf_sums[best] / counts[best]


def detect_transitions(
    frames: tuple[FrameAnnotation, ...],
    min_hold_frames: int = DEFAULT_MIN_HOLD_FRAMES,
) -> tuple[TransitionPoint, ...]:
    """Debounced change points of the frame-level dominant category.

    Runs of equal dominant category are taken over detected frames only;
    undetected frames neither break a run nor add to its length.  A
    transition fires at the first frame of a run of length >=
    min_hold_frames whose category differs from the last accepted run.
    """
    if min_hold_frames < 1:
        raise ValueError("min_hold_frames must be >= 1")
    runs: list[tuple[EmotionCategory, list[float]]] = []
    for frame in frames:
        if not frame.face_detected:
            continue
        cat, _ = dominant(frame.distribution)
        if runs and runs[-1][0] == cat:
            runs[-1][1].append(frame.timestamp)
        else:
            runs.append((cat, [frame.timestamp]))

    transitions: list[TransitionPoint] = []
    accepted: EmotionCategory | None = None
    for cat, times in runs:
        if len(times) < min_hold_frames:
            continue
        if accepted is not None and cat != accepted:
            transitions.append(TransitionPoint(time=times[0], before=accepted, after=cat))
        accepted = cat
    return tuple(transitions)


def _word_index_at(segment: Segment, time: float) -> int | None:
    for i, word in enumerate(segment.words):
        if word.span.contains(time):
            return i
    return None


def fuse_sentence(
    video: VideoRecord,
    segment: Segment,
    min_hold_frames: int = DEFAULT_MIN_HOLD_FRAMES,
) -> SentenceFusion:
    """Assemble the per-sentence fusion record for one segment."""
    frames = frames_in_span(video, segment.span)
    detected = [f for f in frames if f.face_detected]

    face = sentence_face_emotion(frames)
    text = None if segment.text_emotion.is_empty else dominant(segment.text_emotion)
    audio = None if segment.audio_emotion.is_empty else dominant(segment.audio_emotion)

    coherence = None
    if face is not None and text is not None and audio is not None:
        coherence = coherence_degree(face[0], text[0], audio[0])

    if detected:
        mean_vec = np.mean([f.distribution.as_vector() for f in detected], axis=0)
        face_mean = EmotionDistribution(
            {cat: float(v) for cat, v in zip(CATEGORIES, mean_vec) if v != 0.0}
        )
    else:
        face_mean = EmotionDistribution.empty()

    transitions = tuple(
        dataclasses.replace(t, word_index=_word_index_at(segment, t.time))
        for t in detect_transitions(frames, min_hold_frames)
    )

    return SentenceFusion(
        segment_id=segment.id,
        span=segment.span,
        face=face,
        text=text,
        audio=audio,
        face_distribution_mean=face_mean,
        text_distribution=segment.text_emotion,
        audio_distribution=segment.audio_emotion,
        coherence=coherence,
        transitions=transitions,
        frames_in_span=len(frames),
        detected_frames=len(detected),
    )


def fuse_video(
    video: VideoRecord, min_hold_frames: int = DEFAULT_MIN_HOLD_FRAMES
) -> tuple[SentenceFusion, ...]:
    return tuple(fuse_sentence(video, seg, min_hold_frames) for seg in video.segments)


def coherence_timeline(
    fusions: tuple[SentenceFusion, ...],
) -> tuple[tuple[int, int | None], ...]:
    """One (segment id, degree-or-None) point per sentence in id order."""
    return tuple((f.segment_id, f.coherence) for f in sorted(fusions, key=lambda f: f.segment_id))


def _frame_interval_bounds(video: VideoRecord) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame interval [start_i, end_i): next timestamp, last extends
    to video duration."""
    times = video.frame_times()
    if len(times) == 0:
        return times, times
    ends = np.empty_like(times)
    ends[:-1] = times[1:]
    ends[-1] = max(video.duration, times[-1])
    return times, ends


def fuse_words(video: VideoRecord) -> tuple[WordFusion, ...]:
    """Word-level alignment: per-category face time for every word occurrence.

    Each frame interval clipped to the word span contributes its length
    to the frame's dominant category (or to undetected when no face was
    found); span time covered by no frame is undetected as well.
    """
    starts, ends = _frame_interval_bounds(video)
    frame_cats: list[EmotionCategory | None] = [
        dominant(f.distribution)[0] if f.face_detected else None for f in video.frames
    ]

    out: list[WordFusion] = []
    for segment in video.segments:
        text = None if segment.text_emotion.is_empty else dominant(segment.text_emotion)
        audio = None if segment.audio_emotion.is_empty else dominant(segment.audio_emotion)
        for word in segment.words:
            durations: dict[EmotionCategory, float] = {}
            detected_total = 0.0
            if len(starts):
                lo = int(np.searchsorted(ends, word.span.start, side="right"))
                hi = int(np.searchsorted(starts, word.span.end, side="left"))
                for i in range(lo, hi):
                    cat = frame_cats[i]
                    if cat is None:
                        continue
                    overlap = min(ends[i], word.span.end) - max(starts[i], word.span.start)
                    if overlap > 0:
                        durations[cat] = durations.get(cat, 0.0) + overlap
                        detected_total += overlap
            out.append(
                WordFusion(
                    word=word.normalized,
                    segment_id=segment.id,
                    span=word.span,
                    face_durations=durations,
                    undetected_duration=max(0.0, word.span.duration - detected_total),
                    text_emotion=text,
                    audio_emotion=audio,
                )
            )
    return tuple(out)
