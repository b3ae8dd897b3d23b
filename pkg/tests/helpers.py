"""Synthetic video builders shared across the test modules.

`random_video` produces structurally valid records for fuzz loops; the
small `make_*` helpers build hand-specified fixtures.
"""

from __future__ import annotations

import numpy as np
import pytest

from emoscope.model import (
    CATEGORIES,
    EmotionCategory,
    EmotionDistribution,
    FrameAnnotation,
    Segment,
    TimeSpan,
    VideoRecord,
    WordToken,
    validate,
)


def assert_json_close(got, want, path="$", rel=1e-9, abs_tol=1e-12):
    """Recursive equality with tolerance on floats; everything else exact."""
    if isinstance(want, float) and isinstance(got, (int, float)):
        assert got == pytest.approx(want, rel=rel, abs=abs_tol), f"{path}: {got} != {want}"
    elif isinstance(want, dict):
        assert isinstance(got, dict) and set(got) == set(want), f"{path}: keys {set(got)} != {set(want)}"
        for key in want:
            assert_json_close(got[key], want[key], f"{path}.{key}", rel, abs_tol)
    elif isinstance(want, list):
        assert isinstance(got, list) and len(got) == len(want), f"{path}: length {len(got)} != {len(want)}"
        for i, (g, w) in enumerate(zip(got, want)):
            assert_json_close(g, w, f"{path}[{i}]", rel, abs_tol)
    else:
        assert got == want, f"{path}: {got!r} != {want!r}"


def dist(**confidences: float) -> EmotionDistribution:
    return EmotionDistribution({EmotionCategory(k): v for k, v in confidences.items()})


def frames_of(
    categories: list[str | None],
    start: float = 0.0,
    dt: float = 0.1,
    confidence: float = 0.9,
) -> tuple[FrameAnnotation, ...]:
    """One frame per entry; None means no face detected."""
    frames = []
    for i, cat in enumerate(categories):
        t = start + i * dt
        if cat is None:
            frames.append(FrameAnnotation(t, False))
        else:
            frames.append(
                FrameAnnotation(t, True, dist(**{cat: confidence}))
            )
    return tuple(frames)


def make_segment(
    seg_id: int,
    start: float,
    end: float,
    text: str = "",
    words: tuple[WordToken, ...] | None = None,
    text_emotion: EmotionDistribution | None = None,
    audio_emotion: EmotionDistribution | None = None,
) -> Segment:
    if words is None and text:
        tokens = text.split()
        step = (end - start) / len(tokens)
        words = tuple(
            WordToken(w, TimeSpan(start + i * step, start + (i + 1) * step))
            for i, w in enumerate(tokens)
        )
    return Segment(
        id=seg_id,
        span=TimeSpan(start, end),
        text=text,
        words=words or (),
        text_emotion=text_emotion if text_emotion is not None else EmotionDistribution.empty(),
        audio_emotion=audio_emotion if audio_emotion is not None else EmotionDistribution.empty(),
    )


def make_video(
    frames: tuple[FrameAnnotation, ...] = (),
    segments: tuple[Segment, ...] = (),
    duration: float | None = None,
    video_id: str = "vid",
    title: str = "A talk",
    category: str = "Test",
    laughter: tuple[TimeSpan, ...] = (),
    frame_rate: float = 10.0,
    audio=None,
    check: bool = True,
) -> VideoRecord:
    if duration is None:
        ends = [f.timestamp for f in frames] + [s.span.end for s in segments] + [1.0]
        duration = max(ends) + 0.5
    video = VideoRecord(
        id=video_id,
        title=title,
        category=category,
        duration=duration,
        frame_rate=frame_rate,
        frames=frames,
        segments=segments,
        laughter_spans=laughter,
        audio=audio,
    )
    if check:
        report = validate(video)
        assert report.ok, f"helper built an invalid video:\n{report}"
    return video


def eq1_video() -> VideoRecord:
    """Three equal-length segments engineered to coherence degrees [2, 0, 1]."""
    segs = (
        make_segment(0, 0.0, 2.0, text="good jokes land well",
                     text_emotion=dist(happiness=0.9), audio_emotion=dist(happiness=0.7)),
        make_segment(1, 2.0, 4.0, text="a grim angry tale",
                     text_emotion=dist(happiness=0.9), audio_emotion=dist(sadness=0.7)),
        make_segment(2, 4.0, 6.0, text="calm closing remarks",
                     text_emotion=dist(happiness=0.9), audio_emotion=dist(neutral=0.7)),
    )
    frames = (
        frames_of(["happiness"] * 5, start=0.0)
        + frames_of(["anger"] * 5, start=2.0)
        + frames_of(["neutral"] * 5, start=4.0)
    )
    return make_video(frames=frames, segments=segs, duration=6.5)


def random_distribution(rng: np.random.Generator, empty_p: float = 0.0) -> EmotionDistribution:
    if empty_p and rng.random() < empty_p:
        return EmotionDistribution.empty()
    n = int(rng.integers(1, 5))
    cats = rng.choice(len(CATEGORIES), size=n, replace=False)
    return EmotionDistribution(
        {CATEGORIES[int(c)]: float(rng.uniform(0.05, 1.0)) for c in cats}
    )


def random_video(
    rng: np.random.Generator,
    max_segments: int = 50,
    max_frames: int = 2000,
    video_id: str = "fuzz",
    with_laughter: bool = True,
) -> VideoRecord:
    n_seg = int(rng.integers(1, max_segments + 1))
    segments = []
    cursor = float(rng.uniform(0.0, 1.0))
    for i in range(n_seg):
        length = float(rng.uniform(0.5, 6.0))
        span = TimeSpan(cursor, cursor + length)
        n_words = int(rng.integers(0, 9))
        words = []
        if n_words:
            # Random non-overlapping word slots inside the span.
            cuts = np.sort(rng.uniform(span.start, span.end, size=2 * n_words))
            vocab = ("you", "this", "have", "story", "idea", "laugh", "today", "people")
            for j in range(n_words):
                w_start, w_end = float(cuts[2 * j]), float(cuts[2 * j + 1])
                if w_end - w_start < 1e-3:
                    continue
                words.append(
                    WordToken(str(rng.choice(vocab)), TimeSpan(w_start, w_end))
                )
        segments.append(
            Segment(
                id=i,
                span=span,
                text=" ".join(w.text for w in words),
                words=tuple(words),
                text_emotion=random_distribution(rng, empty_p=0.15),
                audio_emotion=random_distribution(rng, empty_p=0.15),
            )
        )
        cursor = span.end + float(rng.uniform(0.0, 1.5))
    duration = cursor + 0.5

    n_frames = int(rng.integers(0, max_frames + 1))
    gaps = rng.uniform(1e-3, 2.0 * duration / max(n_frames, 1), size=n_frames)
    times = np.cumsum(gaps)
    times = times[times < duration]
    frames = []
    for t in times:
        if rng.random() < 0.8:
            frames.append(FrameAnnotation(float(t), True, random_distribution(rng)))
        else:
            frames.append(FrameAnnotation(float(t), False))

    laughter = []
    if with_laughter:
        for _ in range(int(rng.integers(0, 4))):
            start = float(rng.uniform(0.0, duration - 0.2))
            laughter.append(TimeSpan(start, start + float(rng.uniform(0.1, 3.0))))
            laughter[-1] = TimeSpan(laughter[-1].start, min(laughter[-1].end, duration))

    video = VideoRecord(
        id=video_id,
        title=f"Fuzz talk {video_id}",
        category="Fuzz",
        duration=duration,
        frame_rate=10.0,
        frames=tuple(frames),
        segments=tuple(segments),
        laughter_spans=tuple(laughter),
    )
    report = validate(video)
    assert report.ok, f"random_video produced an invalid record:\n{report}"
    return video
