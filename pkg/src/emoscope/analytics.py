"""Derived per-video models: summary barcode and sort metrics, the
augmented Sankey flow graph with embedded channel features, word
statistics and audio-feature histograms.

Everything here is a pure derivation over a VideoRecord and its
sentence fusions; the corpus store caches the results.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fusion import SentenceFusion, WordFusion, coherence_timeline, frames_in_span
from .model import (
    CATEGORIES,
    EmotionCategory,
    Segment,
    TimeSpan,
    VideoRecord,
    category_index,
    dominant,
)
from .prosody import FEATURES, ProsodySeries

CHANNELS = ("face", "text", "audio")
DEFAULT_HISTOGRAM_BINS = 20
DEFAULT_TOP_TERMS = 30
EMOTION_TERM_WEIGHT = 2.0


class UsageError(ValueError):
    """A caller-supplied parameter is outside the supported set."""


class NoFaces(ValueError):
    """No detected face frame exists where one is required."""


def _load_wordlist(name: str) -> frozenset[str]:
    text = resources.files("emoscope.data").joinpath(name).read_text(encoding="utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


STOPWORDS = _load_wordlist("stopwords.txt")
EMOTION_LEXICON = _load_wordlist("emotion_lexicon.txt")


# ---------------------------------------------------------------------------
# Video summary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarcodeRun:
    """One colored stretch of a barcode row; None = nothing detected."""

    span: TimeSpan
    category: EmotionCategory | None


@dataclass(frozen=True)
class VideoSummary:
    video_id: str
    title: str
    category: str
    duration: float
    face_runs: tuple[BarcodeRun, ...]  # per-frame runs, merged
    text_runs: tuple[BarcodeRun, ...]  # one run per segment
    audio_runs: tuple[BarcodeRun, ...]
    coherence_line: tuple[tuple[int, int | None], ...]
    coherence_score: float | None  # mean of defined degrees, in [0, 2]
    diversity: int  # distinct categories among all channel dominants
    percentage: dict[str, dict[EmotionCategory, float]]  # channel -> cat -> fraction


def _face_runs(video: VideoRecord) -> tuple[BarcodeRun, ...]:
    """Merge consecutive frames with equal dominant category into runs."""
    if not video.frames:
        return ()
    runs: list[BarcodeRun] = []
    times = video.frame_times()
    ends = np.empty_like(times)
    ends[:-1] = times[1:]
    ends[-1] = max(video.duration, times[-1])
    for frame, start, end in zip(video.frames, times, ends):
        if end <= start:
            continue
        cat = dominant(frame.distribution)[0] if frame.face_detected else None
        if runs and runs[-1].category == cat and runs[-1].span.end == start:
            runs[-1] = BarcodeRun(TimeSpan(runs[-1].span.start, float(end)), cat)
        else:
            runs.append(BarcodeRun(TimeSpan(float(start), float(end)), cat))
    return tuple(runs)


def _channel_runs(fusions: Sequence[SentenceFusion], channel: str) -> tuple[BarcodeRun, ...]:
    runs = []
    for f in fusions:
        pick = f.text if channel == "text" else f.audio
        runs.append(BarcodeRun(f.span, pick[0] if pick is not None else None))
    return tuple(runs)


def build_summary(
    video: VideoRecord,
    fusions: tuple[SentenceFusion, ...],
    duration_weighted: bool = False,
) -> VideoSummary:
    """Barcode rows, coherence line, and the three sort metrics."""
    degrees = [(f.coherence, f.span.duration) for f in fusions if f.coherence is not None]
    if not degrees:
        score = None
    elif duration_weighted:
        total = sum(d for _, d in degrees)
        score = sum(c * d for c, d in degrees) / total if total > 0 else None
    else:
        score = sum(c for c, _ in degrees) / len(degrees)

    seen: set[EmotionCategory] = set()
    for f in fusions:
        for pick in (f.face, f.text, f.audio):
            if pick is not None:
                seen.add(pick[0])

    total_segment_time = sum(f.span.duration for f in fusions)
    percentage: dict[str, dict[EmotionCategory, float]] = {c: {} for c in CHANNELS}
    if total_segment_time > 0:
        for f in fusions:
            for channel, pick in (("face", f.face), ("text", f.text), ("audio", f.audio)):
                if pick is not None:
                    bucket = percentage[channel]
                    bucket[pick[0]] = bucket.get(pick[0], 0.0) + f.span.duration
        for channel in CHANNELS:
            percentage[channel] = {
                cat: t / total_segment_time
                for cat, t in sorted(percentage[channel].items(), key=lambda kv: category_index(kv[0]))
            }

    return VideoSummary(
        video_id=video.id,
        title=video.title,
        category=video.category,
        duration=video.duration,
        face_runs=_face_runs(video),
        text_runs=_channel_runs(fusions, "text"),
        audio_runs=_channel_runs(fusions, "audio"),
        coherence_line=coherence_timeline(fusions),
        coherence_score=score,
        diversity=len(seen),
        percentage=percentage,
    )


# ---------------------------------------------------------------------------
# Augmented Sankey model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameRef:
    index: int  # position in VideoRecord.frames
    timestamp: float


@dataclass(frozen=True)
class SankeyNode:
    channel: str
    category: EmotionCategory
    total_duration: float
    sentence_ids: tuple[int, ...]


@dataclass(frozen=True)
class SankeyLink:
    source: EmotionCategory
    target: EmotionCategory
    total_duration: float
    sentence_ids: tuple[int, ...]


@dataclass(frozen=True)
class TreemapCell:
    """One face-node rectangle: weight and representative frame of a link."""

    link: tuple[EmotionCategory, EmotionCategory]  # (face, text)
    face_count: int  # detected frames contributed by the link's sentences
    representative: FrameRef


@dataclass(frozen=True)
class WeightedTerm:
    term: str
    weight: float


@dataclass(frozen=True)
class Histogram:
    """Normalized distribution of one audio feature over pooled samples."""

    feature: str
    edges: tuple[float, ...]  # bins+1 uniform edges over the video-global range
    counts: tuple[float, ...]  # sum to 1 unless empty
    empty: bool


@dataclass(frozen=True)
class SankeyModel:
    """Flow graph over the three channel columns.

    Only sentences with all three channel dominants participate; the
    rest are listed in `residuals`.  For every text node the incoming
    face-link durations, the outgoing audio-link durations and the node
    total are equal by construction.
    """

    video_id: str
    face_nodes: tuple[SankeyNode, ...]
    text_nodes: tuple[SankeyNode, ...]
    audio_nodes: tuple[SankeyNode, ...]
    face_text_links: tuple[SankeyLink, ...]
    text_audio_links: tuple[SankeyLink, ...]
    treemaps: dict[EmotionCategory, tuple[TreemapCell, ...]]  # per face node
    terms: dict[EmotionCategory, tuple[WeightedTerm, ...]]  # per text node
    histograms: dict[EmotionCategory, dict[str, Histogram]] | None  # per audio node
    residuals: tuple[int, ...]


def representative_face(
    video: VideoRecord, spans: Iterable[TimeSpan]
) -> FrameRef:
    """Detected frame nearest the centroid of the spans' emotion vectors.

    Distance is Euclidean over the 8-dim distribution vectors; ties go
    to the earliest timestamp.  Raises NoFaces when nothing is detected.
    """
    candidates: list[tuple[int, np.ndarray]] = []
    times = video.frame_times()
    for span in spans:
        lo = int(np.searchsorted(times, span.start, side="left"))
        hi = int(np.searchsorted(times, span.end, side="left"))
        for i in range(lo, hi):
            if video.frames[i].face_detected:
                candidates.append((i, np.array(video.frames[i].distribution.as_vector())))
    if not candidates:
        raise NoFaces("no detected face frame in the given spans")
    vectors = np.stack([v for _, v in candidates])
    centroid = vectors.mean(axis=0)
    dists = np.linalg.norm(vectors - centroid, axis=1)
    best = int(np.argmin(dists))  # argmin takes the first (earliest) minimum
    index = candidates[best][0]
    return FrameRef(index=index, timestamp=video.frames[index].timestamp)


def _clean_token(token: str) -> str:
    return token.lower().strip("\"'.,;:!?()[]{}<>-—…“”‘’")


def _segment_tokens(segment: Segment) -> list[str]:
    raw = [w.normalized for w in segment.words] if segment.words else segment.text.split()
    return [t for t in (_clean_token(tok) for tok in raw) if t]


def word_importance(
    segments: Iterable[Segment], top_n: int = DEFAULT_TOP_TERMS
) -> tuple[WeightedTerm, ...]:
    """Term weights for a sentence collection: tf x lexicon boost.

    Tokens are lowercased and stopword-filtered; emotion-lexicon words
    count double.  Top N by weight, ties in ascending term order.
    """
    tf: dict[str, int] = {}
    for segment in segments:
        for token in _segment_tokens(segment):
            if token in STOPWORDS:
                continue
            tf[token] = tf.get(token, 0) + 1
    weighted = [
        WeightedTerm(term, count * (EMOTION_TERM_WEIGHT if term in EMOTION_LEXICON else 1.0))
        for term, count in tf.items()
    ]
    weighted.sort(key=lambda t: (-t.weight, t.term))
    return tuple(weighted[:top_n])


def feature_histogram(
    spans: Iterable[TimeSpan],
    series: ProsodySeries,
    bins: int = DEFAULT_HISTOGRAM_BINS,
) -> Histogram:
    """Pool the spans' feature samples and bin them over the series'
    global [min, max] with uniform bins; counts normalized to 1."""
    if series.voiced is not None:
        global_values = series.values[series.voiced]
    else:
        global_values = series.values
    if len(global_values) == 0:
        edges = tuple(np.linspace(0.0, 1.0, bins + 1))
        return Histogram(series.feature, edges, (0.0,) * bins, empty=True)

    lo, hi = float(np.min(global_values)), float(np.max(global_values))
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5

    pooled: list[np.ndarray] = []
    for span in spans:
        mask = (series.times >= span.start) & (series.times < span.end)
        if series.voiced is not None:
            mask &= series.voiced
        pooled.append(series.values[mask])
    values = np.concatenate(pooled) if pooled else np.empty(0)

    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    total = counts.sum()
    if total == 0:
        return Histogram(series.feature, tuple(edges), (0.0,) * bins, empty=True)
    return Histogram(series.feature, tuple(edges), tuple(counts / total), empty=False)


def build_sankey(
    video: VideoRecord,
    fusions: tuple[SentenceFusion, ...],
    prosody_series: Mapping[str, ProsodySeries] | None = None,
    bins: int = DEFAULT_HISTOGRAM_BINS,
    top_terms: int = DEFAULT_TOP_TERMS,
) -> SankeyModel:
    """Aggregate fully-defined sentences into the two link stages and
    attach the per-node channel features."""
    full = [f for f in fusions if f.face and f.text and f.audio]
    residuals = tuple(f.segment_id for f in fusions if not (f.face and f.text and f.audio))
    segments_by_id = {s.id: s for s in video.segments}

    def collect_nodes(channel: str) -> tuple[SankeyNode, ...]:
        grouped: dict[EmotionCategory, list[SentenceFusion]] = {}
        for f in full:
            pick = {"face": f.face, "text": f.text, "audio": f.audio}[channel]
            assert pick is not None
            grouped.setdefault(pick[0], []).append(f)
        return tuple(
            SankeyNode(
                channel=channel,
                category=cat,
                total_duration=sum(f.span.duration for f in members),
                sentence_ids=tuple(f.segment_id for f in members),
            )
            for cat, members in sorted(grouped.items(), key=lambda kv: category_index(kv[0]))
        )

    def collect_links(get_pair) -> tuple[SankeyLink, ...]:
        grouped: dict[tuple[EmotionCategory, EmotionCategory], list[SentenceFusion]] = {}
        for f in full:
            grouped.setdefault(get_pair(f), []).append(f)
        ordered = sorted(
            grouped.items(),
            key=lambda kv: (category_index(kv[0][0]), category_index(kv[0][1])),
        )
        return tuple(
            SankeyLink(
                source=src,
                target=dst,
                total_duration=sum(f.span.duration for f in members),
                sentence_ids=tuple(f.segment_id for f in members),
            )
            for (src, dst), members in ordered
        )

    face_text = collect_links(lambda f: (f.face[0], f.text[0]))
    text_audio = collect_links(lambda f: (f.text[0], f.audio[0]))

    treemaps: dict[EmotionCategory, tuple[TreemapCell, ...]] = {}
    for link in face_text:
        spans = [segments_by_id[sid].span for sid in link.sentence_ids]
        count = sum(
            1
            for span in spans
            for frame in frames_in_span(video, span)
            if frame.face_detected
        )
        cell = TreemapCell(
            link=(link.source, link.target),
            face_count=count,
            representative=representative_face(video, spans),
        )
        treemaps.setdefault(link.source, ())
        treemaps[link.source] = treemaps[link.source] + (cell,)

    text_nodes = collect_nodes("text")
    terms = {
        node.category: word_importance(
            [segments_by_id[sid] for sid in node.sentence_ids], top_terms
        )
        for node in text_nodes
    }

    histograms: dict[EmotionCategory, dict[str, Histogram]] | None = None
    if prosody_series is not None:
        audio_nodes_tmp = collect_nodes("audio")
        histograms = {}
        for node in audio_nodes_tmp:
            spans = [segments_by_id[sid].span for sid in node.sentence_ids]
            histograms[node.category] = {
                feature: feature_histogram(spans, prosody_series[feature], bins)
                for feature in FEATURES
            }

    return SankeyModel(
        video_id=video.id,
        face_nodes=collect_nodes("face"),
        text_nodes=text_nodes,
        audio_nodes=collect_nodes("audio"),
        face_text_links=face_text,
        text_audio_links=text_audio,
        treemaps=treemaps,
        terms=terms,
        histograms=histograms,
        residuals=residuals,
    )


# ---------------------------------------------------------------------------
# Word table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WordStat:
    """Aggregate of every occurrence of one distinct (lowercased) word."""

    word: str
    frequency: int
    total_duration: float
    face_durations: dict[EmotionCategory, float]
    undetected_duration: float
    occurrences: tuple[tuple[int, TimeSpan], ...]  # (segment id, span)


WORD_SORT_KEYS = ("frequency", "duration")  # plus "category:<name>"


def word_table(
    word_fusions: tuple[WordFusion, ...],
    sort_key: str = "frequency",
    query: str = "",
) -> tuple[WordStat, ...]:
    """Aggregate word fusions by distinct word, filter and sort.

    Sort keys: "frequency", "duration", or "category:<emotion>" for the
    face time spent on one category.  Descending, ties by word.  The
    query filters by substring; stopwords stay in the table.
    """
    by_word: dict[str, list[WordFusion]] = {}
    for wf in word_fusions:
        by_word.setdefault(wf.word, []).append(wf)

    stats = []
    for word, occurrences in by_word.items():
        durations: dict[EmotionCategory, float] = {}
        for wf in occurrences:
            for cat, d in wf.face_durations.items():
                durations[cat] = durations.get(cat, 0.0) + d
        stats.append(
            WordStat(
                word=word,
                frequency=len(occurrences),
                total_duration=sum(wf.span.duration for wf in occurrences),
                face_durations=dict(
                    sorted(durations.items(), key=lambda kv: category_index(kv[0]))
                ),
                undetected_duration=sum(wf.undetected_duration for wf in occurrences),
                occurrences=tuple((wf.segment_id, wf.span) for wf in occurrences),
            )
        )

    if query:
        q = query.lower()
        stats = [s for s in stats if q in s.word]

    if sort_key == "frequency":
        stats.sort(key=lambda s: (-s.frequency, s.word))
    elif sort_key == "duration":
        stats.sort(key=lambda s: (-s.total_duration, s.word))
    elif sort_key.startswith("category:"):
        name = sort_key.split(":", 1)[1]
        try:
            cat = EmotionCategory(name)
        except ValueError:
            raise UsageError(f"unknown category {name!r} in sort key") from None
        stats.sort(key=lambda s: (-s.face_durations.get(cat, 0.0), s.word))
    else:
        raise UsageError(
            f"unknown sort key {sort_key!r}; expected frequency, duration or category:<emotion>"
        )
    return tuple(stats)
