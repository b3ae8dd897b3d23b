"""JSON body shapes for the HTTP service and the export CLI.

One serializer per derived model; the service, the exporter and the
golden tests all share these, so there is exactly one wire format.
Category keys are the category value strings; NaN never appears (it
becomes null).
"""

from __future__ import annotations

import math
from typing import Any

from .analytics import Histogram, SankeyLink, SankeyModel, SankeyNode, VideoSummary, WordStat
from .fusion import SentenceFusion, TransitionPoint
from .ingest import _dist_dict
from .model import EmotionCategory, Segment, TimeSpan, VideoRecord
from .projection import ProjectionModel
from .prosody import ProsodySeries


def span_body(span: TimeSpan) -> dict[str, float]:
    return {"start": span.start, "end": span.end}


def pick_body(pick: tuple[EmotionCategory, float] | None) -> dict[str, Any] | None:
    if pick is None:
        return None
    return {"category": pick[0].value, "confidence": pick[1]}


def _cat_map(mapping: dict[EmotionCategory, float]) -> dict[str, float]:
    return {cat.value: value for cat, value in mapping.items()}


def summary_body(summary: VideoSummary) -> dict[str, Any]:
    def runs(rr):
        return [
            {"start": r.span.start, "end": r.span.end,
             "category": r.category.value if r.category else None}
            for r in rr
        ]

    return {
        "videoId": summary.video_id,
        "title": summary.title,
        "category": summary.category,
        "duration": summary.duration,
        "metrics": {
            "coherenceScore": summary.coherence_score,
            "diversity": summary.diversity,
            "percentage": {ch: _cat_map(m) for ch, m in summary.percentage.items()},
        },
        "coherenceLine": [
            {"segmentId": sid, "degree": degree} for sid, degree in summary.coherence_line
        ],
        "barcode": {
            "face": runs(summary.face_runs),
            "text": runs(summary.text_runs),
            "audio": runs(summary.audio_runs),
        },
    }


def _node_body(node: SankeyNode) -> dict[str, Any]:
    return {
        "category": node.category.value,
        "totalDuration": node.total_duration,
        "sentenceIds": list(node.sentence_ids),
    }


def _link_body(link: SankeyLink) -> dict[str, Any]:
    return {
        "from": link.source.value,
        "to": link.target.value,
        "totalDuration": link.total_duration,
        "sentenceIds": list(link.sentence_ids),
    }


def _histogram_body(h: Histogram) -> dict[str, Any]:
    return {
        "feature": h.feature,
        "edges": list(h.edges),
        "counts": list(h.counts),
        "empty": h.empty,
    }


def sankey_body(model: SankeyModel) -> dict[str, Any]:
    return {
        "videoId": model.video_id,
        "nodes": {
            "face": [_node_body(n) for n in model.face_nodes],
            "text": [_node_body(n) for n in model.text_nodes],
            "audio": [_node_body(n) for n in model.audio_nodes],
        },
        "links": {
            "faceText": [_link_body(l) for l in model.face_text_links],
            "textAudio": [_link_body(l) for l in model.text_audio_links],
        },
        "treemaps": {
            cat.value: [
                {
                    "link": {"from": cell.link[0].value, "to": cell.link[1].value},
                    "faceCount": cell.face_count,
                    "representative": {
                        "frameIndex": cell.representative.index,
                        "timestamp": cell.representative.timestamp,
                    },
                }
                for cell in cells
            ]
            for cat, cells in model.treemaps.items()
        },
        "terms": {
            cat.value: [{"term": t.term, "weight": t.weight} for t in terms]
            for cat, terms in model.terms.items()
        },
        "histograms": None
        if model.histograms is None
        else {
            cat.value: {feature: _histogram_body(h) for feature, h in by_feature.items()}
            for cat, by_feature in model.histograms.items()
        },
        "residuals": list(model.residuals),
    }


def projection_body(model: ProjectionModel) -> dict[str, Any]:
    def sector(s):
        return {"category": s.category.value if s.category else None, "radius": s.radius}

    return {
        "videoId": model.video_id,
        "params": {
            "mode": model.params.mode,
            "perplexity": model.params.perplexity,
            "iterations": model.params.iterations,
            "seed": model.params.seed,
            "learningRate": model.params.learning_rate,
        },
        "points": [
            {
                "segmentId": p.segment_id,
                "x": p.x,
                "y": p.y,
                "glyph": {
                    "face": sector(p.glyph.face),
                    "text": sector(p.glyph.text),
                    "audio": sector(p.glyph.audio),
                    "timeIndex": p.glyph.time_index,
                },
            }
            for p in model.points
        ],
    }


def transition_body(t: TransitionPoint) -> dict[str, Any]:
    return {
        "time": t.time,
        "before": t.before.value,
        "after": t.after.value,
        "wordIndex": t.word_index,
    }


def fusion_body(f: SentenceFusion) -> dict[str, Any]:
    return {
        "segmentId": f.segment_id,
        "span": span_body(f.span),
        "face": pick_body(f.face),
        "text": pick_body(f.text),
        "audio": pick_body(f.audio),
        "coherence": f.coherence,
        "transitions": [transition_body(t) for t in f.transitions],
        "framesInSpan": f.frames_in_span,
        "detectedFrames": f.detected_frames,
    }


def segment_body(seg: Segment) -> dict[str, Any]:
    return {
        "id": seg.id,
        "start": seg.span.start,
        "end": seg.span.end,
        "text": seg.text,
        "words": [{"w": w.text, "start": w.span.start, "end": w.span.end} for w in seg.words],
        "textEmotion": _dist_dict(seg.text_emotion),
        "audioEmotion": _dist_dict(seg.audio_emotion),
    }


def series_body(series: ProsodySeries) -> dict[str, Any]:
    samples = []
    for i in range(len(series)):
        value = float(series.values[i])
        sample: dict[str, Any] = {
            "t": float(series.times[i]),
            "value": None if math.isnan(value) else value,
        }
        if series.voiced is not None:
            sample["voiced"] = bool(series.voiced[i])
        if series.linear is not None:
            sample["linear"] = float(series.linear[i])
        samples.append(sample)
    return {"feature": series.feature, "hop": series.hop, "samples": samples}


def sentence_body(
    video: VideoRecord,
    fusions: tuple[SentenceFusion, ...],
    segment_id: int,
    prosody_slices: dict[str, ProsodySeries] | None,
    context: int = 2,
) -> dict[str, Any]:
    """Detail payload: the sentence, two neighbours each side, sliced
    prosody, transitions and per-channel confidence series."""
    by_id = {f.segment_id: f for f in fusions}
    fusion = by_id[segment_id]
    segment = video.segments[segment_id]

    lo = max(0, segment_id - context)
    hi = min(len(video.segments) - 1, segment_id + context)
    context_ids = [i for i in range(lo, hi + 1)]

    frames = [
        (i, f)
        for i, f in enumerate(video.frames)
        if segment.span.contains(f.timestamp) and f.face_detected
    ]
    face_conf = [
        {"t": f.timestamp, "value": max(f.distribution.as_vector())} for _, f in frames
    ]

    def channel_conf(pick_of):
        return [
            {
                "segmentId": i,
                "value": pick_of(by_id[i])[1] if pick_of(by_id[i]) is not None else None,
            }
            for i in context_ids
        ]

    return {
        "videoId": video.id,
        "segment": segment_body(segment),
        "fusion": fusion_body(fusion),
        "context": [
            {"segment": segment_body(video.segments[i]), "fusion": fusion_body(by_id[i])}
            for i in context_ids
        ],
        "prosody": None
        if prosody_slices is None
        else {feature: series_body(s) for feature, s in prosody_slices.items()},
        "confidence": {
            "face": face_conf,
            "text": channel_conf(lambda f: f.text),
            "audio": channel_conf(lambda f: f.audio),
        },
    }


def word_stat_body(stat: WordStat) -> dict[str, Any]:
    return {
        "word": stat.word,
        "frequency": stat.frequency,
        "totalDuration": stat.total_duration,
        "faceDurations": _cat_map(stat.face_durations),
        "undetectedDuration": stat.undetected_duration,
        "occurrences": [
            {"segmentId": sid, "start": span.start, "end": span.end}
            for sid, span in stat.occurrences
        ],
    }


def words_body(video_id: str, stats: tuple[WordStat, ...]) -> dict[str, Any]:
    return {"videoId": video_id, "words": [word_stat_body(s) for s in stats]}
