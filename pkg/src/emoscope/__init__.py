"""Emotion coherence analytics for presentation videos.

Quantifies how well the face, text and audio channels of a talk agree,
at video, sentence and word/frame granularity, and exposes the derived
models (summary barcodes, channel flow graph, sentence projection, word
statistics, prosody) over an HTTP service.
"""

from .model import (
    CATEGORIES,
    EmotionCategory,
    EmotionDistribution,
    FrameAnnotation,
    NoDetection,
    Segment,
    TimeSpan,
    VideoRecord,
    WordToken,
    dominant,
    validate,
)

__all__ = [
    "CATEGORIES",
    "EmotionCategory",
    "EmotionDistribution",
    "FrameAnnotation",
    "NoDetection",
    "Segment",
    "TimeSpan",
    "VideoRecord",
    "WordToken",
    "dominant",
    "validate",
]

__version__ = "0.1.0"
