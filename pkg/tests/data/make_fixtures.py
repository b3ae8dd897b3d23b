"""Deterministically regenerate the bundled fixture corpus.

Run from the repo root:  python3 tests/data/make_fixtures.py

Three talks, each exercising specific machinery:

  eq1-talk      three equal segments with coherence degrees [2, 0, 1],
                tones per segment for prosody, laughter span below the
                masking threshold.
  deadpan-talk  ten segments forming two tight emotion clusters (ids
                0-3 vs 4-7) for projection brushing, one segment with
                no audio detection, one masked by laughter, real face
                transitions plus a flicker.
  mixed-talk    no audio file at all (NoAudio paths), one segment with
                no detected faces, five distinct emotions.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from emoscope.model import AudioTrack
from emoscope.prosody import write_wav

HERE = Path(__file__).parent
BUNDLES = HERE / "bundles"
RATE = 8000


def tone(freq: float, duration: float, amp: float) -> np.ndarray:
    t = np.arange(int(duration * RATE)) / RATE
    wave = amp * np.sin(2 * np.pi * freq * t)
    return np.round(wave * 32768) / 32768  # quantize so WAV round-trips exactly


def silence(duration: float) -> np.ndarray:
    return np.zeros(int(duration * RATE))


def write(bundle: str, meta: dict, frames: list, segments: list,
          laughter: list | None = None, audio: np.ndarray | None = None) -> None:
    d = BUNDLES / bundle
    d.mkdir(parents=True, exist_ok=True)
    (d / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    (d / "frames.jsonl").write_text("\n".join(json.dumps(f) for f in frames) + "\n")
    (d / "segments.json").write_text(json.dumps(segments, indent=1) + "\n")
    if laughter:
        (d / "laughter.json").write_text(json.dumps(laughter) + "\n")
    if audio is not None:
        write_wav(d / "audio.wav", AudioTrack(audio, RATE))
    print(f"{bundle}: {len(frames)} frames, {len(segments)} segments")


def frame(t: float, cat: str | None, conf: float) -> dict:
    if cat is None:
        return {"t": round(t, 3), "faceDetected": False, "emotions": {}}
    return {"t": round(t, 3), "faceDetected": True, "emotions": {cat: conf}}


def word_row(words: list[str], start: float, end: float) -> list[dict]:
    step = (end - start) / len(words)
    return [
        {"w": w, "start": round(start + i * step, 3), "end": round(start + (i + 0.9) * step, 3)}
        for i, w in enumerate(words)
    ]


def eq1_talk() -> None:
    segments = [
        {"id": 0, "start": 0.0, "end": 2.0, "text": "Good jokes land well today",
         "words": word_row(["good", "jokes", "land", "well", "today"], 0.0, 2.0),
         "textEmotion": {"happiness": 0.9}, "audioEmotion": {"happiness": 0.7}},
        {"id": 1, "start": 2.0, "end": 4.0, "text": "You have a grim angry tale",
         "words": word_row(["you", "have", "a", "grim", "angry", "tale"], 2.0, 4.0),
         "textEmotion": {"happiness": 0.9}, "audioEmotion": {"sadness": 0.7}},
        {"id": 2, "start": 4.0, "end": 6.0, "text": "Calm closing remarks now",
         "words": word_row(["calm", "closing", "remarks", "now"], 4.0, 6.0),
         "textEmotion": {"happiness": 0.9}, "audioEmotion": {"neutral": 0.7}},
    ]
    cats = ["happiness"] * 5 + ["anger"] * 5 + ["neutral"] * 5
    frames = [frame(i * 0.4, cat, 0.9) for i, cat in enumerate(cats)]
    audio = np.concatenate([
        tone(220, 2.0, 0.5), tone(120, 2.0, 0.12), tone(330, 2.0, 0.3), silence(0.5),
    ])
    write(
        "eq1-talk",
        {"id": "eq1-talk", "title": "Answering junk mail with style",
         "category": "Comedy", "duration": 6.5, "frameRate": 2.5},
        frames, segments,
        laughter=[{"start": 2.0, "end": 2.2}],  # 10% of segment 1: below threshold
        audio=audio,
    )


def deadpan_talk() -> None:
    rng = np.random.default_rng(2024)
    segments = []
    frames = []
    texts_a = [
        ["i", "tell", "happy", "stories", "flatly"],
        ["you", "laugh", "and", "i", "wait"],
        ["this", "joke", "has", "no", "face"],
        ["have", "fun", "with", "it"],
    ]
    texts_b = [
        ["the", "sad", "part", "comes", "now"],
        ["grief", "sits", "with", "you"],
        ["we", "mourn", "quietly", "together"],
        ["tears", "are", "fine", "here"],
    ]

    def span(k: int) -> tuple[float, float]:
        return k * 2.25, k * 2.25 + 2.0

    # Cluster A (ids 0-3): neutral face, happy text, neutral audio.
    for k in range(4):
        start, end = span(k)
        jitter = float(rng.uniform(-0.02, 0.02))
        segments.append({
            "id": k, "start": start, "end": end, "text": " ".join(texts_a[k]),
            "words": word_row(texts_a[k], start, end),
            "textEmotion": {"happiness": round(0.88 + jitter, 3)},
            "audioEmotion": {"neutral": round(0.80 + jitter, 3)},
        })
    # Cluster B (ids 4-7): sadness in all three channels (degree 2).
    for k in range(4, 8):
        start, end = span(k)
        jitter = float(rng.uniform(-0.02, 0.02))
        segments.append({
            "id": k, "start": start, "end": end, "text": " ".join(texts_b[k - 4]),
            "words": word_row(texts_b[k - 4], start, end),
            "textEmotion": {"sadness": round(0.85 + jitter, 3)},
            "audioEmotion": {"sadness": round(0.72 + jitter, 3)},
        })
    # id 8: the audio recognizer returned nothing.
    start, end = span(8)
    segments.append({
        "id": 8, "start": start, "end": end, "text": "a quiet aside happens",
        "words": word_row(["a", "quiet", "aside", "happens"], start, end),
        "textEmotion": {"neutral": 0.9}, "audioEmotion": {},
    })
    # id 9: laughter covers 80% of the span; ingest masks its audio.
    start, end = span(9)
    segments.append({
        "id": 9, "start": start, "end": end, "text": "you laugh so hard",
        "words": word_row(["you", "laugh", "so", "hard"], start, end),
        "textEmotion": {"happiness": 0.9}, "audioEmotion": {"happiness": 0.8},
    })

    # Frames at 10 fps.  Segment 0 carries a real transition out and back
    # (neutral x8, happiness x4, neutral x8); segment 1 a 1-frame flicker.
    def seg_frames(k: int, cats: list[str | None], conf: float) -> None:
        start, _ = span(k)
        for i, cat in enumerate(cats):
            frames.append(frame(start + i * 0.1, cat, conf))

    seg_frames(0, ["neutral"] * 8 + ["happiness"] * 4 + ["neutral"] * 8, 0.85)
    seg_frames(1, ["neutral"] * 9 + ["anger"] + ["neutral"] * 10, 0.85)
    seg_frames(2, ["neutral"] * 18 + [None] * 2, 0.85)
    seg_frames(3, ["neutral"] * 20, 0.85)
    for k in range(4, 8):
        seg_frames(k, ["sadness"] * 18 + [None] * 2, 0.8)
    seg_frames(8, ["neutral"] * 20, 0.85)
    seg_frames(9, ["neutral"] * 20, 0.85)

    # Audio: cluster A speaks low and loud, cluster B high and quiet.
    pieces = []
    for k in range(10):
        if k < 4:
            pieces.append(tone(150, 2.0, 0.45))
        elif k < 8:
            pieces.append(tone(320, 2.0, 0.15))
        else:
            pieces.append(tone(200, 2.0, 0.3))
        pieces.append(silence(0.25))
    pieces.append(silence(0.25))
    audio = np.concatenate(pieces)

    laughter = [{"start": span(9)[0] + 0.2, "end": span(9)[0] + 1.8}]  # 80% of id 9
    write(
        "deadpan-talk",
        {"id": "deadpan-talk", "title": "Quiet jokes and big laughs",
         "category": "Storytelling", "duration": 22.75, "frameRate": 10.0},
        frames, segments, laughter=laughter, audio=audio,
    )


def mixed_talk() -> None:
    segments = [
        {"id": 0, "start": 0.0, "end": 2.0, "text": "fury at the machine",
         "words": word_row(["fury", "at", "the", "machine"], 0.0, 2.0),
         "textEmotion": {"anger": 0.85}, "audioEmotion": {"anger": 0.75}},
        {"id": 1, "start": 2.5, "end": 4.5, "text": "but this delights me",
         "words": word_row(["but", "this", "delights", "me"], 2.5, 4.5),
         "textEmotion": {"happiness": 0.8}, "audioEmotion": {"surprise": 0.6}},
        {"id": 2, "start": 5.0, "end": 7.0, "text": "we smile and smile",
         "words": word_row(["we", "smile", "and", "smile"], 5.0, 7.0),
         "textEmotion": {"happiness": 0.9}, "audioEmotion": {"happiness": 0.7}},
        {"id": 3, "start": 7.5, "end": 9.5, "text": "a fearful hush falls",
         "words": word_row(["a", "fearful", "hush", "falls"], 7.5, 9.5),
         "textEmotion": {"fear": 0.7}, "audioEmotion": {"neutral": 0.6}},
    ]
    frames = []
    for i in range(8):
        frames.append(frame(0.0 + i * 0.25, "anger", 0.8))
    for i in range(8):
        frames.append(frame(2.5 + i * 0.25, "neutral", 0.9))
    for i in range(8):
        frames.append(frame(5.0 + i * 0.25, "happiness", 0.85))
    # Segment 3 has no detected faces at all.
    for i in range(8):
        frames.append(frame(7.5 + i * 0.25, None, 0.0))
    write(
        "mixed-talk",
        {"id": "mixed-talk", "title": "Three flavors of fury",
         "category": "Debate", "duration": 10.0, "frameRate": 4.0},
        frames, segments,
    )


if __name__ == "__main__":
    eq1_talk()
    deadpan_talk()
    mixed_talk()
