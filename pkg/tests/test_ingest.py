import json
import threading

import numpy as np
import pytest

from emoscope.ingest import (
    BundleManifest,
    CorpusStore,
    ParseError,
    ValidationError,
    load_bundle,
    mask_laughter,
    write_bundle,
)
from emoscope.model import AudioTrack, EmotionDistribution, TimeSpan
from helpers import dist, frames_of, make_segment, make_video, random_video


def write_raw_bundle(d, meta, frames, segments, laughter=None):
    d.mkdir(parents=True, exist_ok=True)
    (d / "meta.json").write_text(json.dumps(meta))
    (d / "frames.jsonl").write_text("\n".join(json.dumps(f) for f in frames) + "\n")
    (d / "segments.json").write_text(json.dumps(segments))
    if laughter is not None:
        (d / "laughter.json").write_text(json.dumps(laughter))


META = {"id": "demo", "title": "Demo talk", "category": "Test", "duration": 10.0, "frameRate": 10.0}


def two_segment_bundle(d):
    write_raw_bundle(
        d,
        META,
        [
            {"t": 0.1, "faceDetected": True, "emotions": {"neutral": 0.8}},
            {"t": 0.2, "faceDetected": False, "emotions": {}},
            {"t": 4.5, "faceDetected": True, "emotions": {"happiness": 0.7}, "box": [0.1, 0.1, 0.4, 0.5]},
        ],
        [
            {"id": 0, "start": 0.0, "end": 2.0, "text": "hello there",
             "words": [{"w": "hello", "start": 0.0, "end": 0.9}, {"w": "there", "start": 1.0, "end": 1.8}],
             "textEmotion": {"neutral": 0.9}, "audioEmotion": {"neutral": 0.6}},
            {"id": 1, "start": 4.0, "end": 6.0, "text": "big news",
             "words": [{"w": "big", "start": 4.0, "end": 4.8}, {"w": "news", "start": 4.9, "end": 5.5}],
             "textEmotion": {"happiness": 0.8}, "audioEmotion": {"surprise": 0.5}},
        ],
    )


def test_load_two_segment_fixture(tmp_path):
    two_segment_bundle(tmp_path / "demo")
    record = load_bundle(tmp_path / "demo")
    assert record.id == "demo"
    assert record.duration == 10.0
    assert len(record.segments) == 2
    assert len(record.frames) == 3
    assert record.segments[1].words[0].text == "big"
    assert record.audio is None


def test_load_sorts_unsorted_frames(tmp_path):
    d = tmp_path / "demo"
    two_segment_bundle(d)
    lines = (d / "frames.jsonl").read_text().strip().splitlines()
    (d / "frames.jsonl").write_text("\n".join(reversed(lines)) + "\n")
    record = load_bundle(d)
    times = [f.timestamp for f in record.frames]
    assert times == sorted(times)


def test_load_rejects_overlapping_segments(tmp_path):
    d = tmp_path / "demo"
    write_raw_bundle(
        d,
        META,
        [],
        [
            {"id": 0, "start": 0.0, "end": 3.0, "text": "", "words": [],
             "textEmotion": {"neutral": 1.0}, "audioEmotion": {}},
            {"id": 1, "start": 2.5, "end": 5.0, "text": "", "words": [],
             "textEmotion": {"neutral": 1.0}, "audioEmotion": {}},
        ],
    )
    with pytest.raises(ValidationError) as err:
        load_bundle(d)
    # The report names the offending segment by id/path.
    assert any("segments[1]" in v.path for v in err.value.report.violations)
    assert any("segment 1 overlaps" in v.reason for v in err.value.report.violations)


def test_parse_error_carries_line(tmp_path):
    d = tmp_path / "demo"
    two_segment_bundle(d)
    (d / "frames.jsonl").write_text('{"t": 0.1, "faceDetected": true, "emotions": {}}\n{nope\n')
    with pytest.raises(ParseError) as err:
        load_bundle(d)
    assert err.value.line == 2


def test_load_is_deterministic(tmp_path):
    two_segment_bundle(tmp_path / "demo")
    a = load_bundle(tmp_path / "demo")
    b = load_bundle(tmp_path / "demo")
    assert a == b


def test_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    video = random_video(rng, max_segments=10, max_frames=120, video_id="rt")
    sine = np.round(0.4 * np.sin(np.arange(16000) * 0.05) * 32768) / 32768
    video = make_video(
        frames=video.frames, segments=video.segments, duration=video.duration,
        video_id="rt", laughter=video.laughter_spans,
        audio=AudioTrack(sine, 16000), check=True,
    )
    write_bundle(video, tmp_path / "rt")
    reloaded = load_bundle(tmp_path / "rt")
    assert reloaded == video
    # Second round trip is byte-stable too.
    write_bundle(reloaded, tmp_path / "rt2")
    for name in ("meta.json", "frames.jsonl", "segments.json", "laughter.json", "audio.wav"):
        assert (tmp_path / "rt" / name).read_bytes() == (tmp_path / "rt2" / name).read_bytes()


# -- laughter masking ---------------------------------------------------------


def seg_with_audio(start, end):
    return make_segment(0, start, end, audio_emotion=dist(happiness=0.9),
                        text_emotion=dist(neutral=1.0))


def test_mask_laughter_clears_dominated_segment():
    # Overlap 3s of a 4s segment = 75% > 50%.
    segs = (seg_with_audio(0.0, 4.0),)
    out = mask_laughter(segs, (TimeSpan(1.0, 4.0),), threshold=0.5)
    assert out[0].audio_emotion.is_empty
    assert out[0].text_emotion == segs[0].text_emotion


def test_mask_laughter_keeps_small_overlap():
    # Overlap 0.1s of 4s = 2.5% <= 50%.
    segs = (seg_with_audio(0.0, 4.0),)
    out = mask_laughter(segs, (TimeSpan(3.9, 4.0),), threshold=0.5)
    assert out == segs


def test_mask_laughter_no_spans_is_identity():
    segs = (seg_with_audio(0.0, 4.0),)
    assert mask_laughter(segs, ()) == segs


def test_mask_laughter_exactly_at_threshold_keeps():
    # Exactly 50% is not "more than" the threshold.
    segs = (seg_with_audio(0.0, 4.0),)
    assert mask_laughter(segs, (TimeSpan(0.0, 2.0),)) == segs


def test_mask_laughter_idempotent_fuzz():
    rng = np.random.default_rng(13)
    for trial in range(20):
        video = random_video(rng, max_segments=12, max_frames=0, video_id=f"f{trial}")
        once = mask_laughter(video.segments, video.laughter_spans)
        twice = mask_laughter(once, video.laughter_spans)
        assert once == twice


def test_mask_laughter_counts_overlapping_spans_once():
    # Two identical 1.2s spans still cover only 30% of the segment.
    segs = (seg_with_audio(0.0, 4.0),)
    spans = (TimeSpan(0.0, 1.2), TimeSpan(0.0, 1.2))
    assert mask_laughter(segs, spans) == segs


# -- corpus store -------------------------------------------------------------


def test_store_ingest_and_reload(tmp_path):
    two_segment_bundle(tmp_path / "demo")
    store = CorpusStore(tmp_path / "store")
    record = store.ingest(tmp_path / "demo")
    assert store.ids() == ["demo"]
    fresh = CorpusStore(tmp_path / "store")
    assert fresh.get("demo") == record


def test_store_ingest_applies_masking(tmp_path):
    d = tmp_path / "laughy"
    write_raw_bundle(
        d,
        {"id": "laughy", "title": "t", "category": "c", "duration": 10.0, "frameRate": 10.0},
        [],
        [{"id": 0, "start": 0.0, "end": 4.0, "text": "", "words": [],
          "textEmotion": {"neutral": 1.0}, "audioEmotion": {"happiness": 0.9}}],
        laughter=[{"start": 1.0, "end": 4.0}],
    )
    store = CorpusStore(tmp_path / "store")
    record = store.ingest(d)
    assert record.segments[0].audio_emotion.is_empty
    # Masking is persisted: a fresh scan sees the cleared channel.
    assert CorpusStore(tmp_path / "store").get("laughy").segments[0].audio_emotion.is_empty


def test_store_derived_single_flight(tmp_path):
    two_segment_bundle(tmp_path / "demo")
    store = CorpusStore(tmp_path / "store")
    store.ingest(tmp_path / "demo")

    calls = []
    barrier = threading.Barrier(8)

    def build():
        calls.append(1)
        return {"value": 42}

    results = []

    def worker():
        barrier.wait()
        results.append(store.derived("demo", "thing", {}, build))

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(calls) == 1
    assert all(r == {"value": 42} for r in results)


def test_store_disk_cache_round_trip(tmp_path):
    two_segment_bundle(tmp_path / "demo")
    store = CorpusStore(tmp_path / "store")
    store.ingest(tmp_path / "demo")
    body = store.derived("demo", "summaryish", {"x": 1}, lambda: {"a": [1, 2]}, cache_json=True)
    # A fresh store with the same bytes reads the cached JSON without building.
    fresh = CorpusStore(tmp_path / "store")
    got = fresh.derived("demo", "summaryish", {"x": 1}, lambda: pytest.fail("rebuilt"), cache_json=True)
    assert got == body


def test_manifest_requires_core_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        BundleManifest.from_dir(tmp_path)
