"""Windowed audio features: pitch, intensity and amplitude series.

All three extractors share the same framing: windows of `window`
seconds advanced by `hop` seconds, one sample per full window, stamped
at the window center.  Series can be sliced by sentence span for the
detail views and pooled for the channel histograms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .model import AudioTrack, TimeSpan

DEFAULT_WINDOW = 0.040  # s
DEFAULT_HOP = 0.010  # s
DEFAULT_FMIN = 65.0  # Hz, low male f0
DEFAULT_FMAX = 500.0  # Hz, high female f0
VOICING_THRESHOLD = 0.5  # normalized autocorrelation peak
SILENCE_RMS = 1e-4  # -80 dB
DB_FLOOR = -80.0

FEATURES = ("pitch", "intensity", "amplitude")


class NoAudio(RuntimeError):
    """The bundle carries no audio, so prosody cannot be derived."""


@dataclass(frozen=True)
class ProsodySeries:
    """One windowed feature series.

    `values` is the feature value per window (Hz for pitch, dB for
    intensity, unitless envelope for amplitude).  Pitch windows carry a
    voicing flag and NaN where unvoiced; intensity additionally keeps
    the linear RMS alongside the dB value.
    """

    feature: str
    hop: float
    times: np.ndarray
    values: np.ndarray
    voiced: np.ndarray | None = None
    linear: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.times)


def read_wav(path: str | Path) -> AudioTrack:
    """Read a RIFF/WAVE file as mono float samples in [-1, 1].

    16-bit PCM is the expected encoding; multi-channel input keeps the
    first channel only.
    """
    rate, data = wavfile.read(str(path))
    if data.ndim > 1:
        data = data[:, 0]
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        samples = data.astype(np.float64) / 2147483648.0
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float64) - 128.0) / 128.0
    else:  # already float
        samples = data.astype(np.float64)
    return AudioTrack(samples, rate)


def write_wav(path: str | Path, track: AudioTrack) -> None:
    """Write an AudioTrack back out as 16-bit PCM."""
    clipped = np.clip(track.samples, -1.0, 1.0)
    ints = np.round(clipped * 32768.0).clip(-32768, 32767).astype(np.int16)
    wavfile.write(str(path), track.sample_rate, ints)


def _frame_starts(n_samples: int, win: int, hop: int) -> np.ndarray:
    """Start indices of every full window."""
    if n_samples < win:
        return np.empty(0, dtype=np.int64)
    return np.arange(0, n_samples - win + 1, hop, dtype=np.int64)


def _frame(samples: np.ndarray, sample_rate: int, window: float, hop: float):
    if not window >= hop > 0:
        raise ValueError(f"need window >= hop > 0, got window={window}, hop={hop}")
    win = max(1, int(round(window * sample_rate)))
    hop_n = max(1, int(round(hop * sample_rate)))
    starts = _frame_starts(len(samples), win, hop_n)
    times = (starts + win / 2.0) / sample_rate
    return starts, times, win


def intensity(
    samples: np.ndarray,
    sample_rate: int,
    window: float = DEFAULT_WINDOW,
    hop: float = DEFAULT_HOP,
) -> ProsodySeries:
    """Windowed RMS, reported in dB re full scale and clamped at -80 dB."""
    samples = np.asarray(samples, dtype=np.float64)
    starts, times, win = _frame(samples, sample_rate, window, hop)
    rms = np.empty(len(starts))
    for i, s in enumerate(starts):
        frame = samples[s : s + win]
        rms[i] = np.sqrt(np.mean(frame * frame))
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(rms)
    db = np.maximum(db, DB_FLOOR)
    return ProsodySeries("intensity", hop, times, db, linear=rms)


def amplitude(
    samples: np.ndarray,
    sample_rate: int,
    window: float = DEFAULT_WINDOW,
    hop: float = DEFAULT_HOP,
) -> ProsodySeries:
    """Peak envelope: max absolute sample per window."""
    samples = np.asarray(samples, dtype=np.float64)
    starts, times, win = _frame(samples, sample_rate, window, hop)
    peaks = np.empty(len(starts))
    for i, s in enumerate(starts):
        peaks[i] = np.max(np.abs(samples[s : s + win]))
    return ProsodySeries("amplitude", hop, times, peaks)


def _pick_peak_lag(acf: np.ndarray, lag_min: int, lag_max: int, tol: float = 0.01) -> int:
    """Best period candidate in [lag_min, lag_max].

    A periodic frame scores ~equal at its period and every multiple, so
    among local maxima within `tol` of the range maximum the shortest
    lag wins; that is the period, not a subharmonic.
    """
    seg = acf[lag_min : lag_max + 1]
    best = float(seg.max())
    interior = np.flatnonzero((seg[1:-1] > seg[:-2]) & (seg[1:-1] >= seg[2:])) + 1
    for i in interior:
        if seg[i] >= best - tol:
            return int(i) + lag_min
    return int(np.argmax(seg)) + lag_min


def pitch(
    samples: np.ndarray,
    sample_rate: int,
    window: float = DEFAULT_WINDOW,
    hop: float = DEFAULT_HOP,
    fmin: float = DEFAULT_FMIN,
    fmax: float = DEFAULT_FMAX,
    voicing_threshold: float = VOICING_THRESHOLD,
) -> ProsodySeries:
    """Autocorrelation pitch tracker.

    Per window: autocorrelation of the mean-removed frame, normalized
    per lag by the energies of the two overlapping stretches (so a
    periodic frame peaks near 1 at its true period, without the
    triangular finite-window bias).  Peak lag restricted to
    [fs/fmax, fs/fmin], refined by parabolic interpolation.  A window is
    voiced when the normalized peak reaches the voicing threshold and
    the raw RMS clears the silence floor; unvoiced windows carry NaN.
    """
    if not (fmin < fmax <= sample_rate / 2):
        raise ValueError(f"need fmin < fmax <= fs/2, got fmin={fmin}, fmax={fmax}")
    if window < 2.0 / fmin:
        raise ValueError(f"window {window}s too short for fmin={fmin} Hz (need >= {2.0 / fmin:g}s)")
    samples = np.asarray(samples, dtype=np.float64)
    starts, times, win = _frame(samples, sample_rate, window, hop)

    lag_min = max(1, int(math.ceil(sample_rate / fmax)))
    lag_max = min(win - 1, int(math.floor(sample_rate / fmin)))
    nfft = 1 << int(math.ceil(math.log2(max(2, 2 * win))))

    values = np.full(len(starts), np.nan)
    voiced = np.zeros(len(starts), dtype=bool)
    for i, s in enumerate(starts):
        frame = samples[s : s + win]
        rms = np.sqrt(np.mean(frame * frame))
        if rms <= SILENCE_RMS:
            continue
        x = frame - frame.mean()
        spec = np.fft.rfft(x, nfft)
        raw = np.fft.irfft(spec * np.conj(spec))[:win].real
        if raw[0] <= 0:
            continue
        if lag_max <= lag_min:
            continue
        # Per-lag normalization: energy of the two overlapping stretches.
        energy = np.cumsum(x * x)
        total = energy[-1]
        lags = np.arange(win)
        head = energy[win - 1 - lags]
        tail = total - np.concatenate(([0.0], energy[: win - 1]))
        norm = np.sqrt(head * tail)
        acf = np.divide(raw, norm, out=np.zeros(win), where=norm > 0)
        lag = _pick_peak_lag(acf, lag_min, lag_max)
        peak = acf[lag]
        if peak < voicing_threshold:
            continue
        # Parabolic refinement around the integer peak.
        if 1 <= lag < win - 1:
            y0, y1, y2 = acf[lag - 1], acf[lag], acf[lag + 1]
            denom = y0 - 2.0 * y1 + y2
            if denom != 0:
                delta = 0.5 * (y0 - y2) / denom
                lag = lag + float(np.clip(delta, -1.0, 1.0))
        voiced[i] = True
        values[i] = sample_rate / lag
    return ProsodySeries("pitch", hop, times, values, voiced=voiced)


def slice_series(series: ProsodySeries, span: TimeSpan) -> ProsodySeries:
    """Samples whose center time falls in [span.start, span.end)."""
    mask = (series.times >= span.start) & (series.times < span.end)
    return ProsodySeries(
        series.feature,
        series.hop,
        series.times[mask],
        series.values[mask],
        voiced=series.voiced[mask] if series.voiced is not None else None,
        linear=series.linear[mask] if series.linear is not None else None,
    )


def extract_all(
    track: AudioTrack,
    window: float = DEFAULT_WINDOW,
    hop: float = DEFAULT_HOP,
) -> dict[str, ProsodySeries]:
    """The three feature series the views consume, keyed by feature name."""
    return {
        "pitch": pitch(track.samples, track.sample_rate, window, hop),
        "intensity": intensity(track.samples, track.sample_rate, window, hop),
        "amplitude": amplitude(track.samples, track.sample_rate, window, hop),
    }
