import numpy as np
import pytest
from scipy.io import wavfile

from emoscope.model import TimeSpan
from emoscope.prosody import (
    amplitude,
    extract_all,
    intensity,
    pitch,
    read_wav,
    slice_series,
    write_wav,
)


def sine(freq, duration=0.5, rate=44100, amp=0.5):
    t = np.arange(int(duration * rate)) / rate
    return amp * np.sin(2 * np.pi * freq * t)


# -- intensity ------------------------------------------------------------------


def test_intensity_of_sine_is_amplitude_over_sqrt2():
    # 250 Hz gives a whole number of periods per 40 ms window, so the
    # analytic RMS A/sqrt(2) holds per window.
    series = intensity(sine(250, amp=0.5), 44100)
    assert len(series) > 0
    assert np.allclose(series.linear, 0.5 / np.sqrt(2), atol=1e-3)


def test_intensity_silence_clamps_at_floor():
    series = intensity(np.zeros(44100), 44100)
    assert np.all(series.values == -80.0)
    assert np.all(series.linear == 0.0)


def test_intensity_step_signal_matches_window_oracle():
    rate = 16000
    signal = np.concatenate([np.full(rate, 0.1), np.full(rate, 0.4)])
    window, hop = 0.040, 0.010
    series = intensity(signal, rate, window, hop)
    win, hop_n = int(window * rate), int(hop * rate)
    for k in range(len(series)):
        frame = signal[k * hop_n : k * hop_n + win]
        assert series.linear[k] == pytest.approx(np.sqrt(np.mean(frame**2)), abs=1e-12)


def test_intensity_empty_audio():
    assert len(intensity(np.array([]), 16000)) == 0


# -- amplitude ------------------------------------------------------------------


def test_amplitude_constant_offset():
    series = amplitude(np.full(16000, 0.3), 16000)
    assert np.allclose(series.values, 0.3)


def test_amplitude_of_sine():
    # Window (40 ms) covers many 220 Hz periods, so every peak is ~0.5.
    series = amplitude(sine(220, amp=0.5), 44100)
    assert np.allclose(series.values, 0.5, atol=1e-3)


def test_amplitude_ramp_matches_window_oracle():
    rate = 8000
    signal = np.linspace(-1.0, 1.0, rate)
    series = amplitude(signal, rate, 0.040, 0.010)
    win, hop_n = int(0.040 * rate), int(0.010 * rate)
    for k in range(len(series)):
        frame = signal[k * hop_n : k * hop_n + win]
        assert series.values[k] == pytest.approx(np.max(np.abs(frame)), abs=0)


# -- scale covariance -------------------------------------------------------------


def test_scale_covariance_exact_power_of_two():
    rng = np.random.default_rng(3)
    signal = rng.uniform(-0.4, 0.4, 32000)
    base_i = intensity(signal, 16000)
    base_a = amplitude(signal, 16000)
    scaled_i = intensity(2.0 * signal, 16000)
    scaled_a = amplitude(2.0 * signal, 16000)
    assert np.array_equal(scaled_i.linear, 2.0 * base_i.linear)
    assert np.array_equal(scaled_a.values, 2.0 * base_a.values)


# -- pitch ------------------------------------------------------------------------


@pytest.mark.parametrize("freq", [110.0, 220.0, 440.0, 880.0])
def test_pitch_pure_tone_within_one_percent(freq):
    # 880 Hz sits above the speech default fmax=500, so widen the range;
    # the accuracy contract holds for any f within [fmin, fmax].
    series = pitch(sine(freq), 44100, fmin=65, fmax=1000)
    voiced = series.values[series.voiced]
    assert len(voiced) > 0
    assert np.all(np.abs(voiced - freq) / freq < 0.01)


def test_pitch_220_within_two_hz():
    series = pitch(sine(220), 44100)
    voiced = series.values[series.voiced]
    assert np.all(np.abs(voiced - 220.0) < 2.0)


def test_pitch_white_noise_unvoiced():
    rng = np.random.default_rng(8)
    noise = rng.uniform(-0.5, 0.5, 44100 // 2)
    series = pitch(noise, 44100)
    assert not np.any(series.voiced)
    assert np.all(np.isnan(series.values))


def test_pitch_silence_unvoiced():
    series = pitch(np.zeros(22050), 44100)
    assert not np.any(series.voiced)


def test_pitch_rejects_bad_ranges():
    with pytest.raises(ValueError):
        pitch(sine(220), 44100, fmin=500, fmax=400)
    with pytest.raises(ValueError):
        pitch(sine(220), 44100, window=0.010, fmin=65)  # needs >= 2/65 s


def test_pitch_values_only_where_voiced():
    signal = np.concatenate([sine(220, duration=0.3), np.zeros(44100 // 2)])
    series = pitch(signal, 44100)
    assert np.all(np.isfinite(series.values[series.voiced]))
    assert np.all(np.isnan(series.values[~series.voiced]))


# -- series framing and slicing ------------------------------------------------------


def test_times_strictly_increasing_constant_hop():
    series = intensity(sine(220, duration=1.0), 44100)
    diffs = np.diff(series.times)
    assert np.all(diffs > 0)
    assert np.allclose(diffs, 0.010, atol=1e-9)


def test_slice_whole_span_is_identity():
    series = intensity(sine(220, duration=1.0), 44100)
    out = slice_series(series, TimeSpan(0.0, 2.0))
    assert np.array_equal(out.times, series.times)
    assert np.array_equal(out.values, series.values)


def test_slice_before_first_sample_is_empty():
    series = intensity(sine(220, duration=1.0), 44100)
    assert len(slice_series(series, TimeSpan(0.0, series.times[0]))) == 0


def test_slice_mid_span_matches_filter_oracle():
    series = pitch(sine(220, duration=1.0), 44100)
    span = TimeSpan(0.25, 0.60)
    out = slice_series(series, span)
    keep = [i for i, t in enumerate(series.times) if span.start <= t < span.end]
    assert np.array_equal(out.times, series.times[keep])
    assert np.array_equal(out.voiced, series.voiced[keep])


# -- wav io -----------------------------------------------------------------------


def test_read_wav_takes_first_channel(tmp_path):
    rate = 16000
    left = (sine(220, duration=0.2, rate=rate) * 32767).astype(np.int16)
    right = np.zeros_like(left)
    wavfile.write(tmp_path / "st.wav", rate, np.stack([left, right], axis=1))
    track = read_wav(tmp_path / "st.wav")
    assert track.sample_rate == rate
    assert np.max(np.abs(track.samples)) > 0.4


def test_wav_round_trip_exact(tmp_path):
    rng = np.random.default_rng(4)
    samples = rng.integers(-32768, 32768, size=5000).astype(np.int16) / 32768.0
    from emoscope.model import AudioTrack

    write_wav(tmp_path / "rt.wav", AudioTrack(samples, 16000))
    back = read_wav(tmp_path / "rt.wav")
    assert np.array_equal(back.samples, samples)


def test_extract_all_features():
    from emoscope.model import AudioTrack

    series = extract_all(AudioTrack(sine(220, duration=0.3), 44100))
    assert set(series) == {"pitch", "intensity", "amplitude"}
    assert all(len(s) > 0 for s in series.values())
