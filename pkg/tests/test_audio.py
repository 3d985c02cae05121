import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stpipe.audio import (AudioSignal, Fragment, add_noise, energy_vad, format_fragments,
                          parse_fragments, parse_wav, signal_power, speed_perturb, splice_audio,
                          splice_min_duration, write_wav)
from stpipe.errors import BadFactor, BadFrame, NotRiff, SilentSignal, Truncated, UnsupportedFormat


def wav_bytes(pcm, rate=16000, channels=1, bits=16, fmt=1, declared=None, magic=b"RIFF"):
    data = struct.pack(f"<{len(pcm)}h", *pcm)
    size = len(data) if declared is None else declared
    return (magic + struct.pack("<I", 36 + size) + b"WAVE"
            + b"fmt " + struct.pack("<IHHIIHH", 16, fmt, channels, rate, rate * 2, 2, bits)
            + b"data" + struct.pack("<I", size) + data)


def test_parse_minimal():
    sig = parse_wav(wav_bytes([0, 16384, -32768]))
    assert sig.samples.tolist() == [0.0, 0.5, -1.0]
    assert sig.sample_rate == 16000


def test_parse_errors():
    with pytest.raises(NotRiff):
        parse_wav(wav_bytes([0], magic=b"RIFX"))
    with pytest.raises(Truncated):
        parse_wav(wav_bytes([0] * 5, declared=100))
    with pytest.raises(UnsupportedFormat):
        parse_wav(wav_bytes([0], channels=2))
    with pytest.raises(UnsupportedFormat):
        parse_wav(wav_bytes([0], bits=8))
    with pytest.raises(UnsupportedFormat):
        parse_wav(wav_bytes([0], fmt=3))
    with pytest.raises(NotRiff):
        parse_wav(b"")


def test_parse_skips_unknown_chunks():
    raw = wav_bytes([1, 2, 3])
    extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
    raw = raw[:12] + extra + raw[12:]
    assert parse_wav(raw).samples.tolist() == [1 / 32768, 2 / 32768, 3 / 32768]


def test_write_roundtrip_and_clamp():
    back = parse_wav(write_wav(AudioSignal([0.0], 16000)))
    assert back.samples.tolist() == [0.0] and back.sample_rate == 16000
    back = parse_wav(write_wav(AudioSignal([1.5, -3.0], 8000)))
    assert back.samples.tolist() == [32767 / 32768, -1.0]


@given(arrays(np.float64, st.integers(0, 300), elements=st.floats(-1.0, 1.0)),
       st.integers(1, 96000))
def test_roundtrip_within_one_step(x, rate):
    back = parse_wav(write_wav(AudioSignal(x, rate)))
    assert back.sample_rate == rate
    assert np.all(np.abs(back.samples - x) <= 1 / 32768)


def test_speed_perturb_lengths():
    x = np.sin(np.arange(16000) / 10)
    sig = AudioSignal(x, 16000)
    assert np.array_equal(speed_perturb(sig, 1.0).samples, x)
    assert len(speed_perturb(sig, 0.8)) == 20000
    assert len(speed_perturb(sig, 1.2)) == 13333
    out = speed_perturb(AudioSignal([0.0, 1.0, 0.0], 10), 0.5)
    assert out.samples.tolist() == [0.0, 0.5, 1.0, 0.5, 0.0, 0.0]
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(BadFactor):
            speed_perturb(sig, bad)


def test_add_noise():
    rng = np.random.default_rng(0)
    x = np.sign(rng.standard_normal(100000))  # unit power
    sig = AudioSignal(x, 16000)
    a = add_noise(sig, 20.0, seed=4)
    assert np.array_equal(a.samples, add_noise(sig, 20.0, seed=4).samples)
    noise_power = signal_power(a.samples - x)
    assert abs(noise_power - 0.01) <= 0.1 * 0.01
    with pytest.raises(SilentSignal):
        add_noise(AudioSignal(np.zeros(10), 16000), 10.0, 0)


def three_second_signal(rate=8000):
    loud = 0.5 * np.ones(rate)
    return AudioSignal(np.concatenate([loud, np.zeros(rate), loud]), rate)


def test_vad():
    assert energy_vad(AudioSignal(np.zeros(8000), 8000), 10, 1e-6) == []
    sig = three_second_signal()
    frags = energy_vad(sig, 10, 0.01, 1)
    assert frags == [Fragment(0.0, 1.0), Fragment(2.0, 3.0)]
    assert energy_vad(sig, 10, 0.01, 101) == [Fragment(0.0, 3.0)]
    assert energy_vad(sig, 10, 0.01, 100) == frags
    with pytest.raises(BadFrame):
        energy_vad(sig, 0.01, 0.01)


def test_vad_partial_last_frame():
    sig = AudioSignal(np.concatenate([np.zeros(100), 0.5 * np.ones(55)]), 1000)
    frags = energy_vad(sig, 10, 0.01)
    assert frags == [Fragment(0.1, 0.155)]


def _frags(durations, gap=0.5):
    out, t = [], 0.0
    for d in durations:
        out.append(Fragment(t, t + d))
        t += d + gap
    return out


@pytest.mark.parametrize("durs, shape", [
    ([4, 3, 5, 12], [3, 1]),
    ([4, 3], [2]),
    ([11, 11], [1, 1]),
    ([], []),
])
def test_splice(durs, shape):
    frags = _frags(durs)
    groups = splice_min_duration(frags, 10)
    assert [len(g) for g in groups] == shape
    assert [f for g in groups for f in g] == frags


def test_splice_audio_and_fragment_io():
    sig = three_second_signal(rate=100)
    group = [Fragment(0.0, 1.0), Fragment(2.0, 3.0)]
    assert len(splice_audio(sig, group)) == 200
    text = format_fragments(group)
    assert text == "0.000\t1.000\n2.000\t3.000\n"
    assert parse_fragments(text.splitlines()) == group
