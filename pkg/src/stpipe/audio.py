"""PCM WAV I/O, speed and noise perturbation, energy VAD and fragment splicing."""

import math
import struct
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from .errors import BadFactor, BadFrame, NotRiff, SilentSignal, StpipeError, Truncated, UnsupportedFormat

SCALE = 32768.0


@dataclass
class AudioSignal:
    """Mono samples (nominally in [-1, 1]) at ``sample_rate`` Hz.

    Perturbations may push samples past full scale; :func:`write_wav`
    clamps them.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise StpipeError(f"sample rate must be a positive integer, got {self.sample_rate}")
        self.sample_rate = int(self.sample_rate)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class Fragment:
    start: float
    end: float

    @property
    def duration(self) -> float:
        return self.end - self.start


def parse_wav(data: bytes) -> AudioSignal:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotRiff("missing RIFF/WAVE magic")
    pos = 12
    rate = None
    samples = None
    while pos + 8 <= len(data):
        cid = data[pos:pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4:pos + 8])
        body = data[pos + 8:pos + 8 + size]
        if cid == b"fmt ":
            if len(body) < 16:
                raise Truncated("fmt chunk shorter than 16 bytes")
            fmt, channels, rate, _, _, bits = struct.unpack("<HHIIHH", body[:16])
            if fmt != 1:
                raise UnsupportedFormat(f"audio format {fmt} is not PCM")
            if channels != 1:
                raise UnsupportedFormat(f"{channels} channels; only mono is supported")
            if bits != 16:
                raise UnsupportedFormat(f"{bits}-bit samples; only 16-bit is supported")
            if rate == 0:
                raise UnsupportedFormat("sample rate 0")
        elif cid == b"data":
            if rate is None:
                raise UnsupportedFormat("data chunk before fmt chunk")
            if len(body) < size:
                raise Truncated(f"data chunk declares {size} bytes, {len(body)} present")
            if size % 2:
                raise Truncated("data chunk holds a partial sample")
            samples = np.frombuffer(body, dtype="<i2").astype(np.float64) / SCALE
            break
        pos += 8 + size + (size & 1)
    if rate is None:
        raise UnsupportedFormat("no fmt chunk")
    if samples is None:
        raise Truncated("no data chunk")
    return AudioSignal(samples, rate)


def quantize(samples: np.ndarray) -> np.ndarray:
    q = np.round(np.clip(samples, -1.0, 1.0) * SCALE)
    return np.clip(q, -32768, 32767).astype("<i2")


def write_wav(signal: AudioSignal) -> bytes:
    pcm = quantize(signal.samples).tobytes()
    rate = signal.sample_rate
    header = b"RIFF" + struct.pack("<I", 36 + len(pcm)) + b"WAVE"
    fmt = b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16)
    return header + fmt + b"data" + struct.pack("<I", len(pcm)) + pcm


def speed_perturb(signal: AudioSignal, factor: float) -> AudioSignal:
    """Resample by linear interpolation so playback at the same rate is ``factor`` times faster.

    Output length is ``round(len / factor)`` (halves round up); sample ``i``
    reads the input at position ``i * factor``, holding the last sample past
    the end.
    """
    if not math.isfinite(factor) or factor <= 0:
        raise BadFactor(f"speed factor must be finite and > 0, got {factor}")
    x = signal.samples
    if factor == 1.0:
        return AudioSignal(x.copy(), signal.sample_rate)
    n_out = int(math.floor(len(x) / factor + 0.5))
    if len(x) == 0 or n_out == 0:
        return AudioSignal(np.zeros(0), signal.sample_rate)
    pos = np.arange(n_out) * factor
    return AudioSignal(np.interp(pos, np.arange(len(x)), x), signal.sample_rate)


def signal_power(samples: np.ndarray) -> float:
    return float(np.mean(np.square(samples))) if len(samples) else 0.0


def add_noise(signal: AudioSignal, snr_db: float, seed: int) -> AudioSignal:
    """Add seeded white Gaussian noise at exactly ``snr_db``.

    The drawn noise is rescaled to the target power, so the realized SNR
    matches up to rounding.
    """
    p_sig = signal_power(signal.samples)
    if p_sig <= 0.0:
        raise SilentSignal("signal has zero power; SNR undefined")
    noise = np.random.default_rng(seed).standard_normal(len(signal.samples))
    target = p_sig / (10.0 ** (snr_db / 10.0))
    noise *= math.sqrt(target / signal_power(noise))
    return AudioSignal(signal.samples + noise, signal.sample_rate)


def frame_energy(signal: AudioSignal, frame_len: int) -> np.ndarray:
    """Mean-square energy of consecutive non-overlapping frames (last one may be partial)."""
    x = signal.samples
    n_frames = -(-len(x) // frame_len)
    padded = np.zeros(n_frames * frame_len)
    padded[:len(x)] = x
    sq = np.square(padded).reshape(n_frames, frame_len).sum(axis=1)
    counts = np.full(n_frames, frame_len, dtype=np.float64)
    if n_frames:
        counts[-1] = len(x) - (n_frames - 1) * frame_len
    return sq / counts


def energy_vad(signal: AudioSignal, frame_ms: float, energy_threshold: float,
               min_gap_frames: int = 1) -> List[Fragment]:
    """Speech fragments from thresholded frame energy.

    Speech runs separated by fewer than ``min_gap_frames`` quiet frames
    are merged into one fragment.
    """
    frame_len = int(round(frame_ms * signal.sample_rate / 1000.0))
    if frame_len < 1:
        raise BadFrame(f"{frame_ms} ms is shorter than one sample at {signal.sample_rate} Hz")
    if min_gap_frames < 1:
        raise StpipeError("min_gap_frames must be >= 1")
    speech = frame_energy(signal, frame_len) > energy_threshold
    idx = np.flatnonzero(speech)
    if idx.size == 0:
        return []
    # split wherever the quiet stretch between speech frames reaches min_gap_frames
    breaks = np.flatnonzero(np.diff(idx) - 1 >= min_gap_frames)
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    ends = np.concatenate((idx[breaks], [idx[-1]])) + 1
    n = len(signal.samples)
    sr = signal.sample_rate
    return [Fragment(s * frame_len / sr, min(e * frame_len, n) / sr) for s, e in zip(starts, ends)]


def splice_min_duration(fragments: Sequence[Fragment], min_s: float) -> List[List[Fragment]]:
    """Greedily group consecutive fragments until each group spans at least ``min_s`` seconds of speech."""
    if min_s <= 0:
        raise StpipeError("min_s must be > 0")
    groups: List[List[Fragment]] = []
    current: List[Fragment] = []
    total = 0.0
    for frag in fragments:
        current.append(frag)
        total += frag.duration
        if total >= min_s:
            groups.append(current)
            current, total = [], 0.0
    if current:
        groups.append(current)
    return groups


def splice_audio(signal: AudioSignal, group: Sequence[Fragment]) -> AudioSignal:
    """Concatenate the samples of a fragment group."""
    sr = signal.sample_rate
    parts = [signal.samples[int(round(f.start * sr)):int(round(f.end * sr))] for f in group]
    return AudioSignal(np.concatenate(parts) if parts else np.zeros(0), sr)


def format_fragments(fragments: Iterable[Fragment]) -> str:
    return "".join(f"{f.start:.3f}\t{f.end:.3f}\n" for f in fragments)


def parse_fragments(lines: Iterable[str]) -> List[Fragment]:
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise StpipeError(f"fragment line {lineno}: expected start<TAB>end")
        start, end = float(parts[0]), float(parts[1])
        if start < 0 or end <= start:
            raise StpipeError(f"fragment line {lineno}: need 0 <= start < end")
        out.append(Fragment(start, end))
    return out
