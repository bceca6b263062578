"""Spoken-name audio: TTS backends, WAV decode/encode, resampling, disk cache.

Two backends ship with the package. ``FixtureBackend`` serves pre-recorded
``<name>.<language>[.<accent>].wav`` files from a directory and is what the
test suite uses. ``CommandBackend`` runs a user-configured command template
(env var ``NAMESOUND_TTS_CMD``) that must emit WAV bytes on stdout, which is
how any real TTS system plugs in.

Cached audio is canonical: RIFF/WAVE, PCM 16-bit little-endian, mono,
16 kHz, one file per (name, language, accent) key under
``<cache>/<language>/<accent>/<sha256(name)>.wav`` plus a JSON manifest
mapping hash to name at the cache root.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import shlex
import struct
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np
from scipy import signal

from .corpus import Name
from .errors import (
    BackendUnavailableError,
    DecodeError,
    EmptyClipError,
    SynthesisFailedError,
)

TARGET_SAMPLE_RATE = 16000
MIN_CLIP_SECONDS = 0.1  # anything shorter than 100 ms is a failed synthesis

TTS_COMMAND_ENV = "NAMESOUND_TTS_CMD"
CACHE_DIR_ENV = "NAMESOUND_CACHE_DIR"

_manifest_lock = threading.Lock()


@dataclass(frozen=True)
class SpokenNameKey:
    """Cache key for one spoken rendition of a name."""

    name: Name
    language: str
    accent: str = ""

    def __post_init__(self):
        if not self.language or self.language != self.language.lower():
            raise ValueError(f"language tag must be non-empty lowercase: {self.language!r}")


@dataclass(frozen=True, eq=False)
class AudioClip:
    """Mono floating-point samples in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        # private copy: freezing a caller-owned buffer would be a side effect
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioClip samples must be one-dimensional (mono)")
        if samples.size == 0:
            raise EmptyClipError("AudioClip holds no samples")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if np.abs(samples).max() > 1.0:
            raise ValueError("samples must lie in [-1, 1]")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AudioClip):
            return NotImplemented
        return self.sample_rate == other.sample_rate and np.array_equal(
            self.samples, other.samples
        )


class TtsBackend(Protocol):
    """Contract for audio producers. ``deterministic`` declares whether a
    fixed key always yields the same bytes within one session."""

    deterministic: bool

    def synthesize_raw(self, key: SpokenNameKey) -> tuple[bytes, str]:
        """Return (audio bytes, container tag); only 'wav' is decodable."""
        ...


class FixtureBackend:
    """Serves pre-recorded WAV files from a directory."""

    deterministic = True

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def synthesize_raw(self, key: SpokenNameKey) -> tuple[bytes, str]:
        stem = key.name.normalized
        candidates = [f"{stem}.{key.language}.{key.accent}.wav"] if key.accent else []
        candidates.append(f"{stem}.{key.language}.wav")
        for filename in candidates:
            path = self.directory / filename
            if path.is_file():
                return path.read_bytes(), "wav"
        raise SynthesisFailedError(
            f"no fixture audio for {stem!r} ({key.language}/{key.accent or '-'}) in {self.directory}"
        )


class CommandBackend:
    """Runs a command template that writes WAV bytes to stdout.

    The template receives ``{name}``, ``{language}``, and ``{accent}``
    placeholders, e.g. ``mytts --lang {language} --accent {accent} {name}``.
    """

    deterministic = False

    def __init__(self, template: str):
        if not template.strip():
            raise BackendUnavailableError("empty TTS command template")
        self.template = template

    def synthesize_raw(self, key: SpokenNameKey) -> tuple[bytes, str]:
        command = [
            part.format(name=key.name.normalized, language=key.language, accent=key.accent)
            for part in shlex.split(self.template)
        ]
        try:
            result = subprocess.run(command, capture_output=True, check=False)
        except FileNotFoundError as exc:
            raise BackendUnavailableError(f"TTS command not found: {command[0]}") from exc
        if result.returncode != 0:
            raise SynthesisFailedError(
                f"TTS command failed for {key.name.normalized!r} "
                f"(exit {result.returncode}): {result.stderr.decode(errors='replace')[:200]}"
            )
        return result.stdout, "wav"


def backend_from_env(fixture_dir: str | Path | None = None) -> TtsBackend:
    """Pick a backend: an explicit fixture directory wins, otherwise the
    NAMESOUND_TTS_CMD command template."""
    if fixture_dir is not None:
        return FixtureBackend(fixture_dir)
    template = os.environ.get(TTS_COMMAND_ENV, "")
    if template:
        return CommandBackend(template)
    raise BackendUnavailableError(
        f"no TTS backend configured: pass a fixture directory or set {TTS_COMMAND_ENV}"
    )


# --- WAV container ----------------------------------------------------------

_WAVE_FORMAT_PCM = 1
_WAVE_FORMAT_IEEE_FLOAT = 3


def decode_wav(data: bytes) -> AudioClip:
    """Decode a RIFF/WAVE payload (PCM 16-bit or IEEE float 32-bit).

    Multi-channel audio is downmixed to mono by the per-frame mean; samples
    are scaled to [-1, 1].
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise DecodeError("not a RIFF/WAVE payload")
    fmt = None
    payload = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset:offset + 4]
        (chunk_size,) = struct.unpack_from("<I", data, offset + 4)
        body = data[offset + 8:offset + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise DecodeError("truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            if len(body) < chunk_size:
                raise DecodeError("truncated data chunk")
            payload = body
        offset += 8 + chunk_size + (chunk_size & 1)
    if fmt is None:
        raise DecodeError("missing fmt chunk")
    if payload is None:
        raise DecodeError("missing data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if channels < 1:
        raise DecodeError("zero channels")
    if audio_format == _WAVE_FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 4], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        raise DecodeError(f"unsupported codec: format={audio_format} bits={bits}")
    if channels > 1:
        frames = len(samples) // channels
        samples = samples[: frames * channels].reshape(frames, channels).mean(axis=1)
    if samples.size == 0:
        raise DecodeError("no audio samples")
    return AudioClip(samples=np.clip(samples, -1.0, 1.0), sample_rate=sample_rate)


def encode_wav(clip: AudioClip) -> bytes:
    """Encode as PCM 16-bit little-endian mono WAV.

    Quantization scales by 32768 with clipping at +1.0, which keeps the
    decode(encode(x)) round-trip within one quantization step per sample.
    """
    quantized = np.clip(np.rint(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = quantized.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, _WAVE_FORMAT_PCM, 1,
        clip.sample_rate, clip.sample_rate * 2, 2, 16,
    )
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


# --- resampling -------------------------------------------------------------

_KAISER_BETA = 8.6
_TAPS_PER_PHASE = 64


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Resample with a polyphase windowed-sinc filter (Kaiser window,
    beta 8.6, 64 taps per phase). Duration is preserved to within one
    output sample period."""
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == clip.sample_rate:
        return clip
    g = math.gcd(clip.sample_rate, target_rate)
    up, down = target_rate // g, clip.sample_rate // g
    taps = _TAPS_PER_PHASE * up + 1  # odd length keeps the filter symmetric
    kernel = signal.firwin(taps, 1.0 / max(up, down), window=("kaiser", _KAISER_BETA))
    out = signal.resample_poly(clip.samples, up, down, window=kernel)
    return AudioClip(samples=np.clip(out, -1.0, 1.0), sample_rate=target_rate)


# --- disk cache -------------------------------------------------------------

def _accent_segment(accent: str) -> str:
    return accent if accent else "default"


def cache_path(cache_dir: str | Path, key: SpokenNameKey) -> Path:
    digest = hashlib.sha256(key.name.normalized.encode("utf-8")).hexdigest()
    return Path(cache_dir) / key.language / _accent_segment(key.accent) / f"{digest}.wav"


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(f".tmp{os.getpid()}.{threading.get_ident()}")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _record_in_manifest(cache_dir: str | Path, key: SpokenNameKey) -> None:
    manifest_path = Path(cache_dir) / "manifest.json"
    digest = cache_path(cache_dir, key).stem
    with _manifest_lock:
        mapping: dict[str, str] = {}
        if manifest_path.is_file():
            mapping = json.loads(manifest_path.read_text(encoding="utf-8"))
        if mapping.get(digest) == key.name.normalized:
            return
        mapping[digest] = key.name.normalized
        _atomic_write(manifest_path, json.dumps(mapping, sort_keys=True, indent=0).encode("utf-8"))


def load_manifest(cache_dir: str | Path) -> dict[str, str]:
    manifest_path = Path(cache_dir) / "manifest.json"
    if not manifest_path.is_file():
        return {}
    return json.loads(manifest_path.read_text(encoding="utf-8"))


def synthesize(
    key: SpokenNameKey,
    backend: TtsBackend,
    cache_dir: str | Path,
    *,
    target_rate: int = TARGET_SAMPLE_RATE,
    min_seconds: float = MIN_CLIP_SECONDS,
) -> AudioClip:
    """Produce the canonical mono 16 kHz clip for a key, using the cache.

    A cache hit is served byte-identically from disk. On a miss the backend
    output is decoded, downmixed, resampled, checked against the minimum
    duration, and written atomically to the cache; the returned clip is the
    decoded form of exactly those cached bytes.
    """
    path = cache_path(cache_dir, key)
    if path.is_file():
        return decode_wav(path.read_bytes())
    data, container = backend.synthesize_raw(key)
    if container != "wav":
        raise DecodeError(f"backend produced unsupported container {container!r}")
    clip = decode_wav(data)
    clip = resample(clip, target_rate)
    if clip.duration < min_seconds:
        raise SynthesisFailedError(
            f"clip for {key.name.normalized!r} is {clip.duration * 1000:.0f} ms "
            f"(< {min_seconds * 1000:.0f} ms)"
        )
    wav_bytes = encode_wav(clip)
    _atomic_write(path, wav_bytes)
    _record_in_manifest(cache_dir, key)
    return decode_wav(wav_bytes)


def prefetch(
    names: Iterable[Name],
    language: str,
    accent: str,
    backend: TtsBackend,
    cache_dir: str | Path,
    *,
    max_workers: int = 4,
) -> dict[str, int]:
    """Populate the cache for many names with bounded parallelism.

    Returns counts: {'synthesized': n, 'failed': n}.
    """
    keys = [SpokenNameKey(name=n, language=language, accent=accent) for n in names]
    counts = {"synthesized": 0, "failed": 0}
    lock = threading.Lock()

    def run(key: SpokenNameKey) -> None:
        try:
            synthesize(key, backend, cache_dir)
        except (SynthesisFailedError, DecodeError):
            with lock:
                counts["failed"] += 1
        else:
            with lock:
                counts["synthesized"] += 1

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        list(pool.map(run, keys))
    return counts


# --- offline pseudo-speech --------------------------------------------------

def render_name_tones(
    name: Name | str,
    *,
    sample_rate: int = TARGET_SAMPLE_RATE,
    seconds_per_letter: float = 0.12,
    amplitude: float = 0.4,
) -> AudioClip:
    """Render a name as a deterministic tone sequence.

    This is not speech; it is a reproducible, fully offline stand-in with
    the property that equal spellings produce identical audio and similar
    spellings produce similar audio. Each letter maps to a fixed pitch and
    is shaped with a raised-cosine envelope. Useful for demos and tests
    when no TTS system is configured.
    """
    text = name.normalized if isinstance(name, Name) else name
    letters = [c for c in text.lower() if "a" <= c <= "z"] or ["a"]
    n = int(round(seconds_per_letter * sample_rate))
    t = np.arange(n) / sample_rate
    envelope = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / max(n - 1, 1))
    pieces = []
    for c in letters:
        # one semitone per letter above 220 Hz keeps everything in band
        freq = 220.0 * 2.0 ** ((ord(c) - ord("a")) / 12.0)
        pieces.append(amplitude * envelope * np.sin(2 * np.pi * freq * t))
    return AudioClip(samples=np.concatenate(pieces), sample_rate=sample_rate)
