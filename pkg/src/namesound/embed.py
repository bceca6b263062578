"""Fixed-dimensional acoustic embeddings for spoken names.

Two extraction pipelines:

* ``mel_grid_embedding`` — a 12,288-entry log-mel grid: the clip is
  padded/trimmed to 1.92 s, analyzed with 25 ms Hamming windows every
  10 ms (n_fft 512), run through a 64-band mel filter bank (125–7500 Hz),
  floored-log'd, and flattened as 2 half-second-ish halves x 96 frames x
  64 bands in row-major order.
* ``handcrafted_embedding`` — 136 entries: 34 classic short-term audio
  features per 50 ms frame (25 ms hop), first-order deltas appended, then
  mean and standard deviation pooled over frames as [means(68), stds(68)].

Embeddings are stored as UTF-8 TSV: a header line
``#namesound-embeddings v1 backend=<tag> dim=<d> lang=<tag> accent=<tag>``
followed by ``name<TAB>v1 v2 ... vd`` rows with shortest round-trip
decimal values.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dct

from .corpus import Name
from .errors import (
    ClipTooShortError,
    EmbeddingStoreError,
    EmptyClipError,
    InvalidRangeError,
)
from .speech import TARGET_SAMPLE_RATE, AudioClip, SpokenNameKey, resample

LOG_FLOOR = 1e-10

# mel-grid pipeline geometry
GRID_SECONDS = 1.92
GRID_WINDOW = 400          # 25 ms at 16 kHz
GRID_HOP = 160             # 10 ms
GRID_N_FFT = 512
GRID_N_MELS = 64
GRID_FMIN = 125.0
GRID_FMAX = 7500.0
GRID_FRAMES_PER_HALF = 96
GRID_HALVES = 2

# handcrafted pipeline geometry
HAND_WINDOW = 800          # 50 ms at 16 kHz
HAND_HOP = 400             # 25 ms
HAND_N_MFCC = 13
HAND_MFCC_BANDS = 40
HAND_N_CHROMA = 12
HAND_SUB_BLOCKS = 10
HAND_ROLLOFF = 0.90
CHROMA_REFERENCE_HZ = 440.0


class EmbeddingBackend(Enum):
    MEL_GRID = "mel"
    HANDCRAFTED = "hand"

    @property
    def dim(self) -> int:
        return _BACKEND_DIMS[self]


_BACKEND_DIMS = {
    EmbeddingBackend.MEL_GRID: GRID_HALVES * GRID_FRAMES_PER_HALF * GRID_N_MELS,
    EmbeddingBackend.HANDCRAFTED: 136,
}


@dataclass(frozen=True)
class Embedding:
    """One spoken name as a fixed-dimensional vector."""

    backend: EmbeddingBackend
    vector: np.ndarray
    key: SpokenNameKey | None = None

    def __post_init__(self):
        vector = np.array(self.vector, dtype=np.float64)
        if vector.ndim != 1:
            raise ValueError("embedding vector must be one-dimensional")
        if vector.shape[0] != self.backend.dim:
            raise ValueError(
                f"{self.backend.value} embeddings have dim {self.backend.dim}, got {vector.shape[0]}"
            )
        if not np.all(np.isfinite(vector)):
            raise ValueError("embedding vector contains NaN/Inf")
        vector.flags.writeable = False
        object.__setattr__(self, "vector", vector)

    @property
    def dim(self) -> int:
        return self.backend.dim


# --- windows, spectra, filter banks ----------------------------------------

@dataclass(frozen=True)
class Frame:
    """One windowed analysis frame of a longer signal."""

    samples: np.ndarray
    index: int
    hop: int


def hamming_window(n: int) -> np.ndarray:
    """w[i] = 0.54 - 0.46 cos(2 pi i / (n-1)) for i in 0..n-1."""
    if n < 2:
        raise ValueError("hamming_window needs n >= 2")
    i = np.arange(n)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * i / (n - 1))


def power_spectrum(frame: Frame) -> np.ndarray:
    """|FFT|^2 over the n_fft/2 + 1 non-negative frequency bins."""
    return np.abs(np.fft.rfft(frame.samples)) ** 2


def hz_to_mel(f: float | np.ndarray) -> float | np.ndarray:
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m: float | np.ndarray) -> float | np.ndarray:
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelFilterBank:
    """Triangular filters with centers equally spaced on the mel scale."""

    n_fft: int
    n_mels: int
    fmin: float
    fmax: float
    sample_rate: int
    weights: np.ndarray       # (n_mels, n_fft // 2 + 1)
    centers_hz: np.ndarray    # (n_mels,)


def mel_filterbank(
    n_fft: int, n_mels: int, fmin: float, fmax: float, sample_rate: int
) -> MelFilterBank:
    if n_mels < 1:
        raise InvalidRangeError("n_mels must be >= 1")
    if not (0.0 <= fmin < fmax <= sample_rate / 2.0):
        raise InvalidRangeError(
            f"need 0 <= fmin < fmax <= sample_rate/2, got fmin={fmin} fmax={fmax} sr={sample_rate}"
        )
    edges_mel = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
    edges_hz = np.asarray(mel_to_hz(edges_mel))
    bin_hz = np.arange(n_fft // 2 + 1) * (sample_rate / n_fft)
    lower, center, upper = edges_hz[:-2], edges_hz[1:-1], edges_hz[2:]
    rising = (bin_hz[None, :] - lower[:, None]) / (center - lower)[:, None]
    falling = (upper[:, None] - bin_hz[None, :]) / (upper - center)[:, None]
    weights = np.maximum(0.0, np.minimum(rising, falling))
    if not np.all((weights > 0).any(axis=1)):
        raise InvalidRangeError(
            "filter bank too fine for this FFT resolution: some filters cover no bin"
        )
    return MelFilterBank(
        n_fft=n_fft, n_mels=n_mels, fmin=fmin, fmax=fmax,
        sample_rate=sample_rate, weights=weights, centers_hz=center.copy(),
    )


# --- mel-grid pipeline -------------------------------------------------------

_SILENCE_EPS = 1e-4


def _trim_trailing_silence(x: np.ndarray) -> np.ndarray:
    loud = np.flatnonzero(np.abs(x) > _SILENCE_EPS)
    if loud.size == 0:
        return x[:1]
    return x[: loud[-1] + 1]


def _fit_to_length(x: np.ndarray, target: int) -> np.ndarray:
    if len(x) > target:
        x = _trim_trailing_silence(x)
        if len(x) > target:
            x = x[:target]
    if len(x) < target:
        missing = target - len(x)
        left = missing // 2
        x = np.pad(x, (left, missing - left))
    return x


def _stft_power(x: np.ndarray, window: np.ndarray, hop: int, n_fft: int, n_frames: int) -> np.ndarray:
    frames = sliding_window_view(x, len(window))[::hop][:n_frames]
    return np.abs(np.fft.rfft(frames * window, n=n_fft, axis=1)) ** 2


def mel_grid_embedding(clip: AudioClip, key: SpokenNameKey | None = None) -> Embedding:
    """Log-mel grid embedding; dimension is invariant to clip duration."""
    if clip.sample_rate != TARGET_SAMPLE_RATE:
        clip = resample(clip, TARGET_SAMPLE_RATE)
    x = clip.samples
    if x.size == 0:
        raise EmptyClipError("cannot embed an empty clip")
    target = int(round(GRID_SECONDS * TARGET_SAMPLE_RATE))
    x = _fit_to_length(x, target)

    n_frames = GRID_HALVES * GRID_FRAMES_PER_HALF
    analysis_len = (n_frames - 1) * GRID_HOP + GRID_WINDOW
    x = np.pad(x, (0, analysis_len - len(x)))
    power = _stft_power(x, hamming_window(GRID_WINDOW), GRID_HOP, GRID_N_FFT, n_frames)
    bank = _grid_bank()
    mel_energy = power @ bank.weights.T
    grid = np.log(mel_energy + LOG_FLOOR)
    return Embedding(backend=EmbeddingBackend.MEL_GRID, vector=grid.reshape(-1), key=key)


_grid_bank_cache: MelFilterBank | None = None


def _grid_bank() -> MelFilterBank:
    global _grid_bank_cache
    if _grid_bank_cache is None:
        _grid_bank_cache = mel_filterbank(
            GRID_N_FFT, GRID_N_MELS, GRID_FMIN, GRID_FMAX, TARGET_SAMPLE_RATE
        )
    return _grid_bank_cache


# --- handcrafted pipeline ----------------------------------------------------

def _entropy(p: np.ndarray, axis: int = -1) -> np.ndarray:
    terms = np.where(p > 0.0, p * np.log2(p, where=p > 0.0, out=np.zeros_like(p)), 0.0)
    return -terms.sum(axis=axis)


def _frame_features(frames: np.ndarray, sample_rate: int) -> np.ndarray:
    """34 features per frame: zcr, energy, energy entropy, spectral centroid,
    spread, entropy, flux, rolloff, 13 MFCCs, 12 chroma, chroma deviation."""
    n_frames, win = frames.shape
    eps = np.finfo(np.float64).eps

    zcr = (np.signbit(frames[:, 1:]) != np.signbit(frames[:, :-1])).sum(axis=1) / (win - 1)
    energy = (frames ** 2).mean(axis=1)

    block = win // HAND_SUB_BLOCKS
    sub = frames[:, : block * HAND_SUB_BLOCKS].reshape(n_frames, HAND_SUB_BLOCKS, block)
    sub_energy = (sub ** 2).sum(axis=2)
    p_sub = sub_energy / np.maximum(sub_energy.sum(axis=1, keepdims=True), eps)
    energy_entropy = _entropy(p_sub)

    spectrum = np.abs(np.fft.rfft(frames, axis=1))
    power = spectrum ** 2
    freqs = np.fft.rfftfreq(win, d=1.0 / sample_rate)
    nyquist = sample_rate / 2.0

    mag_total = np.maximum(spectrum.sum(axis=1), eps)
    centroid_hz = (spectrum * freqs).sum(axis=1) / mag_total
    spread_hz = np.sqrt(
        (spectrum * (freqs[None, :] - centroid_hz[:, None]) ** 2).sum(axis=1) / mag_total
    )
    centroid = centroid_hz / nyquist
    spread = spread_hz / nyquist

    n_bins = power.shape[1]
    band = n_bins // HAND_SUB_BLOCKS
    bands = power[:, : band * HAND_SUB_BLOCKS].reshape(n_frames, HAND_SUB_BLOCKS, band)
    band_energy = bands.sum(axis=2)
    p_band = band_energy / np.maximum(band_energy.sum(axis=1, keepdims=True), eps)
    spectral_entropy = _entropy(p_band)

    norm_mag = spectrum / np.maximum(spectrum.sum(axis=1, keepdims=True), eps)
    flux = np.zeros(n_frames)
    if n_frames > 1:
        flux[1:] = ((norm_mag[1:] - norm_mag[:-1]) ** 2).sum(axis=1)

    total_power = power.sum(axis=1)
    cumulative = np.cumsum(power, axis=1)
    threshold = HAND_ROLLOFF * total_power
    rolloff = np.where(
        total_power > 0.0,
        np.argmax(cumulative >= threshold[:, None], axis=1) / n_bins,
        0.0,
    )

    bank = _mfcc_bank(win, sample_rate)
    mel_energy = power @ bank.weights.T
    mfcc = dct(np.log(mel_energy + LOG_FLOOR), type=2, norm="ortho", axis=1)[:, :HAND_N_MFCC]

    classes = _chroma_classes(freqs)
    chroma = np.zeros((n_frames, HAND_N_CHROMA))
    for c in range(HAND_N_CHROMA):
        mask = classes == c
        if mask.any():
            chroma[:, c] = power[:, mask].sum(axis=1)
    chroma /= np.maximum(total_power, eps)[:, None]
    chroma_dev = chroma.std(axis=1)

    return np.column_stack([
        zcr, energy, energy_entropy, centroid, spread,
        spectral_entropy, flux, rolloff, mfcc, chroma, chroma_dev,
    ])


_mfcc_bank_cache: dict[tuple[int, int], MelFilterBank] = {}


def _mfcc_bank(win: int, sample_rate: int) -> MelFilterBank:
    cache_key = (win, sample_rate)
    if cache_key not in _mfcc_bank_cache:
        _mfcc_bank_cache[cache_key] = mel_filterbank(
            win, HAND_MFCC_BANDS, 0.0, sample_rate / 2.0, sample_rate
        )
    return _mfcc_bank_cache[cache_key]


_chroma_cache: dict[tuple[int, ...], np.ndarray] = {}


def _chroma_classes(freqs: np.ndarray) -> np.ndarray:
    """Pitch class per FFT bin (nearest semitone relative to A4); DC is -1."""
    cache_key = (len(freqs), int(freqs[-1]))
    if cache_key not in _chroma_cache:
        classes = np.full(len(freqs), -1, dtype=np.int64)
        positive = freqs > 0.0
        semitones = np.rint(12.0 * np.log2(freqs[positive] / CHROMA_REFERENCE_HZ))
        classes[positive] = semitones.astype(np.int64) % HAND_N_CHROMA
        _chroma_cache[cache_key] = classes
    return _chroma_cache[cache_key]


def handcrafted_embedding(clip: AudioClip, key: SpokenNameKey | None = None) -> Embedding:
    """Pooled short-term feature embedding: [means(68), stds(68)]."""
    if clip.sample_rate != TARGET_SAMPLE_RATE:
        clip = resample(clip, TARGET_SAMPLE_RATE)
    x = clip.samples
    if x.size == 0:
        raise EmptyClipError("cannot embed an empty clip")
    if len(x) < HAND_WINDOW:
        raise ClipTooShortError(
            f"clip has {len(x)} samples; at least {HAND_WINDOW} (one frame) required"
        )
    frames = sliding_window_view(x, HAND_WINDOW)[::HAND_HOP]
    features = _frame_features(np.ascontiguousarray(frames), TARGET_SAMPLE_RATE)
    deltas = np.zeros_like(features)
    deltas[1:] = np.diff(features, axis=0)
    full = np.hstack([features, deltas])
    vector = np.concatenate([full.mean(axis=0), full.std(axis=0)])
    return Embedding(backend=EmbeddingBackend.HANDCRAFTED, vector=vector, key=key)


def extract(clip: AudioClip, backend: EmbeddingBackend, key: SpokenNameKey | None = None) -> Embedding:
    if backend is EmbeddingBackend.MEL_GRID:
        return mel_grid_embedding(clip, key)
    return handcrafted_embedding(clip, key)


# --- TSV store ----------------------------------------------------------------

_STORE_MAGIC = "#namesound-embeddings"
_STORE_VERSION = "v1"


def save_embeddings(
    path: str | Path,
    embeddings: Sequence[Embedding],
    language: str,
    accent: str = "",
) -> None:
    """Write embeddings as the v1 TSV store format."""
    if not embeddings:
        raise EmbeddingStoreError("refusing to write an empty embedding store")
    backend = embeddings[0].backend
    lines = [
        f"{_STORE_MAGIC} {_STORE_VERSION} backend={backend.value} "
        f"dim={backend.dim} lang={language} accent={accent}"
    ]
    for emb in embeddings:
        if emb.backend is not backend:
            raise EmbeddingStoreError("mixed backends in one store")
        if emb.key is None:
            raise EmbeddingStoreError("cannot store an embedding without a name key")
        values = " ".join(repr(float(v)) for v in emb.vector)
        lines.append(f"{emb.key.name.normalized}\t{values}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_embeddings(path: str | Path) -> list[Embedding]:
    """Read a v1 TSV store back into embeddings."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        fields = header.split()
        if len(fields) < 2 or fields[0] != _STORE_MAGIC or fields[1] != _STORE_VERSION:
            raise EmbeddingStoreError(f"{path}: not a {_STORE_MAGIC} {_STORE_VERSION} file")
        meta = dict(f.split("=", 1) for f in fields[2:] if "=" in f)
        try:
            backend = EmbeddingBackend(meta["backend"])
            dim = int(meta["dim"])
        except (KeyError, ValueError) as exc:
            raise EmbeddingStoreError(f"{path}: bad header {header!r}") from exc
        if dim != backend.dim:
            raise EmbeddingStoreError(f"{path}: dim {dim} inconsistent with backend {backend.value}")
        language = meta.get("lang", "en")
        accent = meta.get("accent", "")
        embeddings = []
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                name_field, values_field = line.split("\t", 1)
            except ValueError as exc:
                raise EmbeddingStoreError(f"{path}:{line_no}: missing TAB") from exc
            vector = np.array(
                [float(v) for v in values_field.split()], dtype=np.float64
            )
            if vector.shape[0] != dim:
                raise EmbeddingStoreError(
                    f"{path}:{line_no}: expected {dim} values, got {vector.shape[0]}"
                )
            key = SpokenNameKey(name=Name(name_field), language=language, accent=accent)
            embeddings.append(Embedding(backend=backend, vector=vector, key=key))
    if not embeddings:
        raise EmbeddingStoreError(f"{path}: store holds no embeddings")
    return embeddings
