"""WAV container handling, resampling, backends, and the synthesis cache."""

import struct
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from namesound.corpus import Name
from namesound.errors import (
    BackendUnavailableError,
    DecodeError,
    SynthesisFailedError,
)
from namesound.speech import (
    AudioClip,
    CommandBackend,
    FixtureBackend,
    SpokenNameKey,
    cache_path,
    decode_wav,
    encode_wav,
    load_manifest,
    prefetch,
    render_name_tones,
    resample,
    synthesize,
)


def pcm16_wav(values, sample_rate=16000, channels=1) -> bytes:
    payload = struct.pack(f"<{len(values)}h", *values)
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, 1, channels, sample_rate,
        sample_rate * 2 * channels, 2 * channels, 16,
    )
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


def float32_wav(values, sample_rate=16000) -> bytes:
    payload = struct.pack(f"<{len(values)}f", *values)
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, 3, 1, sample_rate, sample_rate * 4, 4, 32
    )
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


# --- decoding -----------------------------------------------------------------

def test_decode_pcm16_scaling():
    clip = decode_wav(pcm16_wav([32767, -32768, 0]))
    assert clip.samples[0] == pytest.approx(32767 / 32768)
    assert clip.samples[1] == -1.0
    assert clip.samples[2] == 0.0
    assert clip.sample_rate == 16000


def test_decode_stereo_downmix():
    # frames (0.5, -0.5) average to silence
    clip = decode_wav(pcm16_wav([16384, -16384, 16384, -16384], channels=2))
    assert np.allclose(clip.samples, [0.0, 0.0])


def test_decode_float32():
    clip = decode_wav(float32_wav([0.25, -0.75]))
    assert np.allclose(clip.samples, [0.25, -0.75])


def test_decode_rejects_garbage():
    with pytest.raises(DecodeError):
        decode_wav(b"NOTWAV..........")


def test_decode_rejects_unsupported_codec():
    bad = bytearray(pcm16_wav([0, 0]))
    bad[34:36] = struct.pack("<H", 8)  # claim 8-bit samples
    with pytest.raises(DecodeError):
        decode_wav(bytes(bad))


def test_decode_rejects_truncated_data():
    wav = pcm16_wav([1, 2, 3, 4])
    with pytest.raises(DecodeError):
        decode_wav(wav[:-5])


def test_decode_rejects_missing_data_chunk():
    header = b"RIFF" + struct.pack("<I", 28) + b"WAVE"
    header += b"fmt " + struct.pack("<IHHIIHH", 16, 1, 1, 16000, 32000, 2, 16)
    with pytest.raises(DecodeError):
        decode_wav(header)


@settings(max_examples=50)
@given(st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=1, max_size=200))
def test_encode_decode_roundtrip_within_one_step(values):
    clip = AudioClip(samples=np.array(values), sample_rate=16000)
    decoded = decode_wav(encode_wav(clip))
    assert decoded.sample_rate == 16000
    assert np.abs(decoded.samples - clip.samples).max() <= 1.0 / 32768 + 1e-12


def test_audio_clip_validation():
    with pytest.raises(ValueError):
        AudioClip(samples=np.array([[0.0, 0.0]]), sample_rate=16000)
    with pytest.raises(ValueError):
        AudioClip(samples=np.array([1.5]), sample_rate=16000)


# --- resampling -----------------------------------------------------------------

def test_resample_identity():
    clip = render_name_tones("anna")
    out = resample(clip, clip.sample_rate)
    assert out is clip


def test_resample_halves_length():
    rng = np.random.default_rng(7)
    clip = AudioClip(samples=rng.uniform(-0.5, 0.5, 32000), sample_rate=32000)
    out = resample(clip, 16000)
    assert abs(len(out.samples) - 16000) <= 1
    assert out.sample_rate == 16000


def test_resample_preserves_sine_frequency():
    sr_in, sr_out = 44100, 16000
    t = np.arange(sr_in * 2) / sr_in
    clip = AudioClip(samples=0.5 * np.sin(2 * np.pi * 440.0 * t), sample_rate=sr_in)
    out = resample(clip, sr_out)
    spectrum = np.abs(np.fft.rfft(out.samples))
    peak_hz = np.argmax(spectrum) * sr_out / len(out.samples)
    assert abs(peak_hz - 440.0) <= 2.0


@pytest.mark.parametrize("sr_in,sr_out", [(8000, 16000), (22050, 16000), (48000, 16000), (16000, 8000)])
def test_resample_preserves_duration(sr_in, sr_out):
    rng = np.random.default_rng(sr_in)
    clip = AudioClip(samples=rng.uniform(-0.9, 0.9, int(sr_in * 0.7)), sample_rate=sr_in)
    out = resample(clip, sr_out)
    assert abs(len(out.samples) / sr_out - len(clip.samples) / sr_in) <= 1.0 / sr_out


# --- backends -------------------------------------------------------------------

def test_fixture_backend_reads_files(tmp_path):
    wav = encode_wav(render_name_tones("beatrice"))
    (tmp_path / "beatrice.fr.wav").write_bytes(wav)
    backend = FixtureBackend(tmp_path)
    data, container = backend.synthesize_raw(
        SpokenNameKey(name=Name("beatrice"), language="fr")
    )
    assert container == "wav"
    assert data == wav
    assert decode_wav(data).sample_rate == 16000


def test_fixture_backend_prefers_accented_file(tmp_path):
    plain = encode_wav(render_name_tones("ana"))
    accented = encode_wav(render_name_tones("bob"))
    (tmp_path / "ana.en.wav").write_bytes(plain)
    (tmp_path / "ana.en.uk.wav").write_bytes(accented)
    backend = FixtureBackend(tmp_path)
    data, _ = backend.synthesize_raw(SpokenNameKey(name=Name("ana"), language="en", accent="uk"))
    assert data == accented


def test_fixture_backend_missing_file(tmp_path):
    backend = FixtureBackend(tmp_path)
    with pytest.raises(SynthesisFailedError):
        backend.synthesize_raw(SpokenNameKey(name=Name("ghost"), language="fr"))


def test_command_backend_runs_template(tmp_path):
    helper = tmp_path / "tts_stub.py"
    helper.write_text(
        "import sys\n"
        "from namesound.speech import render_name_tones, encode_wav\n"
        "sys.stdout.buffer.write(encode_wav(render_name_tones(sys.argv[1])))\n",
        encoding="utf-8",
    )
    backend = CommandBackend(f"{sys.executable} {helper} {{name}} {{language}}")
    data, container = backend.synthesize_raw(SpokenNameKey(name=Name("anna"), language="en"))
    assert container == "wav"
    assert data == encode_wav(render_name_tones("anna"))


def test_command_backend_missing_command():
    backend = CommandBackend("definitely-not-a-real-command-xyz {name}")
    with pytest.raises(BackendUnavailableError):
        backend.synthesize_raw(SpokenNameKey(name=Name("anna"), language="en"))


def test_command_backend_nonzero_exit():
    backend = CommandBackend(f"{sys.executable} -c exit(3)")
    with pytest.raises(SynthesisFailedError):
        backend.synthesize_raw(SpokenNameKey(name=Name("anna"), language="en"))


# --- synthesize + cache -----------------------------------------------------------

def test_synthesize_caches_byte_identically(tmp_path):
    audio_dir = tmp_path / "audio"
    cache_dir = tmp_path / "cache"
    audio_dir.mkdir()
    clip = render_name_tones("beatrice")
    (audio_dir / "beatrice.fr.wav").write_bytes(encode_wav(clip))
    key = SpokenNameKey(name=Name("beatrice"), language="fr")
    backend = FixtureBackend(audio_dir)

    first = synthesize(key, backend, cache_dir)
    path = cache_path(cache_dir, key)
    assert path.is_file()
    cached_bytes = path.read_bytes()

    second = synthesize(key, backend, cache_dir)
    assert path.read_bytes() == cached_bytes
    assert first == second
    assert first.sample_rate == 16000


def test_synthesize_resamples_to_16k(tmp_path):
    audio_dir = tmp_path / "audio"
    cache_dir = tmp_path / "cache"
    audio_dir.mkdir()
    clip = render_name_tones("anna", sample_rate=44100)
    (audio_dir / "anna.en.wav").write_bytes(encode_wav(clip))
    key = SpokenNameKey(name=Name("anna"), language="en")
    out = synthesize(key, FixtureBackend(audio_dir), cache_dir)
    assert out.sample_rate == 16000


def test_synthesize_rejects_too_short(tmp_path):
    audio_dir = tmp_path / "audio"
    cache_dir = tmp_path / "cache"
    audio_dir.mkdir()
    short = AudioClip(samples=np.zeros(800) + 0.1, sample_rate=16000)  # 50 ms
    (audio_dir / "ana.en.wav").write_bytes(encode_wav(short))
    with pytest.raises(SynthesisFailedError):
        synthesize(SpokenNameKey(name=Name("ana"), language="en"),
                   FixtureBackend(audio_dir), cache_dir)


def test_synthesize_missing_fixture(tmp_path):
    with pytest.raises(SynthesisFailedError):
        synthesize(SpokenNameKey(name=Name("ghost"), language="en"),
                   FixtureBackend(tmp_path / "audio"), tmp_path / "cache")


def test_manifest_maps_hash_to_name(tmp_path):
    audio_dir = tmp_path / "audio"
    cache_dir = tmp_path / "cache"
    audio_dir.mkdir()
    (audio_dir / "anna.en.wav").write_bytes(encode_wav(render_name_tones("anna")))
    key = SpokenNameKey(name=Name("anna"), language="en")
    synthesize(key, FixtureBackend(audio_dir), cache_dir)
    manifest = load_manifest(cache_dir)
    assert manifest[cache_path(cache_dir, key).stem] == "anna"


def test_prefetch_counts(tmp_path):
    audio_dir = tmp_path / "audio"
    cache_dir = tmp_path / "cache"
    audio_dir.mkdir()
    for n in ("anna", "beatrice"):
        (audio_dir / f"{n}.en.wav").write_bytes(encode_wav(render_name_tones(n)))
    names = [Name("anna"), Name("beatrice"), Name("ghost")]
    counts = prefetch(names, "en", "", FixtureBackend(audio_dir), cache_dir, max_workers=2)
    assert counts == {"synthesized": 2, "failed": 1}


# --- tone rendering ----------------------------------------------------------------

def test_render_name_tones_deterministic_and_bounded():
    a = render_name_tones("beatrice")
    b = render_name_tones("beatrice")
    assert a == b
    assert np.abs(a.samples).max() <= 1.0
    assert a.sample_rate == 16000
    assert render_name_tones("beatrice") != render_name_tones("beatrix")
