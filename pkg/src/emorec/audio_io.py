"""WAV decoding, resampling, and corpus scanning.

Every pipeline stage consumes AudioClip: mono float64 samples in [-1, 1]
plus a sample rate. Corpus directories are scanned into ClipRecord lists
using each collection's published filename convention; labels land in one
canonical 8-emotion set.
"""

from __future__ import annotations

import csv
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyAudio,
    EmptyScan,
    MalformedContainer,
    UnknownLabelCode,
    UnsupportedEncoding,
)

# Canonical label order. Index positions are load-bearing: one-hot columns,
# confusion-matrix axes, and histogram rows all follow this order.
EMOTIONS = ("neutral", "calm", "happy", "sad", "angry", "fear", "disgust", "surprise")
EMOTION_INDEX = {name: i for i, name in enumerate(EMOTIONS)}

DATASETS = ("cremad", "ravdess", "savee", "tess")

PIPELINE_RATE_HZ = 16000
CLIP_SECONDS = 3.0


@dataclass
class AudioClip:
    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def duration_s(self) -> float:
        return self.samples.shape[0] / self.sample_rate_hz


@dataclass(frozen=True)
class ClipRecord:
    path: str
    dataset: str
    emotion: str
    speaker: str = ""
    provenance: str = "original"

    def __post_init__(self):
        if self.emotion not in EMOTION_INDEX:
            raise UnknownLabelCode(f"not a canonical emotion: {self.emotion!r}")


# --------------------------------------------------------------------------
# WAV container
# --------------------------------------------------------------------------

_PCM = 1
_IEEE_FLOAT = 3


def read_wav(path) -> AudioClip:
    """Decode a RIFF/WAVE file: PCM 8/16/24/32-bit or IEEE float-32, mono or
    stereo (stereo is mean-mixed). Integer samples are scaled by 1/2^(bits-1).
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[0:4] != b"RIFF" or blob[8:12] != b"WAVE":
        raise MalformedContainer(f"not a RIFF/WAVE file: {path}")

    fmt = None
    data = None
    pos = 12
    while pos + 8 <= len(blob):
        chunk_id = blob[pos : pos + 4]
        (size,) = struct.unpack_from("<I", blob, pos + 4)
        body = blob[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise MalformedContainer(
                f"chunk {chunk_id!r} declares {size} bytes but only {len(body)} remain: {path}"
            )
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            data = body
            break
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None or data is None:
        raise MalformedContainer(f"missing fmt/data chunk: {path}")
    if len(fmt) < 16:
        raise MalformedContainer(f"fmt chunk too short ({len(fmt)} bytes): {path}")

    audio_format, channels, rate, _byte_rate, _block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt, 0
    )
    if audio_format not in (_PCM, _IEEE_FLOAT):
        raise UnsupportedEncoding(f"unsupported format tag {audio_format}: {path}")
    if channels not in (1, 2):
        raise UnsupportedEncoding(f"unsupported channel count {channels}: {path}")
    if rate <= 0:
        raise MalformedContainer(f"nonpositive sample rate in header: {path}")

    if audio_format == _IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedEncoding(f"float WAV must be 32-bit, got {bits}: {path}")
        raw = np.frombuffer(data[: len(data) - len(data) % 4], dtype="<f4")
        x = raw.astype(np.float64)
    elif bits == 8:
        x = (np.frombuffer(data, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif bits == 16:
        raw = np.frombuffer(data[: len(data) - len(data) % 2], dtype="<i2")
        x = raw.astype(np.float64) / 32768.0
    elif bits == 24:
        usable = len(data) - len(data) % 3
        b = np.frombuffer(data[:usable], dtype=np.uint8).reshape(-1, 3).astype(np.int64)
        v = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        v = np.where(v >= 1 << 23, v - (1 << 24), v)
        x = v.astype(np.float64) / float(1 << 23)
    elif bits == 32:
        raw = np.frombuffer(data[: len(data) - len(data) % 4], dtype="<i4")
        x = raw.astype(np.float64) / float(1 << 31)
    else:
        raise UnsupportedEncoding(f"unsupported bit depth {bits}: {path}")

    if channels == 2:
        x = x[: x.shape[0] - x.shape[0] % 2].reshape(-1, 2).mean(axis=1)
    if x.shape[0] == 0:
        raise EmptyAudio(f"zero audio frames: {path}")
    return AudioClip(x, int(rate))


def write_wav(path, clip: AudioClip) -> None:
    """Write mono 16-bit PCM. Samples are clipped to [-1, 1] and quantized by
    round(x * 32768), so values read back from a prior read_wav round-trip
    bit-identically at 16-bit precision."""
    x = np.clip(np.asarray(clip.samples, dtype=np.float64), -1.0, 1.0)
    q = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    payload = q.tobytes()
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack("<IHHIIHH", 16, _PCM, 1, clip.sample_rate_hz, clip.sample_rate_hz * 2, 2, 16),
            b"data",
            struct.pack("<I", len(payload)),
        ]
    )
    with open(path, "wb") as fh:
        fh.write(header + payload)


# --------------------------------------------------------------------------
# Resampling and length normalization
# --------------------------------------------------------------------------

_SINC_TAPS = 32  # taps per side


def resample_ratio(x: np.ndarray, ratio: float) -> np.ndarray:
    """Band-limited reinterpolation onto a grid `ratio` times as dense, using
    a Hann-windowed sinc kernel (32 taps per side). The kernel cutoff scales
    with min(1, ratio) so decimation is anti-aliased; per-output tap
    normalization keeps DC exact. Output length = round(len * ratio)."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    out_len = int(np.floor(n * ratio + 0.5))
    if out_len == 0:
        raise EmptyAudio("resampling would produce zero samples")
    cutoff = min(1.0, ratio)
    pad = _SINC_TAPS + 1
    xp = np.concatenate([np.zeros(pad), x, np.zeros(pad)])
    rel = np.arange(-_SINC_TAPS + 1, _SINC_TAPS + 1)  # 64 taps around the center
    out = np.empty(out_len)
    for start in range(0, out_len, 65536):
        stop = min(start + 65536, out_len)
        t = np.arange(start, stop) / ratio  # output positions on the input grid
        base = np.floor(t).astype(np.intp)
        d = (base[:, None] + rel[None, :]) - t[:, None]
        w = cutoff * np.sinc(cutoff * d) * (0.5 + 0.5 * np.cos(np.pi * d / _SINC_TAPS))
        w /= w.sum(axis=1, keepdims=True)
        out[start:stop] = np.sum(w * xp[base[:, None] + rel[None, :] + pad], axis=1)
    return out


def resample(clip: AudioClip, target_hz: int) -> AudioClip:
    """Rate conversion via resample_ratio; same rate returns a copy."""
    if target_hz <= 0:
        raise ValueError("target_hz must be positive")
    if target_hz == clip.sample_rate_hz:
        return AudioClip(clip.samples.copy(), target_hz)
    return AudioClip(resample_ratio(clip.samples, target_hz / clip.sample_rate_hz), target_hz)


def fix_length(clip: AudioClip, seconds: float = CLIP_SECONDS) -> AudioClip:
    """Truncate or zero-pad (at the end) to an exact duration from offset 0."""
    n = int(round(clip.sample_rate_hz * seconds))
    x = clip.samples
    if x.shape[0] >= n:
        return AudioClip(x[:n].copy(), clip.sample_rate_hz)
    out = np.zeros(n)
    out[: x.shape[0]] = x
    return AudioClip(out, clip.sample_rate_hz)


def load_clip(
    path, rate: int = PIPELINE_RATE_HZ, seconds: float | None = CLIP_SECONDS
) -> AudioClip:
    """read_wav -> resample to the pipeline rate -> optional fixed length."""
    clip = resample(read_wav(path), rate)
    return fix_length(clip, seconds) if seconds is not None else clip


# --------------------------------------------------------------------------
# Filename conventions -> canonical labels
# --------------------------------------------------------------------------

_RAVDESS_CODES = {f"{i + 1:02d}": name for i, name in enumerate(EMOTIONS)}
_CREMAD_CODES = {
    "ANG": "angry",
    "DIS": "disgust",
    "FEA": "fear",
    "HAP": "happy",
    "NEU": "neutral",
    "SAD": "sad",
}
_SAVEE_CODES = {
    "a": "angry",
    "d": "disgust",
    "f": "fear",
    "h": "happy",
    "n": "neutral",
    "sa": "sad",
    "su": "surprise",
}
_TESS_WORDS = {
    "neutral": "neutral",
    "happy": "happy",
    "sad": "sad",
    "angry": "angry",
    "fear": "fear",
    "disgust": "disgust",
    "ps": "surprise",
    "surprise": "surprise",
}


def _parse_ravdess(stem: str, parent: str) -> tuple[str, str]:
    parts = stem.split("-")
    if len(parts) < 3 or parts[2] not in _RAVDESS_CODES:
        raise UnknownLabelCode(f"not a recognized emotion field: {stem!r}")
    speaker = parts[6] if len(parts) >= 7 else ""
    return _RAVDESS_CODES[parts[2]], speaker


def _parse_cremad(stem: str, parent: str) -> tuple[str, str]:
    parts = stem.split("_")
    if len(parts) < 3 or parts[2] not in _CREMAD_CODES:
        raise UnknownLabelCode(f"not a recognized emotion token: {stem!r}")
    return _CREMAD_CODES[parts[2]], parts[0]


def _parse_savee(stem: str, parent: str) -> tuple[str, str]:
    # Files ship either as <speaker dir>/a01.wav or flattened as DC_a01.wav.
    parts = stem.split("_")
    code_field = parts[-1]
    speaker = parts[0] if len(parts) > 1 else parent
    prefix = ""
    for ch in code_field:
        if ch.isdigit():
            break
        prefix += ch
    if prefix.lower() not in _SAVEE_CODES:
        raise UnknownLabelCode(f"not a recognized letter prefix: {stem!r}")
    return _SAVEE_CODES[prefix.lower()], speaker


def _parse_tess(stem: str, parent: str) -> tuple[str, str]:
    parts = stem.split("_")
    word = parts[-1].lower()
    if word not in _TESS_WORDS:
        raise UnknownLabelCode(f"not a recognized suffix word: {stem!r}")
    speaker = parts[0] if len(parts) > 1 else ""
    return _TESS_WORDS[word], speaker


_PARSERS = {
    "ravdess": _parse_ravdess,
    "cremad": _parse_cremad,
    "savee": _parse_savee,
    "tess": _parse_tess,
}


def parse_label(filename: str, dataset: str) -> tuple[str, str]:
    """(emotion, speaker) from a corpus filename; raises UnknownLabelCode."""
    if dataset not in _PARSERS:
        raise ValueError(f"unknown dataset {dataset!r}; expected one of {DATASETS}")
    stem = os.path.splitext(os.path.basename(filename))[0]
    parent = os.path.basename(os.path.dirname(os.path.abspath(filename)))
    return _PARSERS[dataset](stem, parent)


def scan_dataset_detailed(root, dataset: str) -> tuple[list[ClipRecord], list[tuple[str, str]]]:
    """All labeled .wav records under root plus (path, reason) skips, in
    lexicographic path order. Repeated scans are byte-identical."""
    if dataset not in _PARSERS:
        raise ValueError(f"unknown dataset {dataset!r}; expected one of {DATASETS}")
    if not os.path.isdir(root):
        raise FileNotFoundError(f"dataset root does not exist: {root}")
    paths = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames.sort()
        for name in filenames:
            if name.lower().endswith(".wav"):
                paths.append(os.path.join(dirpath, name))
    paths.sort()
    records, skipped = [], []
    for p in paths:
        try:
            emotion, speaker = parse_label(p, dataset)
        except UnknownLabelCode as exc:
            skipped.append((p, str(exc)))
            continue
        records.append(ClipRecord(p, dataset, emotion, speaker, "original"))
    return records, skipped


def scan_dataset(root, dataset: str) -> list[ClipRecord]:
    """scan_dataset_detailed minus the skip report; raises EmptyScan on zero
    records."""
    records, _ = scan_dataset_detailed(root, dataset)
    if not records:
        raise EmptyScan(f"no labeled .wav files under {root}")
    return records


# --------------------------------------------------------------------------
# Manifest CSV
# --------------------------------------------------------------------------

MANIFEST_HEADER = ["path", "dataset", "emotion", "speaker", "provenance"]


def write_manifest(records: list[ClipRecord], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for r in records:
            writer.writerow([r.path, r.dataset, r.emotion, r.speaker, r.provenance])


def read_manifest(path) -> list[ClipRecord]:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise ValueError(f"bad manifest header in {path}: {header}")
        records = []
        for row in reader:
            if len(row) != 5:
                raise ValueError(f"bad manifest row in {path}: {row}")
            records.append(ClipRecord(*row))
    return records
