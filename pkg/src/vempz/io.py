"""WAV framing and the JSON/CSV record formats.

Every JSON record carries ``"schema": "<name>/<major>.<minor>"``; readers
accept any minor version of the major version they know.
"""

from __future__ import annotations

import csv
import json
import wave
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy.signal import freqz

from .errors import FormatError
from .model import Frame, PoleZeroModel
from .synthesis import SynthFrame
from .vem import AnalysisResult

__all__ = [
    "SCHEMA_MAJOR",
    "read_wav",
    "read_wav_samples",
    "write_wav",
    "check_schema",
    "synth_frame_to_json",
    "read_synth_json",
    "analysis_to_json",
    "response_table",
    "load_model",
    "model_to_json",
    "load_json",
    "dump_json",
    "write_csv",
]

SCHEMA_MAJOR = 1
_SCHEMAS = ("synth_frame", "analysis", "experiment", "model")


def read_wav_samples(path) -> tuple[np.ndarray, int]:
    """All samples of a mono 16-bit PCM WAV, scaled to [-1, 1)."""
    try:
        with wave.open(str(path), "rb") as w:
            if w.getcomptype() != "NONE":
                raise FormatError(f"{path}: compressed WAV is not supported")
            if w.getnchannels() != 1:
                raise FormatError(f"{path}: expected mono, got {w.getnchannels()} channels")
            if w.getsampwidth() != 2:
                raise FormatError(f"{path}: expected 16-bit samples, got {8 * w.getsampwidth()}-bit")
            n = w.getnframes()
            rate = w.getframerate()
            raw = w.readframes(n)
    except (wave.Error, EOFError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if len(raw) != 2 * n:
        raise FormatError(f"{path}: truncated data chunk ({len(raw) // 2} of {n} samples)")
    return np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0, rate


def read_wav(path, frame_length: int = 240, hop: int = 240) -> Iterator[Frame]:
    """Yield rectangular frames; a trailing partial frame is dropped."""
    samples, rate = read_wav_samples(path)
    for start in range(0, samples.size - frame_length + 1, hop):
        yield Frame(samples[start : start + frame_length], rate)


def write_wav(path, samples, sample_rate: int) -> None:
    """Write 16-bit mono PCM; samples are clipped to [-1, 1)."""
    x = np.clip(np.round(np.asarray(samples, dtype=float) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(int(sample_rate))
        w.writeframes(x.tobytes())


def _schema(name: str) -> str:
    return f"vempz.{name}/{SCHEMA_MAJOR}.0"


def check_schema(record: dict, name: str | None = None) -> str:
    """Return the record's schema name, rejecting unknown names or major versions."""
    tag = record.get("schema") if isinstance(record, dict) else None
    if not isinstance(tag, str) or "/" not in tag or not tag.startswith("vempz."):
        raise FormatError(f"missing or malformed schema tag: {tag!r}")
    kind, version = tag[len("vempz."):].split("/", 1)
    try:
        major = int(version.split(".")[0])
    except ValueError as exc:
        raise FormatError(f"bad schema version {version!r}") from exc
    if major != SCHEMA_MAJOR:
        raise FormatError(f"unsupported {kind} schema major version {major}")
    if kind not in _SCHEMAS or (name is not None and kind != name):
        raise FormatError(f"expected a {name} record, got {kind}")
    return kind


def dump_json(record: dict, path) -> None:
    Path(path).write_text(json.dumps(record, indent=1, allow_nan=False) + "\n", encoding="utf-8")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def synth_frame_to_json(sf: SynthFrame, **extra) -> dict:
    meta = {**sf.spec.to_dict(), "onset": sf.onset, **extra}
    return {
        "schema": _schema("synth_frame"),
        "y": sf.y.tolist(),
        "e_true": sf.e_true.tolist(),
        "m_true": sf.m_true.tolist(),
        "a": sf.model_true.a.tolist(),
        "b": sf.model_true.b.tolist(),
        "gain": sf.model_true.gain,
        "metadata": meta,
    }


def read_synth_json(path) -> tuple[Frame, PoleZeroModel, dict]:
    rec = load_json(path)
    check_schema(rec, "synth_frame")
    meta = rec.get("metadata", {})
    frame = Frame(rec["y"], meta.get("sample_rate", 8000.0))
    return frame, PoleZeroModel.from_dict(rec), meta


def response_table(model: PoleZeroModel, frame: Frame, n_points: int = 512) -> dict:
    """Model response and periodogram (dB) at ``n_points`` frequencies on [0, fs/2]."""
    freqs, h = model.frequency_response(n_points, frame.sample_rate)
    _, yf = freqz(frame.samples, [1.0], worN=freqs, fs=frame.sample_rate)
    tiny = np.finfo(float).tiny
    return {
        "freq_hz": freqs.tolist(),
        "model_db": (10 * np.log10(np.abs(h) ** 2 + tiny)).tolist(),
        "periodogram_db": (10 * np.log10(np.abs(yf) ** 2 / frame.samples.size + tiny)).tolist(),
    }


def analysis_to_json(result: AnalysisResult, frame: Frame, **extra) -> dict:
    def opt(x):
        return None if x is None else np.asarray(x).tolist()

    rec = {
        "schema": _schema("analysis"),
        "method": result.method,
        "k": result.model.k,
        "l": result.model.l,
        "block_size": result.block_size,
        "model": result.model.to_dict(),
        "residual_mean": np.asarray(result.residual_mean).tolist(),
        "elbo_trace": list(result.elbo_trace),
        "elbo": result.elbo,
        "iterations": result.iterations,
        "converged": result.converged,
        "alpha_mean": opt(result.alpha_mean),
        "gamma_mean": result.gamma_mean,
        "sample_rate": frame.sample_rate,
        "frequency_response": response_table(result.model, frame),
    }
    rec.update(extra)
    return rec


def load_model(path) -> PoleZeroModel:
    """Read a model from a model, synth-frame or analysis record."""
    rec = load_json(path)
    kind = check_schema(rec)
    if kind == "analysis":
        return PoleZeroModel.from_dict(rec["model"])
    if kind in ("synth_frame", "model"):
        return PoleZeroModel.from_dict(rec)
    raise FormatError(f"{path}: a {kind} record does not contain a model")


def model_to_json(model: PoleZeroModel) -> dict:
    return {"schema": _schema("model"), **model.to_dict()}


def write_csv(path_or_file, header, rows) -> None:
    """Comma-separated, header row, LF line endings."""
    def _write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    if hasattr(path_or_file, "write"):
        _write(path_or_file)
    else:
        with open(path_or_file, "w", newline="", encoding="utf-8") as fh:
            _write(fh)
