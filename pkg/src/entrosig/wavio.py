"""RIFF/WAVE ingestion and 16-bit PCM output.

Samples are kept in the codec's native scale (a 16-bit file yields values
in [-32768, 32767]); no normalization happens here, so amplitude-scale
settings like noise sigmas keep their conventional integer-scale meaning.
"""

from __future__ import annotations

import logging
import struct
import wave
from pathlib import Path

import numpy as np

from entrosig.distributions import SignalBuffer

log = logging.getLogger(__name__)

_PCM = 1
_IEEE_FLOAT = 3
_EXTENSIBLE = 0xFFFE


class WavFormatError(ValueError):
    """The file is not a WAV this reader supports, or is damaged."""


def read_wav(path) -> SignalBuffer:
    """Read a PCM WAV file into a SignalBuffer in native amplitude scale.

    Supports 8/16/24-bit integer and 32-bit float samples, mono or
    multi-channel (channel 0 is taken with a warning).
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise WavFormatError(f"{path}: truncated {chunk_id!r} chunk")
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise WavFormatError(f"{path}: missing fmt or data chunk")
    if len(fmt) < 16:
        raise WavFormatError(f"{path}: malformed fmt chunk")

    audio_format, channels, sample_rate, _, block_align, bits = struct.unpack_from(
        "<HHIIHH", fmt
    )
    if audio_format == _EXTENSIBLE:
        if len(fmt) < 26:
            raise WavFormatError(f"{path}: malformed extensible fmt chunk")
        (audio_format,) = struct.unpack_from("<H", fmt, 24)
    if channels < 1 or sample_rate < 1 or block_align < 1:
        raise WavFormatError(f"{path}: malformed header fields")
    if len(payload) == 0:
        raise WavFormatError(f"{path}: zero-length data chunk")
    if len(payload) % block_align != 0:
        raise WavFormatError(f"{path}: data chunk is not a whole number of frames")

    if audio_format == _PCM and bits == 8:
        samples = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) - 128.0
    elif audio_format == _PCM and bits == 16:
        samples = np.frombuffer(payload, dtype="<i2").astype(np.float64)
    elif audio_format == _PCM and bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        values = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
        values -= (values & 0x800000) << 1  # sign-extend 24-bit
        samples = values.astype(np.float64)
    elif audio_format == _IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise WavFormatError(f"{path}: unsupported codec (format {audio_format}, {bits}-bit)")

    if channels > 1:
        log.warning("%s: %d channels; keeping channel 0 only", path, channels)
        samples = samples[::channels]
    return SignalBuffer(samples, sample_rate)


def write_wav(path, buf: SignalBuffer) -> None:
    """Write a buffer as mono 16-bit PCM, rounding and clipping to range."""
    if len(buf) == 0:
        raise ValueError("refusing to write an empty buffer")
    values = np.clip(np.rint(buf.samples), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as out:
        out.setnchannels(1)
        out.setsampwidth(2)
        out.setframerate(buf.sample_rate)
        out.writeframes(values.tobytes())
