"""MPEG-1 Layer III frame walking: duration probing plus a tiny synthesizer.

The probe never trusts container metadata for timing: it skips any leading
ID3v2 tag, then walks frame headers and sums samples-per-frame over the
sample rate, which stays exact for both CBR and VBR streams.  Xing/VBRI
shortcut headers are deliberately ignored.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import BinaryIO

from .errors import BlobMissing, NotAudio

SAMPLES_PER_FRAME = 1152
# MPEG-1 tables; index 0 / 15 of the bitrate row are free-format / invalid
SAMPLE_RATES = (44100, 48000, 32000)
BITRATES_KBPS = (
    0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, 0,
)
SYNC_SCAN_LIMIT = 64 * 1024
_ID3V1_TAG_SIZE = 128


@dataclass(frozen=True)
class AudioProbe:
    container: str  # "Mp3" | "Unknown"
    duration_seconds: float
    frame_count: int
    sample_rate: int


@dataclass(frozen=True)
class FrameHeader:
    length: int
    bitrate_kbps: int
    sample_rate: int
    padded: bool


def parse_frame_header(header: bytes) -> FrameHeader | None:
    """Decode 4 header bytes; None unless a valid MPEG-1 Layer III frame."""
    if len(header) < 4:
        return None
    b0, b1, b2, _ = header[0], header[1], header[2], header[3]
    if b0 != 0xFF or (b1 & 0xE0) != 0xE0:
        return None
    version = (b1 >> 3) & 0x03  # 3 = MPEG-1
    layer = (b1 >> 1) & 0x03    # 1 = Layer III
    if version != 3 or layer != 1:
        return None
    bitrate_index = (b2 >> 4) & 0x0F
    sample_rate_index = (b2 >> 2) & 0x03
    if bitrate_index in (0, 15) or sample_rate_index == 3:
        return None
    padded = bool(b2 & 0x02)
    bitrate = BITRATES_KBPS[bitrate_index]
    sample_rate = SAMPLE_RATES[sample_rate_index]
    length = (144_000 * bitrate) // sample_rate + (1 if padded else 0)
    return FrameHeader(length, bitrate, sample_rate, padded)


def id3v2_tag_size(prefix: bytes) -> int:
    """Total byte length of a leading ID3v2 tag, 0 if absent."""
    if len(prefix) < 10 or prefix[:3] != b"ID3":
        return 0
    flags = prefix[5]
    size = 0
    for b in prefix[6:10]:
        if b & 0x80:  # syncsafe bytes carry 7 bits each
            return 0
        size = (size << 7) | b
    total = 10 + size
    if flags & 0x10:  # footer present
        total += 10
    return total


def probe(source: str | os.PathLike | bytes | BinaryIO) -> AudioProbe:
    """Walk the stream's frames and report exact duration.

    Raises BlobMissing for unreadable paths, NotAudio when no valid frame
    sync appears in the first 64 KiB.
    """
    if isinstance(source, bytes):
        return _probe_stream(io.BytesIO(source))
    if hasattr(source, "read"):
        return _probe_stream(source)
    try:
        fh = open(source, "rb")
    except OSError as exc:
        raise BlobMissing(f"cannot read {source}: {exc}") from exc
    with fh:
        return _probe_stream(fh)


def _probe_stream(fh: BinaryIO) -> AudioProbe:
    fh.seek(0, os.SEEK_END)
    total = fh.tell()
    fh.seek(0)

    tag = id3v2_tag_size(fh.read(10))
    pos = _find_first_frame(fh, tag, total)
    if pos is None:
        raise NotAudio("no MPEG frame sync found in the first 64 KiB")

    frame_count = 0
    duration = 0.0
    sample_rate = 0
    while pos + 4 <= total:
        fh.seek(pos)
        header = parse_frame_header(fh.read(4))
        if header is None:
            break  # trailing tag or junk ends the walk
        if sample_rate == 0:
            sample_rate = header.sample_rate
        frame_count += 1
        duration += SAMPLES_PER_FRAME / header.sample_rate
        pos += header.length
    return AudioProbe("Mp3", duration, frame_count, sample_rate)


def _find_first_frame(fh: BinaryIO, start: int, total: int) -> int | None:
    """Scan up to SYNC_SCAN_LIMIT bytes past the tag for a plausible frame.

    A sync match only counts if the header it starts also chains to a second
    valid header (or cleanly reaches EOF), which rejects random 0xFF bytes.
    """
    fh.seek(start)
    window = fh.read(SYNC_SCAN_LIMIT)
    i = 0
    while True:
        i = window.find(b"\xff", i)
        if i < 0:
            return None
        header = parse_frame_header(window[i:i + 4])
        if header is not None:
            nxt = i + header.length
            if start + nxt == total or start + nxt + 4 > total:
                return start + i
            fh.seek(start + nxt)
            if parse_frame_header(fh.read(4)) is not None:
                return start + i
        i += 1


# --- synthesis (test fixtures and scenario payloads) -----------------------

_BITRATE_INDEX = {v: i for i, v in enumerate(BITRATES_KBPS) if v}
_SAMPLE_RATE_INDEX = {v: i for i, v in enumerate(SAMPLE_RATES)}


def build_frame(bitrate_kbps: int, sample_rate: int, padded: bool = False,
                fill: int = 0x00) -> bytes:
    """One header-consistent CBR frame with an inert payload."""
    b2 = (
        (_BITRATE_INDEX[bitrate_kbps] << 4)
        | (_SAMPLE_RATE_INDEX[sample_rate] << 2)
        | (0x02 if padded else 0x00)
    )
    header = bytes((0xFF, 0xFB, b2, 0x44))
    length = (144_000 * bitrate_kbps) // sample_rate + (1 if padded else 0)
    return header + bytes([fill]) * (length - 4)


def build_cbr(frame_count: int, bitrate_kbps: int = 128,
              sample_rate: int = 44100) -> bytes:
    """A CBR stream of exactly frame_count frames (no tags)."""
    frame = build_frame(bitrate_kbps, sample_rate)
    return frame * frame_count


def build_id3v2(payload_size: int) -> bytes:
    """A well-formed ID3v2.4 tag whose payload is zero padding."""
    if payload_size >= 1 << 28:
        raise ValueError("tag payload too large for a syncsafe size")
    size = bytes(
        (payload_size >> shift) & 0x7F for shift in (21, 14, 7, 0)
    )
    return b"ID3" + bytes((0x04, 0x00, 0x00)) + size + bytes(payload_size)
