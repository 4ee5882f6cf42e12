"""Frame-walking probe against the synthesizer's known frame counts."""

import random

import pytest

from audiolib import mp3
from audiolib.errors import NotAudio


def expected_duration(frame_count: int, sample_rate: int) -> float:
    return frame_count * mp3.SAMPLES_PER_FRAME / sample_rate


class TestFrameHeader:
    def test_parse_roundtrip(self):
        frame = mp3.build_frame(128, 44100)
        header = mp3.parse_frame_header(frame[:4])
        assert header is not None
        assert header.bitrate_kbps == 128
        assert header.sample_rate == 44100
        assert header.length == len(frame) == 417

    def test_rejects_garbage(self):
        assert mp3.parse_frame_header(b"\x00\x00\x00\x00") is None
        assert mp3.parse_frame_header(b"\xff\xe0\x00\x00") is None  # MPEG-2
        assert mp3.parse_frame_header(b"\xff\xfb\xf0\x00") is None  # bad bitrate

    def test_padded_frame_length(self):
        padded = mp3.build_frame(128, 44100, padded=True)
        assert len(padded) == 418
        assert mp3.parse_frame_header(padded[:4]).length == 418


class TestId3v2:
    def test_size_parses(self):
        tag = mp3.build_id3v2(2038)
        assert len(tag) == 2048
        assert mp3.id3v2_tag_size(tag[:10]) == 2048

    def test_absent(self):
        assert mp3.id3v2_tag_size(b"\xff\xfb\x90\x44" * 3) == 0


class TestProbe:
    def test_known_frame_count(self):
        # 1000 frames at 128 kbps / 44.1 kHz
        data = mp3.build_cbr(1000, 128, 44100)
        probe = mp3.probe(data)
        assert probe.container == "Mp3"
        assert probe.frame_count == 1000
        assert probe.sample_rate == 44100
        tolerance = mp3.SAMPLES_PER_FRAME / 44100  # one frame
        assert abs(probe.duration_seconds - expected_duration(1000, 44100)) \
            <= tolerance
        assert round(probe.duration_seconds, 3) == 26.122

    def test_tag_invariance(self):
        data = mp3.build_cbr(500, 192, 48000)
        bare = mp3.probe(data)
        tagged = mp3.probe(mp3.build_id3v2(2038) + data)
        assert tagged.frame_count == bare.frame_count == 500
        assert tagged.duration_seconds == bare.duration_seconds

    def test_random_tag_sizes_never_change_duration(self):
        rng = random.Random(7)
        data = mp3.build_cbr(64, 64, 32000)
        bare = mp3.probe(data)
        for _ in range(25):
            tag = mp3.build_id3v2(rng.randrange(0, 60_000))
            probe = mp3.probe(tag + data)
            assert probe.frame_count == bare.frame_count
            assert probe.duration_seconds == bare.duration_seconds

    def test_random_bytes_not_audio(self):
        rng = random.Random(11)
        noise = bytes(rng.randrange(256) for _ in range(4096))
        # zero out potential sync bytes so the scan cannot false-positive
        with pytest.raises(NotAudio):
            mp3.probe(noise.replace(b"\xff", b"\x00"))

    def test_random_bytes_with_fake_syncs(self):
        # even with 0xFF bytes present, chained-header validation rejects noise
        rng = random.Random(13)
        noise = bytes(rng.randrange(256) for _ in range(4096))
        try:
            mp3.probe(noise)
        except NotAudio:
            pass  # overwhelmingly the case; a chained pair would be legal mp3

    def test_vbr_frame_walk(self):
        # alternating bitrates: duration is still the exact per-frame sum
        frames = [mp3.build_frame(64, 44100), mp3.build_frame(320, 44100)] * 50
        probe = mp3.probe(b"".join(frames))
        assert probe.frame_count == 100
        assert probe.duration_seconds == pytest.approx(
            expected_duration(100, 44100))

    def test_trailing_id3v1_tag_ignored(self):
        data = mp3.build_cbr(30, 128, 44100) + b"TAG" + bytes(125)
        assert mp3.probe(data).frame_count == 30

    def test_missing_file(self):
        from audiolib.errors import BlobMissing
        with pytest.raises(BlobMissing):
            mp3.probe("/nonexistent/path/audio.mp3")

    def test_probe_from_path(self, tmp_path):
        path = tmp_path / "clip.mp3"
        path.write_bytes(mp3.build_cbr(200, 96, 32000))
        probe = mp3.probe(path)
        assert probe.frame_count == 200
        assert probe.sample_rate == 32000


class TestSynthMatrix:
    @pytest.mark.parametrize("bitrate", [64, 128, 192, 320])
    @pytest.mark.parametrize("sample_rate", [32000, 44100, 48000])
    def test_all_combinations(self, bitrate, sample_rate):
        data = mp3.build_cbr(250, bitrate, sample_rate)
        probe = mp3.probe(data)
        assert probe.frame_count == 250
        assert probe.sample_rate == sample_rate
        assert abs(probe.duration_seconds -
                   expected_duration(250, sample_rate)) \
            <= mp3.SAMPLES_PER_FRAME / sample_rate
