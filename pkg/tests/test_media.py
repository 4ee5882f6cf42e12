"""Upload sessions, probing, streaming, and playback accounting."""

import random

import pytest

from audiolib import mp3
from audiolib.domain import Role
from audiolib.errors import (
    BadChecksumFormat,
    ChecksumMismatch,
    ChunkConflict,
    NoSuchSession,
    NotPublished,
    RangeRejected,
    SizeRejected,
    UploadIncomplete,
    WrongState,
)
from audiolib.media import MediaStore, sha256_hex


def random_chunking(rng, size):
    """Cut [0, size) into random non-overlapping chunks, shuffled."""
    cuts = sorted(rng.sample(range(1, size), min(rng.randrange(1, 12), size - 1))) \
        if size > 2 else []
    bounds = [0] + cuts + [size]
    chunks = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    rng.shuffle(chunks)
    return chunks


class TestBeginUpload:
    def test_happy_path(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        session_id = engine.media.begin_upload(owner, 1_048_576, "ab" * 32)
        state = engine.media.received_state(session_id)
        assert state.state == "Open" and state.received == []

    def test_zero_size_rejected(self, engine, roles):
        with pytest.raises(SizeRejected):
            engine.media.begin_upload(roles["volunteer"]["account_id"], 0,
                                      "ab" * 32)

    def test_over_limit_rejected(self, engine, roles):
        with pytest.raises(SizeRejected):
            engine.media.begin_upload(roles["volunteer"]["account_id"],
                                      engine.media.max_upload_bytes + 1,
                                      "ab" * 32)

    def test_malformed_checksum(self, engine, roles):
        with pytest.raises(BadChecksumFormat):
            engine.media.begin_upload(roles["volunteer"]["account_id"],
                                      1024, "xyz")


class TestPutChunk:
    def test_out_of_order_coverage(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        payload = bytes(range(256)) * 3  # 768 bytes
        session_id = engine.media.begin_upload(owner, 768, sha256_hex(payload))
        for offset in (512, 0, 256):
            result = engine.media.put_chunk(
                session_id, offset, payload[offset:offset + 256])
        assert result.fraction == 1.0 and result.complete
        blob = engine.media.finish_upload(session_id)
        stored = engine.blobs.read(blob.key)
        assert sha256_hex(stored) == sha256_hex(payload)

    def test_identical_resend_is_idempotent(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        payload = b"x" * 512
        session_id = engine.media.begin_upload(owner, 512, sha256_hex(payload))
        engine.media.put_chunk(session_id, 0, payload[:256])
        result = engine.media.put_chunk(session_id, 0, payload[:256])
        assert result.received_bytes == 256

    def test_conflicting_bytes_rejected(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        session_id = engine.media.begin_upload(owner, 512, "ab" * 32)
        engine.media.put_chunk(session_id, 0, b"a" * 256)
        with pytest.raises(ChunkConflict):
            engine.media.put_chunk(session_id, 128, b"b" * 128)

    def test_partial_overlap_with_matching_bytes(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        payload = bytes(range(200)) + b"\x01" * 312
        session_id = engine.media.begin_upload(owner, 512, sha256_hex(payload))
        engine.media.put_chunk(session_id, 0, payload[:300])
        result = engine.media.put_chunk(session_id, 200, payload[200:512])
        assert result.complete

    def test_beyond_declared_size(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        session_id = engine.media.begin_upload(owner, 512, "ab" * 32)
        with pytest.raises(RangeRejected):
            engine.media.put_chunk(session_id, 500, b"z" * 13)

    def test_unknown_session(self, engine):
        with pytest.raises(NoSuchSession):
            engine.media.put_chunk("ghost", 0, b"z")


class TestFinishUpload:
    def test_gap_listing(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        payload = bytes(768)
        session_id = engine.media.begin_upload(owner, 768, sha256_hex(payload))
        engine.media.put_chunk(session_id, 0, payload[:256])
        engine.media.put_chunk(session_id, 512, payload[512:])
        with pytest.raises(UploadIncomplete) as excinfo:
            engine.media.finish_upload(session_id)
        assert excinfo.value.data["missing"] == [[256, 512]]
        assert engine.media.received_state(session_id).state == "Open"

    def test_digest_mismatch_aborts(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        session_id = engine.media.begin_upload(owner, 16, "ab" * 32)
        engine.media.put_chunk(session_id, 0, b"0123456789abcdef")
        with pytest.raises(ChecksumMismatch):
            engine.media.finish_upload(session_id)
        assert engine.media.received_state(session_id).state == "Aborted"
        with pytest.raises(WrongState):
            engine.media.put_chunk(session_id, 0, b"0123456789abcdef")

    def test_finish_idempotent_once_complete(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        payload = b"q" * 64
        session_id = engine.media.begin_upload(owner, 64, sha256_hex(payload))
        engine.media.put_chunk(session_id, 0, payload)
        first = engine.media.finish_upload(session_id)
        second = engine.media.finish_upload(session_id)
        assert first == second

    def test_random_chunkings_reassemble(self, engine, roles):
        owner = roles["volunteer"]["account_id"]
        rng = random.Random(42)
        for trial in range(100):
            size = rng.randrange(2, 5000)
            payload = rng.randbytes(size)
            session_id = engine.media.begin_upload(owner, size,
                                                   sha256_hex(payload))
            for start, end in random_chunking(rng, size):
                engine.media.put_chunk(session_id, start, payload[start:end])
            blob = engine.media.finish_upload(session_id)
            assert sha256_hex(engine.blobs.read(blob.key)) == \
                sha256_hex(payload), f"trial {trial}"
            engine.media.drop_session(session_id)


class TestSessionPersistence:
    def test_restart_resumes_from_manifest(self, engine, roles, clock):
        owner = roles["volunteer"]["account_id"]
        payload = bytes(range(256)) * 4
        session_id = engine.media.begin_upload(owner, 1024,
                                               sha256_hex(payload))
        engine.media.put_chunk(session_id, 0, payload[:512])
        # simulate a server restart: a new MediaStore over the same blob root
        reborn = MediaStore(engine.blobs, engine.records,
                            engine.media.max_upload_bytes, clock=clock)
        state = reborn.received_state(session_id)
        assert state.received == [[0, 512]]
        reborn.put_chunk(session_id, 512, payload[512:])
        blob = reborn.finish_upload(session_id)
        assert sha256_hex(engine.blobs.read(blob.key)) == sha256_hex(payload)


class TestStreaming:
    def publish(self, engine, roles, payload):
        return engine.published_part(
            admin=roles["admin"], volunteer=roles["volunteer"],
            impaired=roles["impaired"], payload=payload,
        )

    def test_slice_matches_oracle(self, engine, roles):
        payload = bytes(range(250)) * 4  # 1000 bytes
        _, part_code = self.publish(engine, roles, payload)
        result = engine.media.stream_range(roles["impaired"], part_code,
                                           (100, 200))
        assert result.payload == payload[100:200]
        assert result.total == 1000
        assert result.mode == "Stream"

    def test_full_blob_is_download(self, engine, roles):
        payload = b"d" * 1000
        _, part_code = self.publish(engine, roles, payload)
        result = engine.media.stream_range(roles["impaired"], part_code, None)
        assert result.payload == payload
        assert result.mode == "Download"
        events = engine.records.list_kind("playback")
        assert len(events) == 1 and events[0]["mode"] == "Download"

    def test_suffix_and_open_ranges(self, engine, roles):
        payload = bytes(range(100)) * 10
        _, part_code = self.publish(engine, roles, payload)
        tail = engine.media.stream_range(roles["impaired"], part_code,
                                         (None, 100))
        assert tail.payload == payload[-100:]
        rest = engine.media.stream_range(roles["impaired"], part_code,
                                         (950, None))
        assert rest.payload == payload[950:]

    def test_split_concatenation(self, engine, roles):
        payload = random.Random(5).randbytes(2048)
        _, part_code = self.publish(engine, roles, payload)
        for k in (1, 7, 1024, 2047):
            head = engine.media.stream_range(roles["impaired"], part_code,
                                             (0, k))
            tail = engine.media.stream_range(roles["impaired"], part_code,
                                             (k, 2048))
            assert head.payload + tail.payload == payload

    def test_pending_part_hidden_from_impaired(self, engine, roles):
        book = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Pending Book", "A")
        claim = engine.workflow.claim_recording(
            roles["volunteer"]["account_id"], book)
        engine.workflow.review_claim(roles["admin"]["account_id"], claim,
                                     "Approve")
        session = engine.upload_session(roles["volunteer"]["account_id"],
                                        b"pending-bytes" * 10)
        part_code = engine.workflow.submit_part(
            roles["volunteer"]["account_id"], book, "p1", session)
        with pytest.raises(NotPublished):
            engine.media.stream_range(roles["impaired"], part_code, None)
        # the admin may audition it, without generating a playback event
        result = engine.media.stream_range(roles["admin"], part_code, None)
        assert result.total == 130
        # ... and so may the submitting volunteer
        engine.media.stream_range(roles["volunteer"], part_code, (0, 10))
        assert engine.records.list_kind("playback") == []

    def test_bad_range_rejected(self, engine, roles):
        _, part_code = self.publish(engine, roles, b"r" * 100)
        for bad in ((100, 200), (50, 40), (-5, 10)):
            with pytest.raises(RangeRejected):
                engine.media.stream_range(roles["impaired"], part_code, bad)

    def test_unknown_part_not_published(self, engine, roles):
        with pytest.raises(NotPublished):
            engine.media.stream_range(roles["impaired"], 999999, None)


class TestPlaybackCounts:
    def test_counts_match_event_log(self, engine, roles):
        payload = b"c" * 64
        book_a, part_a = engine.published_part(
            admin=roles["admin"], volunteer=roles["volunteer"],
            impaired=roles["impaired"], payload=payload, title="Book A")
        book_b, part_b = engine.published_part(
            admin=roles["admin"], volunteer=roles["volunteer"],
            impaired=roles["impaired"], payload=payload, title="Book B")
        for _ in range(3):
            engine.media.stream_range(roles["impaired"], part_a, (0, 10))
        engine.media.stream_range(roles["impaired"], part_b, (0, 10))
        counts = engine.media.playback_counts()
        # oracle: brute-force recount of the raw event log
        expected = {}
        for event in engine.records.list_kind("playback"):
            expected[event["book_code"]] = expected.get(event["book_code"], 0) + 1
        assert counts == expected == {book_a: 3, book_b: 1}

    def test_empty_log(self, engine):
        assert engine.media.playback_counts() == {}

    def test_window_excludes_outside_events(self, engine, roles, clock):
        payload = b"w" * 64
        book, part = engine.published_part(
            admin=roles["admin"], volunteer=roles["volunteer"],
            impaired=roles["impaired"], payload=payload)
        engine.media.stream_range(roles["impaired"], part, (0, 5))
        clock.advance(1000)
        engine.media.stream_range(roles["impaired"], part, (0, 5))
        inside = engine.media.playback_counts(
            (clock.now - 10, clock.now + 10))
        assert inside == {book: 1}
