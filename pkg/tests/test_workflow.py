"""Workflow engine: vetting, claims, part moderation, and their invariants."""

import random
import threading
from concurrent.futures import ThreadPoolExecutor

import pytest

from audiolib import domain
from audiolib.domain import BookStatus, ClaimStatus, PartStatus, Role
from audiolib.errors import (
    AlreadyDecided,
    ClaimConflict,
    DuplicateDemand,
    Forbidden,
    NoApprovedParts,
    NotAssigned,
    UploadIncomplete,
    UsernameTaken,
    ValidationFailed,
    WrongState,
)
from audiolib.media import sha256_hex

FORM = {"name": "Reader", "email": "reader@example.org", "username": "newbie"}


class TestMembership:
    def test_volunteer_application_with_trial(self, engine):
        app_id = engine.workflow.apply_for_membership(
            "Volunteer", FORM, b"sound-bytes")
        found = engine.records.get("application", app_id)[1]
        assert found["status"] == "Submitted"
        assert engine.blobs.exists(found["trial_blob"])

    def test_impaired_form_only(self, engine):
        app_id = engine.workflow.apply_for_membership(
            "Impaired", dict(FORM, username="imp-applicant"), None)
        assert engine.records.get("application", app_id)[1]["status"] == "Submitted"

    def test_volunteer_without_trial_rejected(self, engine):
        with pytest.raises(ValidationFailed) as excinfo:
            engine.workflow.apply_for_membership("Volunteer", FORM, None)
        assert "TrialRecordingRequired" in excinfo.value.data["reasons"]

    def test_existing_username_blocks_application(self, engine, roles):
        with pytest.raises(UsernameTaken):
            engine.workflow.apply_for_membership(
                "Impaired", dict(FORM, username="vol-0"), None)

    def test_approval_creates_account_and_credentials(self, engine, roles):
        app_id = engine.workflow.apply_for_membership(
            "Volunteer", FORM, b"clip")
        outcome = engine.workflow.review_application(
            roles["admin"]["account_id"], app_id, "Approve")
        assert outcome["username"] == "newbie"
        account = engine.records.find_unique("account", "newbie")[1]
        assert account["role"] == "Volunteer"
        assert account["status"] == "Active"
        assert outcome["password"] not in account["password_digest"]
        issued = [e for e in engine.sink.events
                  if e.kind == "CredentialsIssued"]
        assert len(issued) == 1
        assert issued[0].payload == {"username": "newbie",
                                     "password": outcome["password"]}

    def test_rejection_creates_no_account(self, engine, roles):
        app_id = engine.workflow.apply_for_membership(
            "Impaired", dict(FORM, username="declined"), None)
        engine.workflow.review_application(
            roles["admin"]["account_id"], app_id, "Reject")
        assert engine.records.find_unique("account", "declined") is None

    def test_non_admin_cannot_review(self, engine, roles):
        app_id = engine.workflow.apply_for_membership(
            "Volunteer", FORM, b"clip")
        with pytest.raises(Forbidden):
            engine.workflow.review_application(
                roles["volunteer"]["account_id"], app_id, "Approve")

    def test_single_decision(self, engine, roles):
        app_id = engine.workflow.apply_for_membership(
            "Volunteer", FORM, b"clip")
        engine.workflow.review_application(
            roles["admin"]["account_id"], app_id, "Approve")
        with pytest.raises(AlreadyDecided):
            engine.workflow.review_application(
                roles["admin"]["account_id"], app_id, "Reject")
        issued = [e for e in engine.sink.events
                  if e.kind == "CredentialsIssued"]
        assert len(issued) == 1  # exactly once per approved application


class TestBookDemand:
    def test_request_book(self, engine, roles):
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Diana", "Sevim Asumgil")
        book = engine.records.get("book", code)[1]
        assert book["status"] == "Requested"
        assert book["requested_by"] == roles["impaired"]["account_id"]

    def test_duplicate_demand_reports_existing_code(self, engine, roles):
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Keloğlan Masalları", "Emel İpek")
        with pytest.raises(DuplicateDemand) as excinfo:
            engine.workflow.request_book(
                roles["impaired"]["account_id"],
                "KELOĞLAN MASALLARI", "emel ipek")
        assert excinfo.value.data["book_code"] == code

    def test_volunteer_cannot_request(self, engine, roles):
        with pytest.raises(Forbidden):
            engine.workflow.request_book(
                roles["volunteer"]["account_id"], "Title", "Author")

    def test_codes_increment(self, engine, roles):
        first = engine.workflow.request_book(
            roles["impaired"]["account_id"], "One", "A")
        second = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Two", "A")
        assert (first, second) == (3001, 3002)


class TestClaims:
    def make_book(self, engine, roles, title="Claim Me"):
        return engine.workflow.request_book(
            roles["impaired"]["account_id"], title, "Author")

    def test_claim_moves_book_to_claim_pending(self, engine, roles):
        code = self.make_book(engine, roles)
        claim_id = engine.workflow.claim_recording(
            roles["volunteer"]["account_id"], code)
        assert engine.records.get("claim", claim_id)[1]["status"] == "Pending"
        assert engine.records.get("book", code)[1]["status"] == "ClaimPending"

    def test_second_claim_conflicts(self, engine, roles):
        other = engine.add_account("vol-2", Role.VOLUNTEER)
        code = self.make_book(engine, roles)
        engine.workflow.claim_recording(roles["volunteer"]["account_id"], code)
        with pytest.raises(ClaimConflict):
            engine.workflow.claim_recording(other["account_id"], code)

    def test_claim_on_completed_book(self, engine, roles):
        payload = b"bytes" * 100
        code, _ = engine.published_part(
            admin=roles["admin"], volunteer=roles["volunteer"],
            impaired=roles["impaired"], payload=payload)
        engine.workflow.mark_book_complete(roles["admin"]["account_id"], code)
        with pytest.raises(WrongState):
            engine.workflow.claim_recording(
                roles["volunteer"]["account_id"], code)

    def test_approval_assigns_reader(self, engine, roles):
        code = self.make_book(engine, roles)
        claim_id = engine.workflow.claim_recording(
            roles["volunteer"]["account_id"], code)
        engine.workflow.review_claim(
            roles["admin"]["account_id"], claim_id, "Approve")
        book = engine.records.get("book", code)[1]
        assert book["status"] == "InRecording"
        assert book["assigned_reader"] == roles["volunteer"]["account_id"]

    def test_rejection_restores_requested(self, engine, roles):
        code = self.make_book(engine, roles)
        claim_id = engine.workflow.claim_recording(
            roles["volunteer"]["account_id"], code)
        engine.workflow.review_claim(
            roles["admin"]["account_id"], claim_id, "Reject")
        book = engine.records.get("book", code)[1]
        assert book["status"] == "Requested"
        assert book["assigned_reader"] is None
        # rejection does not blacklist: the same volunteer may claim again
        engine.workflow.claim_recording(roles["volunteer"]["account_id"], code)

    def test_double_decision(self, engine, roles):
        code = self.make_book(engine, roles)
        claim_id = engine.workflow.claim_recording(
            roles["volunteer"]["account_id"], code)
        engine.workflow.review_claim(
            roles["admin"]["account_id"], claim_id, "Approve")
        before = engine.records.snapshot()
        with pytest.raises(AlreadyDecided):
            engine.workflow.review_claim(
                roles["admin"]["account_id"], claim_id, "Approve")
        assert engine.records.snapshot() == before  # replay left state untouched


class TestParts:
    def recording_book(self, engine, roles):
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Recording", "Author")
        claim_id = engine.workflow.claim_recording(
            roles["volunteer"]["account_id"], code)
        engine.workflow.review_claim(
            roles["admin"]["account_id"], claim_id, "Approve")
        return code

    def test_submit_derives_codes_in_sequence(self, engine, roles):
        code = self.recording_book(engine, roles)
        volunteer = roles["volunteer"]["account_id"]
        parts = []
        for i in range(3):
            session = engine.upload_session(volunteer, b"data%d" % i * 40)
            parts.append(engine.workflow.submit_part(
                volunteer, code, f"Part {i + 1}", session))
        assert parts == [domain.derive_part_code(code, 1),
                         domain.derive_part_code(code, 2),
                         domain.derive_part_code(code, 3)]

    def test_probe_fills_duration(self, engine, roles):
        from audiolib import mp3
        code = self.recording_book(engine, roles)
        volunteer = roles["volunteer"]["account_id"]
        session = engine.upload_session(volunteer, mp3.build_cbr(200, 128, 44100))
        part_code = engine.workflow.submit_part(volunteer, code, "p", session)
        part = engine.records.get("part", part_code)[1]
        assert part["duration_seconds"] == pytest.approx(200 * 1152 / 44100)

    def test_non_audio_has_unknown_duration(self, engine, roles):
        code = self.recording_book(engine, roles)
        volunteer = roles["volunteer"]["account_id"]
        session = engine.upload_session(volunteer, b"\x00" * 2048)
        part_code = engine.workflow.submit_part(volunteer, code, "p", session)
        assert engine.records.get("part", part_code)[1]["duration_seconds"] is None

    def test_only_assigned_reader_may_submit(self, engine, roles):
        other = engine.add_account("vol-9", Role.VOLUNTEER)
        code = self.recording_book(engine, roles)
        session = engine.upload_session(other["account_id"], b"x" * 64)
        with pytest.raises(NotAssigned):
            engine.workflow.submit_part(other["account_id"], code, "p", session)

    def test_submit_to_requested_book(self, engine, roles):
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Idle", "Author")
        session = engine.upload_session(
            roles["volunteer"]["account_id"], b"x" * 64)
        with pytest.raises(WrongState):
            engine.workflow.submit_part(
                roles["volunteer"]["account_id"], code, "p", session)

    def test_incomplete_session_rejected(self, engine, roles):
        code = self.recording_book(engine, roles)
        volunteer = roles["volunteer"]["account_id"]
        payload = b"y" * 100
        session = engine.media.begin_upload(volunteer, 100,
                                            sha256_hex(payload))
        engine.media.put_chunk(session, 0, payload[:50])
        with pytest.raises(UploadIncomplete):
            engine.workflow.submit_part(volunteer, code, "p", session)

    def test_review_part_moves_blob_visibility(self, engine, roles):
        code = self.recording_book(engine, roles)
        volunteer = roles["volunteer"]["account_id"]
        session = engine.upload_session(volunteer, b"z" * 64)
        part_code = engine.workflow.submit_part(volunteer, code, "p", session)
        engine.workflow.review_part(
            roles["admin"]["account_id"], part_code, "Approve")
        part = engine.records.get("part", part_code)[1]
        assert part["status"] == "Approved"
        assert part["blob"] == f"books/{code}/parts/{part_code}.mp3"
        decided = [e for e in engine.sink.events if e.kind == "PartDecided"]
        assert decided and decided[-1].payload["decision"] == "Approve"

    def test_rejected_blob_is_retained(self, engine, roles):
        code = self.recording_book(engine, roles)
        volunteer = roles["volunteer"]["account_id"]
        session = engine.upload_session(volunteer, b"lowq" * 16)
        part_code = engine.workflow.submit_part(volunteer, code, "bad", session)
        engine.workflow.review_part(
            roles["admin"]["account_id"], part_code, "Reject")
        part = engine.records.get("part", part_code)[1]
        assert part["status"] == "Rejected"
        assert engine.blobs.exists(part["blob"])  # kept for audit

    def test_part_decision_single_shot(self, engine, roles):
        code = self.recording_book(engine, roles)
        volunteer = roles["volunteer"]["account_id"]
        session = engine.upload_session(volunteer, b"q" * 64)
        part_code = engine.workflow.submit_part(volunteer, code, "p", session)
        engine.workflow.review_part(
            roles["admin"]["account_id"], part_code, "Approve")
        before = engine.records.snapshot()
        with pytest.raises(AlreadyDecided):
            engine.workflow.review_part(
                roles["admin"]["account_id"], part_code, "Approve")
        assert engine.records.snapshot() == before


class TestMarkComplete:
    def test_requires_approved_part(self, engine, roles):
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Empty", "Author")
        claim_id = engine.workflow.claim_recording(
            roles["volunteer"]["account_id"], code)
        engine.workflow.review_claim(
            roles["admin"]["account_id"], claim_id, "Approve")
        with pytest.raises(NoApprovedParts):
            engine.workflow.mark_book_complete(
                roles["admin"]["account_id"], code)

    def test_completes_with_approved_parts(self, engine, roles):
        code, _ = engine.published_part(
            admin=roles["admin"], volunteer=roles["volunteer"],
            impaired=roles["impaired"], payload=b"done" * 32)
        outcome = engine.workflow.mark_book_complete(
            roles["admin"]["account_id"], code)
        assert outcome["status"] == "Completed"

    def test_wrong_state(self, engine, roles):
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Still Requested", "Author")
        with pytest.raises(WrongState):
            engine.workflow.mark_book_complete(
                roles["admin"]["account_id"], code)


class TestPendingReviews:
    def test_matches_store_filter_oracle(self, engine, roles):
        engine.workflow.apply_for_membership("Impaired", FORM, None)
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Queue Book", "Author")
        engine.workflow.claim_recording(roles["volunteer"]["account_id"], code)
        listing = engine.workflow.list_pending_reviews(
            roles["admin"]["account_id"])
        snapshot = engine.records.snapshot()
        assert [a["application_id"] for a in listing["applications"]] == \
            [a["application_id"] for a in snapshot["application"].values()
             if a["status"] == "Submitted"]
        assert [c["claim_id"] for c in listing["claims"]] == \
            [c["claim_id"] for c in snapshot["claim"].values()
             if c["status"] == "Pending"]
        assert listing["parts"] == []

    def test_oldest_first(self, engine, roles, clock):
        ids = []
        for i in range(3):
            clock.advance(10)
            ids.append(engine.workflow.apply_for_membership(
                "Impaired", dict(FORM, username=f"u{i}"), None))
        listing = engine.workflow.list_pending_reviews(
            roles["admin"]["account_id"])
        assert [a["application_id"] for a in listing["applications"]] == ids

    def test_fresh_system_empty(self, engine, roles):
        listing = engine.workflow.list_pending_reviews(
            roles["admin"]["account_id"])
        assert listing == {"applications": [], "claims": [], "parts": []}

    def test_forbidden_for_non_admin(self, engine, roles):
        with pytest.raises(Forbidden):
            engine.workflow.list_pending_reviews(
                roles["volunteer"]["account_id"])


class TestSingleActiveReader:
    def test_concurrent_claimants_one_wins(self, engine, roles):
        volunteers = [engine.add_account(f"racer-{i}", Role.VOLUNTEER)
                      for i in range(8)]
        outcomes = []
        lock = threading.Lock()
        code = engine.workflow.request_book(
            roles["impaired"]["account_id"], "Contested", "Author")
        barrier = threading.Barrier(8)

        def race(account):
            barrier.wait()
            try:
                claim = engine.workflow.claim_recording(
                    account["account_id"], code)
                with lock:
                    outcomes.append(("ok", claim))
            except (ClaimConflict, WrongState):
                with lock:
                    outcomes.append(("lost", None))

        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(race, volunteers))
        wins = [claim for kind, claim in outcomes if kind == "ok"]
        assert len(wins) == 1
        live = [c for c in engine.records.list_kind("claim")
                if c["book_code"] == code
                and c["status"] in ("Pending", "Approved")]
        assert len(live) == 1

    def test_transition_log_replays_cleanly(self, engine, roles):
        rng = random.Random(99)
        volunteers = [engine.add_account(f"replayer-{i}", Role.VOLUNTEER)
                      for i in range(4)]
        admin_id = roles["admin"]["account_id"]
        for round_no in range(20):
            code = engine.workflow.request_book(
                roles["impaired"]["account_id"], f"Replay {round_no}", "A")
            for _ in range(rng.randrange(1, 4)):
                volunteer = rng.choice(volunteers)
                try:
                    claim = engine.workflow.claim_recording(
                        volunteer["account_id"], code)
                except (ClaimConflict, WrongState):
                    continue
                engine.workflow.review_claim(
                    admin_id, claim, rng.choice(["Approve", "Reject"]))
        # replay every book's event sequence through the pure function
        state = {}
        for entry in engine.workflow.transition_log:
            if entry["kind"] != "book":
                continue
            current = state.get(entry["ref"], BookStatus.REQUESTED)
            assert current.value == entry["from"]
            state[entry["ref"]] = domain.next_book_status(
                current, entry["event"])
            assert state[entry["ref"]].value == entry["to"]
        for code, status in state.items():
            assert engine.records.get("book", code)[1]["status"] == status.value
