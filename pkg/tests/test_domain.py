"""Pure domain types: part codes, lifecycle transitions, application validity."""

import itertools

import pytest

from audiolib import domain
from audiolib.domain import (
    ApplicationForm,
    BookEvent,
    BookStatus,
    Decision,
    PartStatus,
    Role,
    decode_part_code,
    derive_part_code,
    next_book_status,
    next_part_status,
    validate_application,
)
from audiolib.errors import IllegalTransition, InvalidSequence


class TestPartCodes:
    @pytest.mark.parametrize("book,seq,expected", [
        (3001, 1, 300110),
        (3001, 2, 300111),
        (3001, 3, 300112),
    ])
    def test_published_codes(self, book, seq, expected):
        assert derive_part_code(book, seq) == expected

    def test_sequence_boundaries(self):
        assert derive_part_code(3001, 90) == 300199
        with pytest.raises(InvalidSequence):
            derive_part_code(3001, 91)
        with pytest.raises(InvalidSequence):
            derive_part_code(3001, 0)
        with pytest.raises(InvalidSequence):
            derive_part_code(0, 1)

    def test_injective_and_decodable(self):
        seen = set()
        for book in (1, 7, 3001, 3002, 99999):
            for seq in range(1, 91):
                code = derive_part_code(book, seq)
                assert code not in seen
                seen.add(code)
                assert decode_part_code(code) == (book, seq)

    def test_decode_rejects_malformed(self):
        for bad in (300100, 300109, 42, -1, 99):
            with pytest.raises(InvalidSequence):
                decode_part_code(bad)


class TestBookTransitions:
    def test_legal_edges(self):
        assert next_book_status(BookStatus.REQUESTED,
                                BookEvent.CLAIM_FILED) is BookStatus.CLAIM_PENDING
        assert next_book_status(BookStatus.CLAIM_PENDING,
                                BookEvent.CLAIM_APPROVED) is BookStatus.IN_RECORDING
        assert next_book_status(BookStatus.CLAIM_PENDING,
                                BookEvent.CLAIM_REJECTED) is BookStatus.REQUESTED
        assert next_book_status(BookStatus.IN_RECORDING,
                                BookEvent.MARKED_COMPLETE) is BookStatus.COMPLETED

    def test_total_over_cross_product(self):
        legal = 0
        for status, event in itertools.product(BookStatus, BookEvent):
            try:
                result = next_book_status(status, event)
                assert isinstance(result, BookStatus)
                legal += 1
            except IllegalTransition:
                pass
        assert legal == 4  # exactly the four legal edges

    def test_terminal_state(self):
        for event in BookEvent:
            with pytest.raises(IllegalTransition):
                next_book_status(BookStatus.COMPLETED, event)

    def test_reachability_closure(self):
        # BFS over the transition graph from Requested must reach every status
        reached = {BookStatus.REQUESTED}
        frontier = [BookStatus.REQUESTED]
        while frontier:
            status = frontier.pop()
            for event in BookEvent:
                try:
                    nxt = next_book_status(status, event)
                except IllegalTransition:
                    continue
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        assert reached == set(BookStatus)

    def test_accepts_plain_strings(self):
        assert next_book_status("Requested", "ClaimFiled") is BookStatus.CLAIM_PENDING


class TestPartTransitions:
    def test_single_decision(self):
        assert next_part_status(PartStatus.PENDING_APPROVAL,
                                Decision.APPROVE) is PartStatus.APPROVED
        assert next_part_status(PartStatus.PENDING_APPROVAL,
                                Decision.REJECT) is PartStatus.REJECTED

    @pytest.mark.parametrize("decided", [PartStatus.APPROVED, PartStatus.REJECTED])
    @pytest.mark.parametrize("decision", list(Decision))
    def test_second_decision_is_illegal(self, decided, decision):
        with pytest.raises(IllegalTransition):
            next_part_status(decided, decision)


class TestApplicationValidity:
    def form(self, **overrides):
        base = {"name": "Reader", "email": "r@example.org", "username": "reader"}
        base.update(overrides)
        return ApplicationForm(**base)

    def test_volunteer_with_trial_is_valid(self):
        assert validate_application(Role.VOLUNTEER, self.form(), True).ok

    def test_volunteer_without_trial(self):
        verdict = validate_application(Role.VOLUNTEER, self.form(), False)
        assert not verdict.ok
        assert "TrialRecordingRequired" in verdict.reasons

    def test_impaired_form_only_is_enough(self):
        assert validate_application(Role.IMPAIRED, self.form(), False).ok

    def test_required_fields(self):
        verdict = validate_application(Role.IMPAIRED, self.form(name=" "), False)
        assert "NameRequired" in verdict.reasons
        verdict = validate_application(Role.IMPAIRED, self.form(email=""), False)
        assert "EmailRequired" in verdict.reasons


class TestNormalization:
    def test_casefold_and_whitespace(self):
        assert domain.normalize_text("  Keloğlan   Masalları ") == "keloğlan masallari"
        # Turkish and ASCII casings of the same title share one identity
        assert domain.book_identity("KELOĞLAN MASALLARI", "Emel İPEK") == \
            domain.book_identity("keloğlan masalları", "emel ipek")

    def test_distinct_titles_stay_distinct(self):
        assert domain.book_identity("Diana", "Sevim Asumgil") != \
            domain.book_identity("Diana", "Someone Else")
