"""Pattern compilation and the scanning cascade."""

import pytest

from mop.corpus import Document
from mop.patterns import (
    PatternSyntaxError,
    compile_patterns,
    extract_candidates,
    scan,
)

SENTENCE_3 = (
    "Since the shame that was elicited by the coding procedure was seldom "
    "explicitly mentioned by the patient or the therapist, Lewis called it "
    "unacknowledged shame."
)
SENTENCE_4 = (
    "It was Lewis (1971;1976) who called attention to emotional elements in "
    "what until then had been construed as a perceptual phenomenon."
)
SENTENCE_5 = (
    "“Intercursive” power, on the other hand, is power in Weber’s "
    "sense of constraint by an actor or group of actors over others."
)


class TestCompile:
    def test_literal_bigram(self, make_sentence):
        cascade = compile_patterns('known_as: "known" "as"')
        matches = scan(make_sentence("It is known as x."), cascade)
        assert len(matches) == 1
        assert matches[0].pattern_id == "known_as"

    def test_empty_spec_matches_nothing(self, make_sentence):
        cascade = compile_patterns("")
        assert len(cascade) == 0
        assert scan(make_sentence("Nothing is called anything."), cascade) == []

    def test_default_inventory_size(self, cascade):
        assert len(cascade) >= 40

    def test_malformed_line_reports_number(self):
        with pytest.raises(PatternSyntaxError) as err:
            compile_patterns('ok: "called"\nbroken line without colon atoms')
        assert "line 2" in str(err.value)

    def test_duplicate_id(self):
        with pytest.raises(PatternSyntaxError):
            compile_patterns('a: "x"\na: "y"')

    def test_alternation_and_quote_atoms(self, make_sentence):
        cascade = compile_patterns('c: {called|calls} QUOTE')
        matches = scan(make_sentence('He calls “it” done.'), cascade)
        assert len(matches) == 1

    def test_priority_breaks_length_ties(self, make_sentence):
        cascade = compile_patterns('low: "called"\nhigh: "called" priority=5')
        match = scan(make_sentence("It is called x."), cascade)[0]
        assert match.pattern_id == "high"

    def test_marker_must_be_lexical(self):
        with pytest.raises(PatternSyntaxError):
            compile_patterns("q: QUOTE")


class TestScan:
    def test_sentence_one_known_as(self, cascade, make_sentence):
        s = make_sentence(
            "This means that they ingest oxygen from the air via fine hollow "
            "tubes, known as tracheae."
        )
        matches = scan(s, cascade)
        assert len(matches) == 1
        assert matches[0].pattern_id == "known_as"
        assert s.tokens[matches[0].marker_index].surface == "known"

    def test_sentence_two_called_quote(self, cascade, make_sentence):
        s = make_sentence(
            "The bit sequences representing quanta of knowledge will be "
            "called “Kenes”, a neologism intentionally similar to "
            "‘genes’."
        )
        matches = scan(s, cascade)
        assert [m.pattern_id for m in matches] == ["called_quote"]

    def test_no_marker_no_match(self, cascade, make_sentence):
        assert scan(make_sentence("The committee will meet tomorrow."), cascade) == []

    def test_case_insensitive(self, cascade, make_sentence):
        assert scan(make_sentence("CALLED out loud."), cascade)

    def test_non_overlap_and_order(self, cascade, make_sentence):
        s = make_sentence("In 1965 the term soliton was coined to describe waves.")
        matches = scan(s, cascade)
        assert [m.pattern_id for m in matches] == ["the_term", "coined"]
        spans = [m.token_span for m in matches]
        assert all(a[1] < b[0] for a, b in zip(spans, spans[1:]))

    def test_anchoring_invariant(self, cascade, desk_docs):
        for doc in desk_docs:
            for cand in extract_candidates(doc, cascade):
                for m in cand.matches:
                    pattern = cascade.by_id(m.pattern_id)
                    norm = cand.sentence.tokens[m.marker_index].norm
                    assert norm in pattern.marker_lexemes

    def test_determinism(self, cascade, make_sentence):
        s = make_sentence("It is so called “x” here.")
        assert scan(s, cascade) == scan(s, cascade)


class TestExtractCandidates:
    def test_two_call_sentences(self, cascade):
        doc = Document(id="d", text=SENTENCE_3 + " " + SENTENCE_4)
        candidates = extract_candidates(doc, cascade)
        assert len(candidates) == 2

    def test_empty_document(self, cascade):
        assert extract_candidates(Document(id="d", text=""), cascade) == []

    def test_sentence_five_not_extracted(self, cascade):
        assert extract_candidates(Document(id="d", text=SENTENCE_5), cascade) == []

    def test_monotonicity_adding_pattern(self, cascade, desk_docs):
        spec = 'known_as: "known" "as"'
        grown = compile_patterns(spec + '\ntermed: "termed"')
        base = compile_patterns(spec)
        for doc in desk_docs:
            base_refs = {c.sentence.ref for c in extract_candidates(doc, base)}
            grown_refs = {c.sentence.ref for c in extract_candidates(doc, grown)}
            assert base_refs <= grown_refs
