import unicodedata

import pytest
import regex
from hypothesis import given, settings
from hypothesis import strategies as st

from ocrforge.errors import EmptyCorpusError, NoValidSegmentsError
from ocrforge.textprep import (
    KASHMIRI_RANGES,
    Corpus,
    Rejection,
    ScriptPolicy,
    Segment,
    SegmentationConfig,
    filter_by_length,
    grapheme_count,
    graphemes,
    normalize,
    prepare,
    segment,
    validate,
)

POLICY = ScriptPolicy()


def corpus(text):
    return Corpus.from_text(text)


class TestSegmentWord:
    def test_arabic_comma_is_delimiter(self):
        got = segment(corpus("alpha beta،gamma"), SegmentationConfig(mode="word"))
        assert got == ["alpha", "beta", "gamma"]

    def test_empty_results_removed(self):
        got = segment(corpus("a,,  b!!c"), SegmentationConfig(mode="word"))
        assert got == ["a", "b", "c"]

    def test_newlines_split_words(self):
        got = segment(corpus("foo\nbar\r\nbaz"), SegmentationConfig(mode="word"))
        assert got == ["foo", "bar", "baz"]

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            segment(corpus(""), SegmentationConfig(mode="word"))


class TestSegmentNgram:
    def test_window_enumeration(self):
        got = segment(corpus("w1 w2 w3"), SegmentationConfig(mode="ngram"))
        assert got == ["w1 w2", "w2 w3", "w1 w2 w3"]

    def test_duplicates_removed_first_occurrence(self):
        got = segment(corpus("a b a b"), SegmentationConfig(mode="ngram"))
        assert got == ["a b", "b a", "a b a", "b a b", "a b a b"]

    def test_too_few_words(self):
        got = segment(corpus("solo"), SegmentationConfig(mode="ngram"))
        assert got == []


class TestSegmentChar:
    def test_combining_mark_stays_attached(self):
        got = segment(corpus("سٔ"), SegmentationConfig(mode="char"))
        assert got == ["سٔ"]

    def test_whitespace_clusters_dropped(self):
        got = segment(corpus("ab c"), SegmentationConfig(mode="char"))
        assert got == ["a", "b", "c"]

    def test_concatenation_recovers_corpus(self):
        text = normalize("سلام دنیا eۛ x")
        clusters = regex.findall(r"\X", text)
        emitted = segment(corpus(text), SegmentationConfig(mode="char"))
        # re-interleave the dropped whitespace clusters
        rebuilt = []
        it = iter(emitted)
        for g in clusters:
            rebuilt.append(g if g.isspace() else next(it))
        assert "".join(rebuilt) == text


class TestSegmentSentenceLine:
    def test_sentence_enders(self):
        got = segment(
            corpus("One. Two؟ Three! Four۔ Five"),
            SegmentationConfig(mode="sentence"),
        )
        assert got == ["One", "Two", "Three", "Four", "Five"]

    def test_sentence_trimmed(self):
        got = segment(corpus("  hello there .  next "), SegmentationConfig(mode="sentence"))
        assert got == ["hello there", "next"]

    def test_line_mode_crlf_and_lone_cr(self):
        got = segment(corpus("a\r\nb\rc\nd"), SegmentationConfig(mode="line"))
        assert got == ["a", "b", "c", "d"]


class TestLengthFilter:
    def test_defaults_keep_short(self):
        cfg = SegmentationConfig(mode="word")
        assert filter_by_length(["a", "abc"], cfg) == ["a", "abc"]

    def test_boundary_plus_one_dropped(self):
        cfg = SegmentationConfig(mode="word", max_graphemes=50)
        assert filter_by_length(["x" * 51], cfg) == []
        assert filter_by_length(["x" * 50], cfg) == ["x" * 50]

    def test_min_two_drops_singles(self):
        cfg = SegmentationConfig(mode="char", min_graphemes=2)
        assert filter_by_length(["a", "b"], cfg) == []

    def test_counts_graphemes_not_codepoints(self):
        cfg = SegmentationConfig(mode="word", min_graphemes=1, max_graphemes=1)
        assert filter_by_length(["سٔ"], cfg) == ["سٔ"]


class TestNormalize:
    def test_composition(self):
        assert normalize("é") == "é"

    def test_arabic_already_nfc_unchanged(self):
        s = "سلام"
        assert normalize(s) == s

    @given(st.text(max_size=40))
    @settings(max_examples=200, deadline=None)
    def test_idempotent(self, s):
        assert normalize(normalize(s)) == normalize(s)


class TestValidate:
    def test_arabic_block_accepted(self):
        out = validate("سلام", POLICY)
        assert isinstance(out, Segment)
        assert out.grapheme_len == 4

    def test_devanagari_rejected_with_offender(self):
        out = validate("abऀcd", POLICY)
        assert isinstance(out, Rejection)
        assert out.offending_codepoint == 0x0900

    def test_diacritic_preserved(self):
        out = validate("سٔ", POLICY)
        assert isinstance(out, Segment)
        assert "ٔ" in out.text

    def test_nfc_composition_applies_before_check(self):
        # alef + hamza-above composes to U+0623, still inside the Arabic block
        out = validate("أ", POLICY)
        assert isinstance(out, Segment)
        assert out.text == "أ"

    def test_policy_diacritics_must_be_allowed(self):
        with pytest.raises(ValueError):
            ScriptPolicy(allowed_ranges=((0x0020, 0x007F),))


class TestScriptPolicy:
    def test_ranges_canonicalized(self):
        p = ScriptPolicy(
            allowed_ranges=((0x0700, 0x07FF), (0x0600, 0x06FF), (0x0650, 0x06A0)),
            preserved_diacritics=frozenset(),
        )
        assert p.allowed_ranges == ((0x0600, 0x07FF),)

    def test_default_ranges(self):
        assert ScriptPolicy().allowed_ranges == tuple(sorted(KASHMIRI_RANGES))

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            ScriptPolicy(allowed_ranges=((0x06FF, 0x0600),), preserved_diacritics=frozenset())


class TestPrepare:
    def test_all_valid(self):
        res = prepare(corpus("سلام دنیا خوب"), SegmentationConfig(mode="word"), POLICY)
        assert [s.text for s in res] == ["سلام", "دنیا", "خوب"]
        assert res.rejected == 0

    def test_foreign_word_counted(self):
        res = prepare(corpus("سلام привет دنیا"), SegmentationConfig(mode="word"), POLICY)
        assert len(res) == 2
        assert res.rejected == 1

    def test_nothing_left_raises(self):
        with pytest.raises(NoValidSegmentsError):
            prepare(corpus("привет мир"), SegmentationConfig(mode="word"), POLICY)

    def test_emitted_segments_revalidate(self):
        res = prepare(
            corpus("سلام دنیا ab cd. خوب!"), SegmentationConfig(mode="word"), POLICY
        )
        for seg in res:
            again = validate(seg.text, POLICY)
            assert isinstance(again, Segment)
            assert again.text == seg.text
            assert 1 <= seg.grapheme_len <= 50
            assert seg.text.strip() == seg.text and seg.text


ARABIC_BASES = [chr(c) for c in range(0x0627, 0x0645)]
MARKS = [chr(c) for c in range(0x064B, 0x0658)]


@given(
    st.lists(
        st.tuples(st.sampled_from(ARABIC_BASES), st.text(alphabet=MARKS, max_size=2)),
        min_size=1,
        max_size=10,
    )
)
@settings(max_examples=200, deadline=None)
def test_grapheme_segmentation_keeps_marks_attached(pairs):
    text = "".join(base + marks for base, marks in pairs)
    for g in graphemes(text):
        assert not unicodedata.combining(g[0]), "cluster must start with a base"
        for ch in g[1:]:
            assert unicodedata.combining(ch), "non-initial chars must be marks"


@given(st.text(max_size=60))
@settings(max_examples=200, deadline=None)
def test_grapheme_concat_identity(s):
    assert "".join(graphemes(s)) == s


def test_grapheme_count_empty():
    assert grapheme_count("") == 0
