import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covid_misinfo.textprep import (
    STAGES,
    CleanConfig,
    StopwordList,
    clean_corpus_text,
    clean_for_sentiment,
    tokenize,
)

from .oracles import ref_clean_corpus, ref_clean_for_sentiment, ref_tokenize, violations
from .strategies import STOPWORDS, tweet_text

SMALL = CleanConfig(stopwords=StopwordList(frozenset({"is", "a"})))


def test_bundled_stopwords():
    assert len(STOPWORDS) == 179
    assert "the" in STOPWORDS and "wouldn't" in STOPWORDS


def test_stopword_file_format(tmp_path):
    p = tmp_path / "sw.txt"
    p.write_text("# comment\nfoo\n\n bar \n", encoding="utf-8")
    assert StopwordList.load(p).words == {"foo", "bar"}


@pytest.mark.parametrize("bad", ["Foo", "two words", ""])
def test_stopword_invariants(bad):
    with pytest.raises(ValueError):
        StopwordList(frozenset({bad}))


def test_clean_config_toggles():
    cfg = CleanConfig(stage_toggles={"digits": False})
    assert set(cfg.stage_toggles) == set(STAGES)
    assert cfg.stage_toggles["digits"] is False
    with pytest.raises(ValueError):
        CleanConfig(stage_toggles={"emoji": True})


@pytest.mark.parametrize("text, expected", [
    ("", ""),
    ("COVID19 IS A HOAX", "covid hoax"),
    ("Check https://t.co/abc @user #plandemic 123!", "check"),
])
def test_clean_corpus_examples(text, expected):
    assert clean_corpus_text(text, SMALL) == expected
    assert ref_clean_corpus(text, SMALL.stopwords) == expected


@pytest.mark.parametrize("text, expected", [
    # greedy tag removal takes everything between the first < and the last >
    ("<b>breaking</b> news", "news"),
    ("a <tag", "tag"),
    # punctuation removal exposes new stopwords; they go too
    ("this is, a (hoax)", "this hoax"),
    # bare domains survive minus their dots
    ("see cdc.gov now", "see cdcgov now"),
    ("ht.tp://evil x", "x"),
])
def test_clean_corpus_edge_cases(text, expected):
    assert clean_corpus_text(text, SMALL) == expected


def test_disabled_stage_is_skipped():
    cfg = CleanConfig(stopwords=SMALL.stopwords, stage_toggles={"digits": False})
    assert clean_corpus_text("Route 66", cfg) == "route 66"


@settings(max_examples=400)
@given(tweet_text)
def test_clean_corpus_matches_oracle(text):
    out = clean_corpus_text(text)
    assert out == ref_clean_corpus(text, STOPWORDS.words)
    assert violations(out, STOPWORDS) == []
    assert clean_corpus_text(out) == out


@settings(max_examples=300)
@given(st.text())
def test_clean_corpus_arbitrary_unicode(text):
    out = clean_corpus_text(text)
    assert violations(out, STOPWORDS) == []
    assert clean_corpus_text(out) == out


@pytest.mark.parametrize("text, expected", [
    ("", ""),
    ("@user COVID-19 is a hoax! https://x.co/1", "COVID 19 is a hoax"),
    ("plain words", "plain words"),
    ("#Plandemic 2020", "Plandemic 2020"),
])
def test_clean_for_sentiment_examples(text, expected):
    assert clean_for_sentiment(text) == expected
    assert ref_clean_for_sentiment(text) == expected


@settings(max_examples=400)
@given(st.one_of(tweet_text, st.text()))
def test_clean_for_sentiment_matches_oracle(text):
    assert clean_for_sentiment(text) == ref_clean_for_sentiment(text)


@given(st.text(alphabet=st.characters(categories=["Lu", "Ll", "Lo", "Zs"]), max_size=40))
def test_clean_for_sentiment_keeps_letters(text):
    # no @ or :// in the alphabet, so nothing counts as a mention or URL
    out = clean_for_sentiment(text)
    assert [c for c in out if c.isalpha()] == [c for c in text if c.isalpha()]


@pytest.mark.parametrize("text, expected", [
    ("covid hoax", ["covid", "hoax"]),
    ("It's a-hoax", ["it", "s", "a", "hoax"]),
    ("", []),
    ("  --  ", []),
    ("snake_case #Tag", ["snake_case", "tag"]),
])
def test_tokenize_examples(text, expected):
    assert tokenize(text) == expected


@given(st.one_of(tweet_text, st.text()))
def test_tokenize_properties(text):
    toks = tokenize(text)
    assert toks == ref_tokenize(text)
    for t in toks:
        assert t and all(c.isalnum() or c == "_" for c in t)
        assert t == t.lower()
