"""Tweet text cleaning and tokenization."""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

STAGES = (
    "lowercase",
    "urls",
    "mentions",
    "hashtags",
    "digits",
    "html",
    "stopwords",
    "punctuation",
)

URL_RE = re.compile(r"http\S*")
MENTION_RE = re.compile(r"@\w+")
HASHTAG_RE = re.compile(r"#\w+")
DIGIT_RE = re.compile(r"\d+")
HTML_RE = re.compile(r"<.*>")
PUNCT_TABLE = str.maketrans("", "", string.punctuation)

# mentions and scheme URLs; \b keeps the URL scan from restarting mid-word
SENTIMENT_RE = re.compile(r"@\w+|\b\w+://\S+")
NON_ALNUM_RE = re.compile(r"[\W_]+")
NON_WORD_RE = re.compile(r"\W+")


@dataclass(frozen=True)
class StopwordList:
    words: frozenset = frozenset()

    def __post_init__(self):
        words = frozenset(self.words)
        for w in words:
            if w != w.lower() or not w or any(c.isspace() for c in w):
                raise ValueError(f"invalid stopword {w!r}: must be lowercase with no whitespace")
        object.__setattr__(self, "words", words)

    def __contains__(self, word):
        return word in self.words

    def __len__(self):
        return len(self.words)

    @classmethod
    def parse(cls, text: str) -> "StopwordList":
        """Parse one-word-per-line text; ``#`` lines and blank lines are skipped."""
        words = set()
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
        return cls(frozenset(words))

    @classmethod
    def load(cls, path) -> "StopwordList":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "StopwordList":
        """The bundled 179-word English list."""
        text = resources.files("covid_misinfo").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
        return cls.parse(text)


@dataclass(frozen=True)
class CleanConfig:
    stopwords: StopwordList = field(default_factory=StopwordList.default)
    stage_toggles: dict = field(default_factory=lambda: {s: True for s in STAGES})

    def __post_init__(self):
        toggles = dict(self.stage_toggles)
        unknown = set(toggles) - set(STAGES)
        if unknown:
            raise ValueError(f"unknown cleaning stages: {sorted(unknown)}")
        full = {s: bool(toggles.get(s, True)) for s in STAGES}
        object.__setattr__(self, "stage_toggles", full)

    def enabled(self, stage):
        return self.stage_toggles[stage]


def _clean_pass(text, config):
    on = config.stage_toggles
    if on["lowercase"]:
        text = text.lower()
    if on["urls"]:
        text = URL_RE.sub(" ", text)
    if on["mentions"]:
        text = MENTION_RE.sub(" ", text)
    if on["hashtags"]:
        text = HASHTAG_RE.sub(" ", text)
    if on["digits"]:
        text = DIGIT_RE.sub(" ", text)
    if on["html"]:
        text = HTML_RE.sub(" ", text)
    if on["stopwords"]:
        text = " ".join(w for w in text.split() if w not in config.stopwords)
    if on["punctuation"]:
        text = text.translate(PUNCT_TABLE)
    return " ".join(text.split())


def clean_corpus_text(text: str, config: CleanConfig | None = None) -> str:
    """Full cleaning for corpus analysis.

    Stages run in order: lowercase, URLs, @-mentions, #-hashtags, digit
    runs, angle-bracket tags, stopwords, punctuation (then whitespace is
    collapsed). Punctuation removal can glue fragments back into a URL
    prefix or a stopword (``"is,"`` -> ``"is"``), so the stage sequence is
    repeated until the text stops changing. Each repeat only deletes
    characters, so this terminates.
    """
    if config is None:
        config = _default_config()
    prev = None
    while text != prev:
        prev = text
        text = _clean_pass(text, config)
    return text


_DEFAULT_CONFIG = None


def _default_config():
    global _DEFAULT_CONFIG
    if _DEFAULT_CONFIG is None:
        _DEFAULT_CONFIG = CleanConfig()
    return _DEFAULT_CONFIG


def clean_for_sentiment(text: str) -> str:
    """Light cleaning ahead of sentiment scoring.

    Drops @-mentions, scheme URLs and every character that is not a
    letter, digit or whitespace. Hashtag bodies and digits survive.
    """
    if "@" in text or "://" in text:
        text = SENTIMENT_RE.sub(" ", text)
    return NON_ALNUM_RE.sub(" ", text).strip()


def tokenize(text: str) -> list[str]:
    return [t for t in NON_WORD_RE.split(text.lower()) if t]
