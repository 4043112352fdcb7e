"""Lexicon-based polarity scoring and per-keyword sentiment reports."""

from __future__ import annotations

import enum
import logging
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .textprep import clean_for_sentiment, tokenize

log = logging.getLogger(__name__)

TOKEN_RE = re.compile(r"\w+")


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Lexicon:
    entries: Mapping[str, float]

    def __post_init__(self):
        for term, polarity in self.entries.items():
            if not TOKEN_RE.fullmatch(term) or term != term.lower():
                raise LexiconError(f"lexicon term {term!r} is not a lowercase single token")
            if not -1.0 <= polarity <= 1.0:
                raise LexiconError(f"polarity for {term!r} out of [-1, 1]: {polarity}")
        object.__setattr__(self, "entries", dict(self.entries))

    def __len__(self):
        return len(self.entries)

    def __contains__(self, term):
        return term in self.entries

    def get(self, term, default=None):
        return self.entries.get(term, default)

    @classmethod
    def parse(cls, text: str, source: str = "<lexicon>") -> "Lexicon":
        """Parse ``term<TAB>polarity`` lines; duplicate terms keep the last value."""
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) != 2:
                raise LexiconError(f"{source}:{lineno}: expected 'term<TAB>polarity'")
            term, raw = parts[0].strip(), parts[1].strip()
            try:
                polarity = float(raw)
            except ValueError:
                raise LexiconError(f"{source}:{lineno}: bad polarity {raw!r}") from None
            if math.isnan(polarity):
                raise LexiconError(f"{source}:{lineno}: bad polarity {raw!r}")
            if term in entries:
                log.warning("%s:%d: duplicate term %r, last value wins", source, lineno, term)
            entries[term] = polarity
        return cls(entries)

    @classmethod
    def load(cls, path) -> "Lexicon":
        path = Path(path)
        return cls.parse(path.read_text(encoding="utf-8"), str(path))

    @classmethod
    def default(cls) -> "Lexicon":
        text = resources.files("covid_misinfo").joinpath("data/lexicon.tsv").read_text(encoding="utf-8")
        return cls.parse(text, "lexicon.tsv")


class SentimentLabel(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class SentimentReport:
    keyword: str
    total: int
    n_positive: int
    n_negative: int
    n_neutral: int
    pct_positive: float
    pct_negative: float
    pct_neutral: float

    def as_row(self):
        return [self.keyword, self.total, self.n_positive, self.n_negative, self.n_neutral,
                self.pct_positive, self.pct_negative, self.pct_neutral]


REPORT_COLUMNS = ("keyword", "total", "n_positive", "n_negative", "n_neutral",
                  "pct_positive", "pct_negative", "pct_neutral")


def score(text: str, lexicon: Lexicon) -> float:
    """Mean polarity of the tokens of ``text`` that appear in ``lexicon``.

    Returns 0.0 when nothing matches. The sum is exactly rounded (fsum), so
    the sign is exact and token order cannot change the result.
    """
    matched = [lexicon.entries[t] for t in tokenize(text) if t in lexicon.entries]
    if not matched:
        return 0.0
    return math.fsum(matched) / len(matched)


def classify(polarity: float) -> SentimentLabel:
    if polarity > 0:
        return SentimentLabel.POSITIVE
    if polarity < 0:
        return SentimentLabel.NEGATIVE
    return SentimentLabel.NEUTRAL


def label_tweet(tweet, lexicon: Lexicon) -> SentimentLabel:
    return classify(score(clean_for_sentiment(tweet.text), lexicon))


def report_from_counts(keyword, n_positive, n_negative, total, printed_neutral=False) -> SentimentReport:
    """Build a report from label counts.

    With ``printed_neutral`` the neutral share uses the historical formula
    ``(total - positive + negative) / total``, which double-counts
    negatives and breaks the 100% sum. Kept only for auditing old output.
    """
    n_neutral = total - n_positive - n_negative
    if total == 0:
        return SentimentReport(keyword, 0, 0, 0, 0, 0.0, 0.0, 0.0)
    if printed_neutral:
        pct_neutral = 100 * (total - n_positive + n_negative) / total
    else:
        pct_neutral = 100 * n_neutral / total
    return SentimentReport(
        keyword=keyword,
        total=total,
        n_positive=n_positive,
        n_negative=n_negative,
        n_neutral=n_neutral,
        pct_positive=100 * n_positive / total,
        pct_negative=100 * n_negative / total,
        pct_neutral=pct_neutral,
    )


def report(tweets, keyword: str, lexicon: Lexicon, printed_neutral: bool = False) -> SentimentReport:
    """Classify every tweet and return the label percentages.

    ``keyword`` only labels the report; filtering happens upstream.
    """
    pos = neg = total = 0
    for tweet in tweets:
        label = label_tweet(tweet, lexicon)
        total += 1
        if label is SentimentLabel.POSITIVE:
            pos += 1
        elif label is SentimentLabel.NEGATIVE:
            neg += 1
    return report_from_counts(keyword, pos, neg, total, printed_neutral)


def top_examples(tweets, label: SentimentLabel, n: int, lexicon: Lexicon) -> list:
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for tweet in tweets:
        if label_tweet(tweet, lexicon) is label:
            out.append(tweet)
            if len(out) == n:
                break
    return out
