"""Misinformation analytics over COVID-19 tweet and case-count corpora."""

from .analytics import (
    Correction,
    HotspotRow,
    KeywordQuery,
    Metric,
    TimeSeries,
    correlate,
    cumulative_to_daily,
    forecast,
    hotspot_rank,
    keyword_filter,
)
from .corpus import (
    CorpusConfig,
    EpiColumns,
    EpiRecord,
    IngestIssue,
    IssueKind,
    TweetRecord,
    parse_epi_csv,
    parse_tweet_csv,
    strip_encoding_artifact,
)
from .placeparse import PlaceInfo, parse_place
from .sentiment import Lexicon, SentimentLabel, SentimentReport, classify, report, score, top_examples
from .textprep import CleanConfig, StopwordList, clean_corpus_text, clean_for_sentiment, tokenize

__version__ = "0.1.0"
