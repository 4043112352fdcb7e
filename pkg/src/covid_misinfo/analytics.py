"""Keyword slicing, epidemiological series, hotspots, correlation and forecasting."""

from __future__ import annotations

import enum
import functools
import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Optional

from .placeparse import resolve_state
from .textprep import tokenize

RETWEET_MARKER = "RT @"
UNRESOLVED = "UNRESOLVED"


class Correction(str, enum.Enum):
    CLAMP_ZERO = "clamp_zero"
    KEEP_NEGATIVE = "keep_negative"


class Metric(str, enum.Enum):
    CASES = "cases"
    HOSPITALIZATIONS = "hospitalizations"
    DEATHS = "deaths"

    @property
    def field(self):
        return {
            Metric.CASES: "positive_cum",
            Metric.HOSPITALIZATIONS: "hospitalized_cum",
            Metric.DEATHS: "death_cum",
        }[self]


@dataclass(frozen=True)
class KeywordQuery:
    """Tweet selection. ``since``/``until`` are inclusive; ``None`` leaves that side open.

    ``language`` is carried for completeness only: the tweet CSV has no
    language column to filter on.
    """

    search_words: str
    exclude_retweets: bool = True
    since: Optional[date] = None
    until: Optional[date] = None
    language: Optional[str] = None

    def __post_init__(self):
        if self.since is not None and self.until is not None and self.since > self.until:
            raise ValueError(f"since {self.since} is after until {self.until}")
        if self.language is not None and len(self.language) != 2:
            raise ValueError(f"language must be a 2-letter code, got {self.language!r}")

    @functools.cached_property
    def tokens(self):
        return tokenize(self.search_words)


@dataclass(frozen=True)
class TimeSeries:
    points: tuple
    label: str = ""

    def __post_init__(self):
        points = tuple((d, v) for d, v in self.points)
        for (d0, _), (d1, _) in zip(points, points[1:]):
            if not d0 < d1:
                raise ValueError(f"series {self.label!r}: dates not strictly increasing at {d1}")
        object.__setattr__(self, "points", points)

    def __len__(self):
        return len(self.points)

    @property
    def dates(self):
        return [d for d, _ in self.points]

    @property
    def values(self):
        return [v for _, v in self.points]

    def as_dict(self):
        return dict(self.points)


@dataclass(frozen=True)
class HotspotRow:
    state: str
    misinformation_tweet_count: int
    retweet_sum: int
    peak_daily_cases: int
    peak_daily_deaths: int


def _in_window(day, query):
    if query.since is not None and day < query.since:
        return False
    if query.until is not None and day > query.until:
        return False
    return True


def matches(tweet, query: KeywordQuery, tokens=None) -> bool:
    """Whether one tweet passes ``query``. ``tokens`` may carry a precomputed tokenization."""
    if query.exclude_retweets and tweet.text.startswith(RETWEET_MARKER):
        return False
    if not _in_window(tweet.date_time.date(), query):
        return False
    wanted = query.tokens
    if not wanted:
        return True
    have = tokens if isinstance(tokens, (set, frozenset)) else set(tokens or tokenize(tweet.text))
    return all(t in have for t in wanted)


def keyword_filter(tweets, query: KeywordQuery) -> list:
    return [t for t in tweets if matches(t, query)]


def cumulative_to_daily(series: TimeSeries, correction=Correction.CLAMP_ZERO) -> TimeSeries:
    correction = Correction(correction)
    out = []
    prev = None
    for d, v in series.points:
        diff = v if prev is None else v - prev
        if correction is Correction.CLAMP_ZERO and diff < 0:
            diff = 0 if isinstance(diff, int) else 0.0
        out.append((d, diff))
        prev = v
    return TimeSeries(tuple(out), series.label)


def prefix_sum(series: TimeSeries) -> TimeSeries:
    out = []
    total = 0
    for d, v in series.points:
        total += v
        out.append((d, total))
    return TimeSeries(tuple(out), series.label)


def correlate(a: TimeSeries, b: TimeSeries, lag_days: int = 0) -> Optional[float]:
    """Pearson correlation of ``a[d]`` against ``b[d + lag_days]``.

    Only dates present in both (after the shift) are used. Returns None
    for fewer than 3 pairs or a constant side.
    """
    shift = timedelta(days=lag_days)
    b_map = b.as_dict()
    xs, ys = [], []
    for d, v in a.points:
        w = b_map.get(d + shift)
        if w is not None:
            xs.append(float(v))
            ys.append(float(w))
    n = len(xs)
    if n < 3:
        return None
    if all(x == xs[0] for x in xs) or all(y == ys[0] for y in ys):
        return None
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    sxx = math.fsum(x * x for x in dx)
    syy = math.fsum(y * y for y in dy)
    if sxx == 0 or syy == 0:
        return None
    sxy = math.fsum(x * y for x, y in zip(dx, dy))
    denom = math.sqrt(sxx * syy)
    if not math.isfinite(denom) or denom == 0:
        denom = math.sqrt(sxx) * math.sqrt(syy)
    r = sxy / denom
    return max(-1.0, min(1.0, r))


def daily_counts(tweets, label="tweets", start=None, end=None) -> TimeSeries:
    """Tweets per calendar day, zero-filled across ``[start, end]``.

    The range defaults to the first and last tweet dates.
    """
    counts = defaultdict(int)
    for t in tweets:
        counts[t.date_time.date()] += 1
    if start is None:
        start = min(counts, default=None)
    if end is None:
        end = max(counts, default=None)
    if start is None or end is None or start > end:
        return TimeSeries((), label)
    points = []
    d = start
    while d <= end:
        points.append((d, counts.get(d, 0)))
        d += timedelta(days=1)
    return TimeSeries(tuple(points), label)


def state_cumulative(epi, metric: Metric, state: str) -> TimeSeries:
    """Cumulative series for one state, skipping dates where the metric is blank."""
    field = Metric(metric).field
    pts = sorted((r.date, getattr(r, field)) for r in epi
                 if r.state == state and getattr(r, field) is not None)
    return TimeSeries(tuple(pts), f"{state} {Metric(metric).value}")


def daily_epi_series(epi, metric: Metric, correction=Correction.CLAMP_ZERO, state=None) -> TimeSeries:
    """Daily new counts for one state, or summed over states when ``state`` is None.

    Differences are taken per state before summing, so a state skipping a
    day does not turn into a national drop followed by a spike.
    """
    metric = Metric(metric)
    states = [state] if state is not None else sorted({r.state for r in epi})
    totals = defaultdict(int)
    for s in states:
        for d, v in cumulative_to_daily(state_cumulative(epi, metric, s), correction).points:
            totals[d] += v
    return TimeSeries(tuple(sorted(totals.items())), metric.value)


def national_cumulative(epi, metric: Metric) -> TimeSeries:
    """Sum of per-state cumulative values by date (blank cells count as absent)."""
    field = Metric(metric).field
    totals = defaultdict(int)
    for r in epi:
        v = getattr(r, field)
        if v is not None:
            totals[r.date] += v
    return TimeSeries(tuple(sorted(totals.items())), f"cumulative {Metric(metric).value}")


def _peak_daily(epi, metric, state):
    series = state_cumulative(epi, metric, state)
    daily = cumulative_to_daily(series, Correction.CLAMP_ZERO)
    return int(max(daily.values, default=0))


def hotspot_rank(tweets, epi, query: KeywordQuery, use_user_location: bool = False) -> list:
    """Rank states by matching tweet volume, joined with peak daily epi burden.

    Tweets whose state cannot be resolved are pooled under ``UNRESOLVED``.
    Order: tweet count desc, retweet sum desc, state code asc.
    """
    counts = defaultdict(int)
    retweets = defaultdict(int)
    for t in keyword_filter(tweets, query):
        state = resolve_state(t, use_user_location) or UNRESOLVED
        counts[state] += 1
        retweets[state] += t.retweet_count
    rows = []
    for state in counts:
        if state == UNRESOLVED:
            cases = deaths = 0
        else:
            cases = _peak_daily(epi, Metric.CASES, state)
            deaths = _peak_daily(epi, Metric.DEATHS, state)
        rows.append(HotspotRow(state, counts[state], retweets[state], cases, deaths))
    rows.sort(key=lambda r: (-r.misinformation_tweet_count, -r.retweet_sum, r.state))
    return rows


def forecast(series: TimeSeries, horizon_days: int, alpha: float) -> TimeSeries:
    """Simple exponential smoothing; the final level is held flat over the horizon."""
    if len(series) < 2:
        raise ValueError(f"forecast needs at least 2 points, got {len(series)}")
    if horizon_days < 1:
        raise ValueError("horizon_days must be >= 1")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    values = [float(v) for v in series.values]
    level = values[0]
    for y in values[1:]:
        if alpha == 1:
            level = y
        else:
            # the level is a convex combination of level and y; clamp away rounding
            nxt = level + alpha * (y - level)
            level = min(max(nxt, min(level, y)), max(level, y))
    last = series.points[-1][0]
    points = tuple((last + timedelta(days=i), level) for i in range(1, horizon_days + 1))
    return TimeSeries(points, f"{series.label} forecast".strip())
