import json
from datetime import date, datetime, timedelta

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from covid_misinfo.analytics import (
    UNRESOLVED,
    Correction,
    KeywordQuery,
    Metric,
    TimeSeries,
    correlate,
    cumulative_to_daily,
    daily_counts,
    daily_epi_series,
    forecast,
    hotspot_rank,
    keyword_filter,
    prefix_sum,
)
from covid_misinfo.corpus import EpiRecord

from .oracles import ref_pearson
from .strategies import make_tweet

D0 = date(2020, 11, 1)


def series(values, start=D0, label="s"):
    return TimeSeries(tuple((start + timedelta(days=i), v) for i, v in enumerate(values)), label)


def place(state):
    return json.dumps({"place_type": "city", "full_name": f"Somewhere, {state}", "country_code": "US"})


def test_timeseries_rejects_unsorted_dates():
    with pytest.raises(ValueError):
        TimeSeries(((D0, 1), (D0, 2)))


def test_query_window_validation():
    with pytest.raises(ValueError):
        KeywordQuery("x", since=date(2020, 12, 3), until=date(2020, 11, 1))


def test_keyword_filter_basic():
    tweets = [make_tweet("covid is a hoax"), make_tweet("covid vaccine"), make_tweet("stay safe")]
    assert keyword_filter(tweets, KeywordQuery("hoax")) == [tweets[0]]


def test_keyword_filter_whole_tokens():
    tweets = [make_tweet("COVID19 hoax!")]
    assert keyword_filter(tweets, KeywordQuery("covid hoax")) == []
    assert keyword_filter(tweets, KeywordQuery("covid19 HOAX")) == tweets


def test_keyword_filter_window_and_retweets():
    tweets = [
        make_tweet("hoax", when=datetime(2020, 10, 31, 23, 59)),
        make_tweet("hoax", when=datetime(2020, 11, 1, 0, 0)),
        make_tweet("RT @x: hoax", when=datetime(2020, 11, 2, 8, 0)),
        make_tweet("hoax", when=datetime(2020, 12, 3, 23, 59)),
        make_tweet("hoax", when=datetime(2020, 12, 4, 0, 0)),
    ]
    q = KeywordQuery("hoax", exclude_retweets=True, since=date(2020, 11, 1), until=date(2020, 12, 3))
    assert keyword_filter(tweets, q) == [tweets[1], tweets[3]]
    q2 = KeywordQuery("hoax", exclude_retweets=False, since=date(2020, 11, 1), until=date(2020, 12, 3))
    assert keyword_filter(tweets, q2) == tweets[1:4]
    empty = KeywordQuery("hoax", since=date(2021, 1, 1), until=date(2021, 1, 1))
    assert keyword_filter(tweets, empty) == []


@given(st.lists(st.sampled_from(["covid hoax", "hoax", "RT @a hoax", "fake news", "covid"]), max_size=12),
       st.sampled_from(["hoax", "covid hoax", "fake", ""]), st.booleans())
def test_keyword_filter_properties(texts, words, no_rt):
    tweets = [make_tweet(t, user=str(i)) for i, t in enumerate(texts)]
    q = KeywordQuery(words, exclude_retweets=no_rt)
    out = keyword_filter(tweets, q)
    idx = [tweets.index(t) for t in out]
    assert idx == sorted(idx)
    assert keyword_filter(out, q) == out


@pytest.mark.parametrize("values, correction, expected", [
    ([5, 7, 7, 10], Correction.CLAMP_ZERO, [5, 2, 0, 3]),
    ([5, 4], Correction.CLAMP_ZERO, [5, 0]),
    ([5, 4], Correction.KEEP_NEGATIVE, [5, -1]),
    ([], Correction.CLAMP_ZERO, []),
])
def test_cumulative_to_daily(values, correction, expected):
    out = cumulative_to_daily(series(values), correction)
    assert out.values == expected
    assert out.dates == series(values).dates


@given(st.lists(st.integers(0, 10**9), max_size=60))
def test_telescoping(values):
    s = series(values)
    assert prefix_sum(cumulative_to_daily(s, Correction.KEEP_NEGATIVE)) == s


def test_correlate_examples():
    a = series([1, 2, 3])
    assert correlate(a, a) == 1.0
    assert correlate(a, series([-1, -2, -3])) == -1.0
    assert correlate(a, series([2, 4, 6])) == 1.0


def test_correlate_undefined():
    assert correlate(series([1, 2]), series([1, 2])) is None
    assert correlate(series([1, 1, 1, 1]), series([1, 2, 3, 4])) is None
    assert correlate(series([1, 2, 3]), series([1, 2, 3], start=date(2021, 1, 1))) is None


def test_correlate_lag_alignment():
    # b is a shifted copy of a: b[d + 2] == a[d]
    vals = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3]
    a = series(vals)
    b = series(vals, start=D0 + timedelta(days=2))
    assert correlate(a, b, 2) == pytest.approx(1.0, abs=1e-12)
    assert correlate(a, b, 0) != pytest.approx(1.0, abs=1e-3)
    # lag 9 still overlaps on 3 dates, lag 10 on only 2
    assert correlate(a, b, 9) is not None
    assert correlate(a, b, 10) is None


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=3, max_size=60), st.lists(finite, min_size=3, max_size=60))
def test_correlate_matches_exact_oracle(xs, ys):
    n = min(len(xs), len(ys))
    xs, ys = xs[:n], ys[:n]
    assume(len(set(xs)) > 1 and len(set(ys)) > 1)
    r = correlate(series(xs), series(ys))
    assert r == pytest.approx(ref_pearson(xs, ys), abs=1e-9)
    assert -1.0 <= r <= 1.0
    assert r == pytest.approx(np.corrcoef(xs, ys)[0, 1], abs=1e-6)


@given(st.lists(st.integers(-1000, 1000), min_size=3, max_size=100),
       st.floats(0.01, 100), st.floats(-100, 100))
def test_correlate_affine_invariance(xs, scale, shift):
    assume(len(set(xs)) > 1)
    a = series(xs)
    b = series([scale * x + shift for x in xs])
    assert correlate(a, a) == pytest.approx(1.0, abs=1e-12)
    assert correlate(a, b) == pytest.approx(1.0, abs=1e-12)
    assert correlate(a, series([-x for x in xs])) == pytest.approx(-1.0, abs=1e-12)


def test_daily_counts_zero_fill():
    tweets = [make_tweet("a", when=datetime(2020, 11, 1, 9)), make_tweet("b", when=datetime(2020, 11, 1, 10)),
              make_tweet("c", when=datetime(2020, 11, 3, 1))]
    assert daily_counts(tweets).values == [2, 0, 1]
    assert daily_counts([]).points == ()
    assert daily_counts(tweets, start=date(2020, 10, 31), end=date(2020, 11, 1)).values == [0, 2]


def epi_rows():
    return [
        EpiRecord(date(2020, 11, 1), "AZ", 100, 10, 5),
        EpiRecord(date(2020, 11, 2), "AZ", 160, 12, 9),
        EpiRecord(date(2020, 11, 3), "AZ", 150, 15, 10),
        EpiRecord(date(2020, 11, 1), "VA", 50, None, 1),
        EpiRecord(date(2020, 11, 3), "VA", 80, None, 2),
    ]


def test_daily_epi_series():
    cases = daily_epi_series(epi_rows(), Metric.CASES)
    # AZ: 100, 60, 0(clamped); VA: 50, -, 30
    assert cases.as_dict() == {date(2020, 11, 1): 150, date(2020, 11, 2): 60, date(2020, 11, 3): 30}
    keep = daily_epi_series(epi_rows(), Metric.CASES, Correction.KEEP_NEGATIVE, state="AZ")
    assert keep.values == [100, 60, -10]
    assert daily_epi_series(epi_rows(), Metric.HOSPITALIZATIONS, state="VA").points == ()


def test_hotspot_all_unresolved():
    tweets = [make_tweet("hoax", retweets=i) for i in range(4)]
    rows = hotspot_rank(tweets, epi_rows(), KeywordQuery("hoax"))
    assert len(rows) == 1
    assert (rows[0].state, rows[0].misinformation_tweet_count, rows[0].retweet_sum) == (UNRESOLVED, 4, 6)


def test_hotspot_ordering():
    tweets = [
        make_tweet("hoax", place=place("AZ"), retweets=1),
        make_tweet("hoax", place=place("AZ"), retweets=0),
        make_tweet("hoax", place=place("VA"), retweets=5),
    ]
    rows = hotspot_rank(tweets, epi_rows(), KeywordQuery("hoax"))
    assert [r.state for r in rows] == ["AZ", "VA"]
    az = rows[0]
    assert (az.peak_daily_cases, az.peak_daily_deaths) == (100, 5)


def test_hotspot_tie_break():
    tweets = [
        make_tweet("hoax", place=place("VA"), retweets=1),
        make_tweet("hoax", place=place("AZ"), retweets=9),
        make_tweet("hoax", place=place("TX"), retweets=1),
    ]
    rows = hotspot_rank(tweets, [], KeywordQuery("hoax"))
    assert [r.state for r in rows] == ["AZ", "TX", "VA"]
    assert all(r.peak_daily_cases == 0 for r in rows)


@given(st.lists(st.tuples(st.sampled_from(["hoax", "hoax lie", "fine"]),
                          st.sampled_from([None, "AZ", "VA", "NY"]),
                          st.integers(0, 50)), max_size=30))
def test_hotspot_counts_sum_to_filtered(rows):
    tweets = [make_tweet(t, place=place(s) if s else None, retweets=r) for t, s, r in rows]
    q = KeywordQuery("hoax")
    rows = hotspot_rank(tweets, epi_rows(), q)
    assert sum(r.misinformation_tweet_count for r in rows) == len(keyword_filter(tweets, q))
    keys = [(-r.misinformation_tweet_count, -r.retweet_sum, r.state) for r in rows]
    assert keys == sorted(keys)


@pytest.mark.parametrize("values, alpha, horizon, expected", [
    ([7.5, 7.5, 7.5], 0.3, 2, [7.5, 7.5]),
    ([1, 5], 1.0, 1, [5.0]),
    ([0, 4], 0.5, 1, [2.0]),
    # 10 -> 10 + 0.5 * (20 - 10) = 15 -> 15 + 0.5 * (0 - 15) = 7.5
    ([10, 20, 0], 0.5, 3, [7.5, 7.5, 7.5]),
])
def test_forecast_examples(values, alpha, horizon, expected):
    out = forecast(series(values), horizon, alpha)
    assert out.values == expected
    last = series(values).dates[-1]
    assert out.dates == [last + timedelta(days=i) for i in range(1, horizon + 1)]


def test_forecast_preconditions():
    with pytest.raises(ValueError, match="at least 2"):
        forecast(series([1]), 1, 0.5)
    with pytest.raises(ValueError):
        forecast(series([1, 2]), 1, 0.0)
    with pytest.raises(ValueError):
        forecast(series([1, 2]), 0, 0.5)


@given(st.lists(finite, min_size=2, max_size=50), st.floats(0.001, 1.0), st.integers(1, 10))
def test_forecast_is_flat_and_in_range(values, alpha, horizon):
    out = forecast(series(values), horizon, alpha).values
    assert len(set(out)) == 1
    assert min(values) <= out[0] <= max(values)


@given(st.lists(finite, min_size=2, max_size=30), st.floats(0.01, 0.99))
def test_forecast_matches_recurrence(values, alpha):
    level = values[0]
    for y in values[1:]:
        level = alpha * y + (1 - alpha) * level
    assert forecast(series(values), 1, alpha).values[0] == pytest.approx(level, rel=1e-9, abs=1e-6)
