"""Command-line batch runs: ingest, sentiment, correlate, hotspots, forecast, plot."""

from __future__ import annotations

import argparse
import csv
import logging
import re
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional

from . import analytics, svgchart
from .analytics import Correction, KeywordQuery, Metric, TimeSeries
from .corpus import (
    CorpusError,
    parse_epi_csv,
    parse_tweet_csv,
    write_epi_csv,
    write_issues_csv,
    write_tweet_csv,
)
from .sentiment import (
    REPORT_COLUMNS,
    Lexicon,
    LexiconError,
    SentimentLabel,
    label_tweet,
    report_from_counts,
)
from .textprep import CleanConfig, StopwordList, clean_corpus_text, tokenize

log = logging.getLogger("covid_misinfo")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_SCHEMA = 3

DEFAULT_KEYWORDS = (
    "COVID-19",
    "COVID-19 hoax",
    "COVID-19 conspiracy",
    "COVID-19 fake news",
    "COVID-19 spike",
    "COVID-19 hospitalizations",
    "COVID-19 death",
)
EXAMPLES_PER_LABEL = 10


class CommandError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    out: Path
    tweets: Optional[Path] = None
    epi: Optional[Path] = None
    lexicon: Optional[Path] = None
    stopwords: Optional[Path] = None
    keywords: tuple = DEFAULT_KEYWORDS
    since: Optional[date] = None
    until: Optional[date] = None
    exclude_retweets: bool = False
    lag_window: int = 7
    alpha: float = 0.5
    horizon: int = 14
    correction: Correction = Correction.CLAMP_ZERO
    format: str = "csv"
    use_user_location: bool = False
    series: list = field(default_factory=list)

    def query(self, keyword):
        return KeywordQuery(keyword, exclude_retweets=self.exclude_retweets,
                            since=self.since, until=self.until)


# --- input helpers -------------------------------------------------------

def _require(path, flag):
    if path is None:
        raise CommandError(EXIT_USAGE, f"{flag} is required")
    if not path.is_file():
        raise CommandError(EXIT_INPUT, f"cannot read {flag} file: {path}")
    return path


def _read_bytes(path):
    try:
        return path.read_bytes()
    except OSError as e:
        raise CommandError(EXIT_INPUT, f"cannot read {path}: {e.strerror}") from None


def _load_tweets(cfg):
    try:
        return parse_tweet_csv(_read_bytes(cfg.tweets))
    except CorpusError as e:
        raise CommandError(EXIT_SCHEMA, f"{cfg.tweets}: {e}") from None


def _load_epi(cfg):
    try:
        return parse_epi_csv(_read_bytes(cfg.epi))
    except CorpusError as e:
        raise CommandError(EXIT_SCHEMA, f"{cfg.epi}: {e}") from None


def _load_lexicon(cfg):
    try:
        lexicon = Lexicon.load(cfg.lexicon) if cfg.lexicon else Lexicon.default()
    except LexiconError as e:
        raise CommandError(EXIT_SCHEMA, str(e)) from None
    except (OSError, UnicodeDecodeError) as e:
        raise CommandError(EXIT_INPUT, f"cannot read lexicon {cfg.lexicon}: {e}") from None
    if len(lexicon) == 0:
        raise CommandError(EXIT_INPUT, f"lexicon {cfg.lexicon or 'default'} has no entries")
    return lexicon


def _report_issues(kind, issues):
    for issue in issues:
        log.warning("%s line %d: %s: %s", kind, issue.line_number, issue.kind.value, issue.detail)


# --- output helpers ------------------------------------------------------

def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def render_text_table(header, rows):
    cells = [[str(h) for h in header]] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for n, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _write_table(cfg, stem, header, rows):
    if cfg.format == "text":
        path = cfg.out / f"{stem}.txt"
        path.write_text(render_text_table(header, rows), encoding="utf-8")
    else:
        path = cfg.out / f"{stem}.csv"
        _write_csv(path, header, rows)
    return path


def slugify(label):
    slug = re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_")
    return slug or "series"


def write_series(path, series: TimeSeries):
    _write_csv(path, ["date", "value"], [(d.isoformat(), v) for d, v in series.points])


def read_series(path) -> TimeSeries:
    text = path.read_text(encoding="utf-8")
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        return TimeSeries((), path.stem)
    if [h.strip() for h in rows[0]] != ["date", "value"]:
        raise ValueError(f"{path}: expected header 'date,value'")
    points = []
    for row in rows[1:]:
        if not row:
            continue
        d = date.fromisoformat(row[0])
        try:
            v = int(row[1])
        except ValueError:
            v = float(row[1])
        points.append((d, v))
    return TimeSeries(tuple(points), path.stem)


def _series_dir(cfg):
    d = cfg.out / "series"
    d.mkdir(parents=True, exist_ok=True)
    return d


# --- commands ------------------------------------------------------------

def cmd_ingest(cfg: RunConfig):
    _require(cfg.tweets, "--tweets")
    if cfg.epi is not None:
        _require(cfg.epi, "--epi")
    if cfg.stopwords is not None:
        _require(cfg.stopwords, "--stopwords")
    records, issues = _load_tweets(cfg)
    epi = _load_epi(cfg) if cfg.epi else None
    try:
        stopwords = StopwordList.load(cfg.stopwords) if cfg.stopwords else StopwordList.default()
    except ValueError as e:
        raise CommandError(EXIT_SCHEMA, f"{cfg.stopwords}: {e}") from None
    clean_cfg = CleanConfig(stopwords=stopwords)

    cfg.out.mkdir(parents=True, exist_ok=True)
    with open(cfg.out / "tweets.csv", "w", encoding="utf-8", newline="") as f:
        write_tweet_csv(records, f)
    with open(cfg.out / "tweet_issues.csv", "w", encoding="utf-8", newline="") as f:
        write_issues_csv(issues, f)
    _write_csv(cfg.out / "tweets_clean.csv", ["row", "clean_text", "tokens"],
               ((i, clean_corpus_text(r.text, clean_cfg), " ".join(tokenize(r.text)))
                for i, r in enumerate(records, 1)))
    _report_issues("tweets", issues)
    summary = {"records": len(records), "issues": len(issues)}
    print(f"{_plural(len(records), 'record')}, {_plural(len(issues), 'issue')}")
    if epi is not None:
        epi_records, epi_issues = epi
        with open(cfg.out / "epi.csv", "w", encoding="utf-8", newline="") as f:
            write_epi_csv(epi_records, f)
        with open(cfg.out / "epi_issues.csv", "w", encoding="utf-8", newline="") as f:
            write_issues_csv(epi_issues, f)
        _report_issues("epi", epi_issues)
        print(f"epi: {_plural(len(epi_records), 'record')}, {_plural(len(epi_issues), 'issue')}")
        summary.update(epi_records=len(epi_records), epi_issues=len(epi_issues))
    return summary


def _plural(n, noun):
    return f"{n} {noun}" if n == 1 else f"{n} {noun}s"


def cmd_sentiment(cfg: RunConfig):
    _require(cfg.tweets, "--tweets")
    if cfg.lexicon is not None:
        _require(cfg.lexicon, "--lexicon")
    lexicon = _load_lexicon(cfg)
    tweets, issues = _load_tweets(cfg)
    _report_issues("tweets", issues)

    # label and tokenize each tweet once; keywords only change the subset
    labels = [label_tweet(t, lexicon) for t in tweets]
    token_sets = [frozenset(tokenize(t.text)) for t in tweets]

    reports, examples = [], []
    for keyword in cfg.keywords:
        query = cfg.query(keyword)
        pos = neg = total = 0
        shown = {SentimentLabel.POSITIVE: 0, SentimentLabel.NEGATIVE: 0}
        for tweet, label, toks in zip(tweets, labels, token_sets):
            if not analytics.matches(tweet, query, toks):
                continue
            total += 1
            if label is SentimentLabel.POSITIVE:
                pos += 1
            elif label is SentimentLabel.NEGATIVE:
                neg += 1
            if label in shown and shown[label] < EXAMPLES_PER_LABEL:
                shown[label] += 1
                examples.append((keyword, label.value, shown[label], tweet.text))
        reports.append(report_from_counts(keyword, pos, neg, total))

    cfg.out.mkdir(parents=True, exist_ok=True)
    _write_table(cfg, "sentiment_report", REPORT_COLUMNS, [r.as_row() for r in reports])
    examples.sort(key=lambda e: (cfg.keywords.index(e[0]), e[1] != "positive", e[2]))
    _write_table(cfg, "sentiment_examples", ["keyword", "label", "rank", "text"], examples)
    for r in reports:
        print(f"{r.keyword}: {r.total} tweets, positive {r.pct_positive:.2f}%, "
              f"negative {r.pct_negative:.2f}%, neutral {r.pct_neutral:.2f}%")
    return reports


def cmd_correlate(cfg: RunConfig):
    _require(cfg.tweets, "--tweets")
    _require(cfg.epi, "--epi")
    tweets, issues = _load_tweets(cfg)
    epi, epi_issues = _load_epi(cfg)
    _report_issues("tweets", issues)
    _report_issues("epi", epi_issues)

    lags = list(range(-cfg.lag_window, cfg.lag_window + 1))
    metric_series = {m: analytics.daily_epi_series(epi, m, cfg.correction) for m in Metric}
    keyword_series = {}
    rows = []
    defined = 0
    for keyword in cfg.keywords:
        matched = analytics.keyword_filter(tweets, cfg.query(keyword))
        counts = analytics.daily_counts(matched, f"tweets {keyword}", cfg.since, cfg.until)
        keyword_series[keyword] = counts
        for m in Metric:
            coeffs = [analytics.correlate(counts, metric_series[m], lag) for lag in lags]
            defined += sum(c is not None for c in coeffs)
            rows.append([keyword, m.value, *coeffs])
    if not defined:
        log.warning("no correlation is defined at any lag (no overlapping, non-constant dates)")

    cfg.out.mkdir(parents=True, exist_ok=True)
    header = ["keyword", "metric", *(f"lag_{lag}" for lag in lags)]
    _write_table(cfg, "correlation", header, rows)

    dates = sorted({d for s in keyword_series.values() for d in s.dates})
    aligned_header = ["date", *(f"tweets:{k}" for k in cfg.keywords), *(m.value for m in Metric)]
    lookups = [keyword_series[k].as_dict() for k in cfg.keywords] + [metric_series[m].as_dict() for m in Metric]
    _write_csv(cfg.out / "aligned_series.csv", aligned_header,
               ([d.isoformat(), *(lk.get(d) for lk in lookups)] for d in dates))

    sdir = _series_dir(cfg)
    for keyword, s in keyword_series.items():
        write_series(sdir / f"tweets_{slugify(keyword)}.csv", s)
    for m, s in metric_series.items():
        write_series(sdir / f"daily_{m.value}.csv", s)
    print(f"{len(rows)} correlation rows over lags {lags[0]}..{lags[-1]}")
    return rows


def cmd_hotspots(cfg: RunConfig):
    _require(cfg.tweets, "--tweets")
    if cfg.epi is not None:
        _require(cfg.epi, "--epi")
    tweets, issues = _load_tweets(cfg)
    _report_issues("tweets", issues)
    epi = []
    if cfg.epi is not None:
        epi, epi_issues = _load_epi(cfg)
        _report_issues("epi", epi_issues)

    rows = []
    for keyword in cfg.keywords:
        ranked = analytics.hotspot_rank(tweets, epi, cfg.query(keyword), cfg.use_user_location)
        for rank, r in enumerate(ranked, 1):
            rows.append([keyword, rank, r.state, r.misinformation_tweet_count, r.retweet_sum,
                         r.peak_daily_cases, r.peak_daily_deaths])
    cfg.out.mkdir(parents=True, exist_ok=True)
    header = ["keyword", "rank", "state", "misinformation_tweet_count", "retweet_sum",
              "peak_daily_cases", "peak_daily_deaths"]
    _write_table(cfg, "hotspots", header, rows)
    print(f"{len(rows)} hotspot rows for {_plural(len(cfg.keywords), 'keyword')}")
    return rows


def cmd_forecast(cfg: RunConfig):
    _require(cfg.epi, "--epi")
    epi, epi_issues = _load_epi(cfg)
    _report_issues("epi", epi_issues)
    if not 0 < cfg.alpha <= 1:
        raise CommandError(EXIT_USAGE, f"--alpha must be in (0, 1], got {cfg.alpha}")
    if cfg.horizon < 1:
        raise CommandError(EXIT_USAGE, f"--horizon must be >= 1, got {cfg.horizon}")

    cfg.out.mkdir(parents=True, exist_ok=True)
    sdir = _series_dir(cfg)
    rows = []
    for m in Metric:
        daily = analytics.daily_epi_series(epi, m, cfg.correction)
        if len(daily) < 2:
            log.warning("skipping %s forecast: needs at least 2 daily points, have %d", m.value, len(daily))
            continue
        fc = analytics.forecast(daily, cfg.horizon, cfg.alpha)
        rows.extend([m.value, d.isoformat(), v] for d, v in fc.points)
        write_series(sdir / f"daily_{m.value}.csv", daily)
        write_series(sdir / f"forecast_{m.value}.csv", fc)
    _write_table(cfg, "forecast", ["metric", "date", "value"], rows)
    print(f"{len(rows)} forecast rows (alpha={cfg.alpha}, horizon={cfg.horizon})")
    return rows


def cmd_plot(cfg: RunConfig):
    if cfg.series:
        paths = [Path(p) for p in cfg.series]
        for p in paths:
            if not p.is_file():
                raise CommandError(EXIT_INPUT, f"missing series file: {p}")
    else:
        sdir = cfg.out / "series"
        paths = sorted(sdir.glob("*.csv")) if sdir.is_dir() else []
        if not paths:
            raise CommandError(EXIT_INPUT, f"missing series files: nothing under {sdir}")
    if cfg.epi is not None:
        _require(cfg.epi, "--epi")

    loaded = []
    for p in paths:
        try:
            loaded.append((p, read_series(p)))
        except (ValueError, IndexError, UnicodeDecodeError) as e:
            raise CommandError(EXIT_SCHEMA, f"bad series file {p}: {e}") from None
    epi = None
    if cfg.epi is not None:
        epi, epi_issues = _load_epi(cfg)
        _report_issues("epi", epi_issues)

    cdir = cfg.out / "charts"
    cdir.mkdir(parents=True, exist_ok=True)
    written = []
    for p, series in loaded:
        svg = svgchart.render_line_chart([(p.stem, series.points)], title=p.stem, y_label="value")
        target = cdir / f"{p.stem}.svg"
        target.write_text(svg, encoding="utf-8")
        written.append(target)
    if epi is not None:
        traces = [
            ("cumulative confirmed", analytics.national_cumulative(epi, Metric.CASES).points),
            ("cumulative deaths", analytics.national_cumulative(epi, Metric.DEATHS).points),
            ("daily new confirmed", analytics.daily_epi_series(epi, Metric.CASES, cfg.correction).points),
        ]
        target = cdir / "national.svg"
        target.write_text(svgchart.render_line_chart(traces, title="United States", y_label="count"),
                          encoding="utf-8")
        written.append(target)
    print(f"{_plural(len(written), 'chart')} written to {cdir}")
    return written


COMMAND_HELP = {
    "ingest": "validate tweet/epi CSVs and write canonical copies plus issue logs",
    "sentiment": "per-keyword positive/negative/neutral percentages",
    "correlate": "lagged Pearson correlation of tweet volume against daily cases/hospitalizations/deaths",
    "hotspots": "rank states by matching tweet volume with peak daily cases and deaths",
    "forecast": "exponential-smoothing forecast of national daily series",
    "plot": "SVG line charts for series files",
}

COMMANDS = {
    "ingest": cmd_ingest,
    "sentiment": cmd_sentiment,
    "correlate": cmd_correlate,
    "hotspots": cmd_hotspots,
    "forecast": cmd_forecast,
    "plot": cmd_plot,
}


# --- argument parsing ----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _iso_date(text):
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from None


def _keywords(text):
    words = tuple(k.strip() for k in text.split(",") if k.strip())
    if not words:
        raise argparse.ArgumentTypeError("no keywords given")
    return words


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tweets", type=Path, help="tweet CSV")
    common.add_argument("--epi", type=Path, help="state-level epidemiological CSV")
    common.add_argument("--lexicon", type=Path, help="term<TAB>polarity file (default: bundled)")
    common.add_argument("--stopwords", type=Path, help="one stopword per line (default: bundled)")
    common.add_argument("--keywords", type=_keywords, default=DEFAULT_KEYWORDS,
                        help='comma-separated search terms, e.g. "covid hoax,covid conspiracy"')
    common.add_argument("--since", type=_iso_date, help="first day kept, YYYY-MM-DD")
    common.add_argument("--until", type=_iso_date, help="last day kept, YYYY-MM-DD")
    common.add_argument("--exclude-retweets", action="store_true", help="drop tweets starting with 'RT @'")
    common.add_argument("--lag-window", type=int, default=7, help="correlate lags -N..N days")
    common.add_argument("--alpha", type=float, default=0.5, help="smoothing factor in (0, 1]")
    common.add_argument("--horizon", type=int, default=14, help="forecast days")
    common.add_argument("--correction", choices=("clamp", "keep"), default="clamp",
                        help="negative daily differences: clamp to 0 or keep")
    common.add_argument("--use-user-location", action="store_true",
                        help="fall back to user_location when a tweet has no place state")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    common.add_argument("--format", choices=("csv", "text"), default="csv", help="report table format")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="covid-misinfo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=COMMAND_HELP[name])
        if name == "plot":
            p.add_argument("series", nargs="*", help="series CSV files (default: OUT/series/*.csv)")
    return parser


def config_from_args(args) -> RunConfig:
    if args.since and args.until and args.since > args.until:
        raise CommandError(EXIT_USAGE, "--since is after --until")
    if args.lag_window < 0:
        raise CommandError(EXIT_USAGE, "--lag-window must be >= 0")
    return RunConfig(
        out=args.out,
        tweets=args.tweets,
        epi=args.epi,
        lexicon=args.lexicon,
        stopwords=args.stopwords,
        keywords=tuple(args.keywords),
        since=args.since,
        until=args.until,
        exclude_retweets=args.exclude_retweets,
        lag_window=args.lag_window,
        alpha=args.alpha,
        horizon=args.horizon,
        correction=Correction.CLAMP_ZERO if args.correction == "clamp" else Correction.KEEP_NEGATIVE,
        format=args.format,
        use_user_location=args.use_user_location,
        series=list(getattr(args, "series", []) or []),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(args)
        COMMANDS[args.command](cfg)
    except CommandError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
