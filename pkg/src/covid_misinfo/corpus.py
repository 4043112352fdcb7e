"""Parsing and validation of the tweet and epidemiological CSV corpora."""

from __future__ import annotations

import csv
import enum
import functools
import io
import re
from dataclasses import dataclass, fields
from datetime import date, datetime
from typing import BinaryIO, Optional

TWEET_COLUMNS = (
    "Date_Time",
    "text",
    "username",
    "user_location",
    "retweet_count",
    "favourite_count",
    "Place",
)
DEFAULT_TIMESTAMP_FORMAT = "%m/%d/%Y %H:%M"

# b'...' style residue left behind when bytes were written with str()
ARTIFACT_RE = re.compile(r"[bBuUrR]'(.*)'", re.DOTALL)
STATE_RE = re.compile(r"[A-Z]{2}")


class CorpusError(ValueError):
    """Fatal ingestion error; the whole source is rejected."""


class SchemaError(CorpusError):
    def __init__(self, missing, unexpected=()):
        self.missing = list(missing)
        self.unexpected = list(unexpected)
        parts = []
        if self.missing:
            parts.append("missing columns: " + ", ".join(self.missing))
        if self.unexpected:
            parts.append("unrecognized columns: " + ", ".join(self.unexpected))
        super().__init__("; ".join(parts) or "bad header")


class EncodingError(CorpusError):
    def __init__(self, offset, reason):
        self.offset = offset
        super().__init__(f"invalid UTF-8 at byte offset {offset}: {reason}")


class IssueKind(str, enum.Enum):
    MALFORMED_ROW = "malformed_row"
    BAD_TIMESTAMP = "bad_timestamp"
    NEGATIVE_COUNT = "negative_count"
    EMPTY_TEXT = "empty_text"
    DUPLICATE_KEY = "duplicate_key"


@dataclass(frozen=True)
class IngestIssue:
    line_number: int
    kind: IssueKind
    detail: str


@dataclass(frozen=True)
class TweetRecord:
    date_time: datetime
    text: str
    username: str
    user_location: Optional[str]
    retweet_count: int
    favourite_count: int
    place_raw: Optional[str] = None


@dataclass(frozen=True)
class EpiRecord:
    date: date
    state: str
    positive_cum: Optional[int] = None
    hospitalized_cum: Optional[int] = None
    death_cum: Optional[int] = None
    recovered_cum: Optional[int] = None


@dataclass(frozen=True)
class CorpusConfig:
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT
    strip_artifacts: bool = True


@dataclass(frozen=True)
class EpiColumns:
    """Maps EpiRecord fields onto CSV header names."""

    date: str = "date"
    state: str = "state"
    positive: str = "positive"
    hospitalized: str = "hospitalizedCumulative"
    death: str = "death"
    recovered: str = "recovered"


class _RowError(Exception):
    def __init__(self, kind, detail):
        self.kind = kind
        self.detail = detail


def strip_encoding_artifact(value: str) -> str:
    """Remove ``b'...'`` wrappers, repeatedly, so the result is a fixed point."""
    m = ARTIFACT_RE.fullmatch(value)
    while m:
        value = m.group(1)
        m = ARTIFACT_RE.fullmatch(value)
    return value


def _decode(source: BinaryIO | bytes) -> str:
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    try:
        text = bytes(data).decode("utf-8")
    except UnicodeDecodeError as e:
        raise EncodingError(e.start, e.reason) from None
    return text.removeprefix("\ufeff")


def _logical_rows(text):
    """Yield (first physical line, fields or None) per CSV record.

    ``None`` marks a record the csv module could not parse at all.
    """
    reader = csv.reader(io.StringIO(text, newline=""))
    last = 0
    while True:
        try:
            row = next(reader)
        except StopIteration:
            return
        except csv.Error as e:
            yield last + 1, None, str(e)
            last = reader.line_num
            continue
        yield last + 1, row, None
        last = reader.line_num


def _read_header(rows, required, exact):
    try:
        _, header, err = next(rows)
    except StopIteration:
        raise SchemaError(required) from None
    if header is None:
        raise SchemaError(required)
    header = [h.strip() for h in header]
    missing = [c for c in required if c not in header]
    unexpected = [c for c in header if c not in required] if exact else []
    if missing or unexpected:
        raise SchemaError(missing, unexpected)
    return {name: header.index(name) for name in required}, len(header)


def _parse_count(raw, column):
    raw = raw.strip()
    try:
        value = int(raw)
    except ValueError:
        try:
            as_float = float(raw)
        except ValueError:
            raise _RowError(IssueKind.MALFORMED_ROW, f"{column}: not an integer: {raw!r}") from None
        if not as_float.is_integer():
            raise _RowError(IssueKind.MALFORMED_ROW, f"{column}: not an integer: {raw!r}") from None
        value = int(as_float)
    if value < 0:
        raise _RowError(IssueKind.NEGATIVE_COUNT, f"{column}: negative value {value}")
    return value


@functools.lru_cache(maxsize=1 << 16)
def _parse_timestamp(raw, fmt):
    # minute-resolution stamps repeat a lot in real harvests
    return datetime.strptime(raw, fmt)


def _tweet_from_row(row, index, config):
    def cell(name):
        value = row[index[name]]
        if config.strip_artifacts and name in ("text", "username", "user_location"):
            value = strip_encoding_artifact(value)
        return value

    raw_ts = row[index["Date_Time"]].strip()
    try:
        ts = _parse_timestamp(raw_ts, config.timestamp_format)
    except ValueError:
        raise _RowError(IssueKind.BAD_TIMESTAMP, f"cannot parse {raw_ts!r} as {config.timestamp_format!r}") from None
    retweets = _parse_count(row[index["retweet_count"]], "retweet_count")
    favourites = _parse_count(row[index["favourite_count"]], "favourite_count")
    text = cell("text")
    if not text.strip():
        raise _RowError(IssueKind.EMPTY_TEXT, "text is empty")
    return TweetRecord(
        date_time=ts,
        text=text,
        username=cell("username"),
        user_location=cell("user_location") or None,
        retweet_count=retweets,
        favourite_count=favourites,
        place_raw=row[index["Place"]] or None,
    )


def parse_tweet_csv(source, config: CorpusConfig | None = None):
    """Parse a tweet CSV into ``(records, issues)``.

    Every data row produces either one record or one issue, in file order.
    Raises SchemaError for a bad header and EncodingError for invalid UTF-8.
    """
    config = config or CorpusConfig()
    rows = _logical_rows(_decode(source))
    index, width = _read_header(rows, TWEET_COLUMNS, exact=True)
    records, issues = [], []
    for line, row, err in rows:
        if row is None:
            issues.append(IngestIssue(line, IssueKind.MALFORMED_ROW, err))
            continue
        if len(row) != width:
            issues.append(IngestIssue(line, IssueKind.MALFORMED_ROW, f"expected {width} fields, got {len(row)}"))
            continue
        try:
            records.append(_tweet_from_row(row, index, config))
        except _RowError as e:
            issues.append(IngestIssue(line, e.kind, e.detail))
    return records, issues


def _parse_epi_date(raw):
    raw = raw.strip()
    for fmt in ("%Y-%m-%d", "%Y%m%d"):
        try:
            return datetime.strptime(raw, fmt).date()
        except ValueError:
            pass
    raise _RowError(IssueKind.BAD_TIMESTAMP, f"cannot parse date {raw!r}")


def parse_epi_csv(source, mapping: EpiColumns | None = None):
    """Parse a state-level epidemiological CSV into ``(records, issues)``.

    Only mapped columns are read. Blank numeric cells become ``None``.
    A repeated (date, state) pair keeps the first row; later ones are
    reported as ``duplicate_key``.
    """
    mapping = mapping or EpiColumns()
    required = tuple(getattr(mapping, f.name) for f in fields(mapping))
    rows = _logical_rows(_decode(source))
    index, width = _read_header(rows, required, exact=False)
    numeric = (
        ("positive_cum", mapping.positive),
        ("hospitalized_cum", mapping.hospitalized),
        ("death_cum", mapping.death),
        ("recovered_cum", mapping.recovered),
    )
    seen = {}
    records, issues = [], []
    for line, row, err in rows:
        if row is None:
            issues.append(IngestIssue(line, IssueKind.MALFORMED_ROW, err))
            continue
        if len(row) != width:
            issues.append(IngestIssue(line, IssueKind.MALFORMED_ROW, f"expected {width} fields, got {len(row)}"))
            continue
        try:
            day = _parse_epi_date(row[index[mapping.date]])
            state = row[index[mapping.state]].strip()
            if not STATE_RE.fullmatch(state):
                raise _RowError(IssueKind.MALFORMED_ROW, f"bad state code {state!r}")
            values = {}
            for attr, column in numeric:
                cell = row[index[column]]
                values[attr] = _parse_count(cell, column) if cell.strip() else None
        except _RowError as e:
            issues.append(IngestIssue(line, e.kind, e.detail))
            continue
        key = (day, state)
        if key in seen:
            issues.append(IngestIssue(line, IssueKind.DUPLICATE_KEY,
                                      f"({day.isoformat()}, {state}) already seen on line {seen[key]}"))
            continue
        seen[key] = line
        records.append(EpiRecord(date=day, state=state, **values))
    return records, issues


def write_tweet_csv(records, stream, config: CorpusConfig | None = None):
    """Write records in the tweet CSV layout; parse_tweet_csv reads it back unchanged."""
    config = config or CorpusConfig()
    writer = csv.writer(stream)
    writer.writerow(TWEET_COLUMNS)
    for r in records:
        writer.writerow([
            r.date_time.strftime(config.timestamp_format),
            r.text,
            r.username,
            r.user_location or "",
            r.retweet_count,
            r.favourite_count,
            r.place_raw or "",
        ])


def write_epi_csv(records, stream, mapping: EpiColumns | None = None):
    mapping = mapping or EpiColumns()
    writer = csv.writer(stream)
    writer.writerow([mapping.date, mapping.state, mapping.positive, mapping.hospitalized,
                     mapping.death, mapping.recovered])
    for r in records:
        writer.writerow([
            r.date.isoformat(), r.state,
            *("" if v is None else v for v in (r.positive_cum, r.hospitalized_cum, r.death_cum, r.recovered_cum)),
        ])


def write_issues_csv(issues, stream):
    writer = csv.writer(stream)
    writer.writerow(["line_number", "kind", "detail"])
    for issue in issues:
        writer.writerow([issue.line_number, issue.kind.value, issue.detail])
