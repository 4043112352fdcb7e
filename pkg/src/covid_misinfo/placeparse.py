"""Structured parsing of the tweet ``Place`` column.

The column holds a serialized place object: JSON, a Python dict repr, or
the ``Place(key=value, ...)`` repr some clients write. All three are
handled; anything else degrades to whatever fields a regex scan can find.
"""

from __future__ import annotations

import ast
import json
import math
import re
import warnings
from dataclasses import dataclass
from typing import Optional

from .corpus import strip_encoding_artifact

US_STATES = {
    "AL": "Alabama", "AK": "Alaska", "AZ": "Arizona", "AR": "Arkansas", "CA": "California",
    "CO": "Colorado", "CT": "Connecticut", "DE": "Delaware", "FL": "Florida", "GA": "Georgia",
    "HI": "Hawaii", "ID": "Idaho", "IL": "Illinois", "IN": "Indiana", "IA": "Iowa",
    "KS": "Kansas", "KY": "Kentucky", "LA": "Louisiana", "ME": "Maine", "MD": "Maryland",
    "MA": "Massachusetts", "MI": "Michigan", "MN": "Minnesota", "MS": "Mississippi", "MO": "Missouri",
    "MT": "Montana", "NE": "Nebraska", "NV": "Nevada", "NH": "New Hampshire", "NJ": "New Jersey",
    "NM": "New Mexico", "NY": "New York", "NC": "North Carolina", "ND": "North Dakota", "OH": "Ohio",
    "OK": "Oklahoma", "OR": "Oregon", "PA": "Pennsylvania", "RI": "Rhode Island", "SC": "South Carolina",
    "SD": "South Dakota", "TN": "Tennessee", "TX": "Texas", "UT": "Utah", "VT": "Vermont",
    "VA": "Virginia", "WA": "Washington", "WV": "West Virginia", "WI": "Wisconsin", "WY": "Wyoming",
    "DC": "District of Columbia", "PR": "Puerto Rico", "GU": "Guam", "VI": "Virgin Islands",
    "AS": "American Samoa", "MP": "Northern Mariana Islands",
}
STATE_BY_NAME = {name.lower(): code for code, name in US_STATES.items()}

_NUM = r"-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"
_PAIR_RE = re.compile(r"\[\s*(" + _NUM + r")\s*,\s*(" + _NUM + r")\s*\]")
_TEXT_FIELDS = ("place_type", "full_name", "country_code", "country")


def _field_re(key):
    # key='v' | key="v" | 'key': 'v' | "key": "v"
    return re.compile(
        r"""['"]?\b""" + key + r"""\b['"]?\s*[:=]\s*(?:'((?:[^'\\]|\\.)*)'|"((?:[^"\\]|\\.)*)")"""
    )


_FIELD_RES = {k: _field_re(k) for k in _TEXT_FIELDS}
_COORD_KEY_RE = re.compile(r"coordinates")


@dataclass(frozen=True)
class PlaceInfo:
    place_type: Optional[str] = None
    coordinate: Optional[tuple] = None  # (latitude, longitude)
    city: Optional[str] = None
    state: Optional[str] = None
    country_code: Optional[str] = None
    country: Optional[str] = None
    warnings: tuple = ()

    def is_empty(self):
        return all(getattr(self, f) is None for f in
                   ("place_type", "coordinate", "city", "state", "country_code", "country"))


def _split_full_name(full_name):
    if full_name is None:
        return None, None
    head, sep, tail = full_name.rpartition(",")
    if not sep:
        return None, full_name.strip() or None
    return head.strip() or None, tail.strip() or None


def _clean_country_code(raw):
    if raw is None:
        return None
    code = raw.strip().upper()
    if re.fullmatch(r"[A-Z]{2}", code):
        return code
    return None


def _valid_coordinate(lon, lat):
    try:
        lon, lat = float(lon), float(lat)
    except (TypeError, ValueError):
        return None
    if not (math.isfinite(lon) and math.isfinite(lat)):
        return None
    if -90 <= lat <= 90 and -180 <= lon <= 180:
        return (lat, lon)
    return None


def _first_vertex(coords):
    # descend nested lists until a [lon, lat] pair
    while isinstance(coords, (list, tuple)) and coords and isinstance(coords[0], (list, tuple)):
        coords = coords[0]
    if isinstance(coords, (list, tuple)) and len(coords) >= 2:
        return _valid_coordinate(coords[0], coords[1])
    return None


def _str_or_none(value):
    if isinstance(value, str):
        return value.strip() or None
    return None


def _from_mapping(obj):
    warnings = []
    point = None
    for key in ("coordinates", "centroid"):
        value = obj.get(key)
        if isinstance(value, dict):
            value = value.get("coordinates")
        if value is not None:
            point = _first_vertex(value)
            if point:
                break
    if point is None:
        bbox = obj.get("bounding_box")
        if isinstance(bbox, dict):
            point = _first_vertex(bbox.get("coordinates"))
        elif isinstance(bbox, (list, tuple)):
            point = _first_vertex(bbox)
        if bbox is not None and point is None:
            warnings.append("unusable bounding box")
    city, state = _split_full_name(_str_or_none(obj.get("full_name")))
    raw_code = _str_or_none(obj.get("country_code"))
    code = _clean_country_code(raw_code)
    if raw_code and code is None:
        warnings.append(f"bad country code {raw_code!r}")
    return PlaceInfo(
        place_type=_str_or_none(obj.get("place_type")),
        coordinate=point,
        city=city,
        state=state,
        country_code=code,
        country=_str_or_none(obj.get("country")),
        warnings=tuple(warnings),
    )


def _literal(text):
    # untrusted text: bad escapes in it should not surface as warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ast.literal_eval(text)


def _unescape(value):
    try:
        return _literal("'" + value + "'")
    except (ValueError, SyntaxError):
        return value


def _from_scan(text):
    found = {}
    for key, rx in _FIELD_RES.items():
        m = rx.search(text)
        if m:
            found[key] = _unescape(m.group(1) if m.group(1) is not None else m.group(2))
    point = None
    m = _COORD_KEY_RE.search(text)
    if m:
        pair = _PAIR_RE.search(text, m.end())
        if pair:
            point = _valid_coordinate(pair.group(1), pair.group(2))
    city, state = _split_full_name(_str_or_none(found.get("full_name")))
    info = PlaceInfo(
        place_type=_str_or_none(found.get("place_type")),
        coordinate=point,
        city=city,
        state=state,
        country_code=_clean_country_code(found.get("country_code")),
        country=_str_or_none(found.get("country")),
        warnings=("not a structured place object; fields recovered by scanning",),
    )
    if info.is_empty():
        return PlaceInfo(warnings=("unparseable place value",))
    return info


def _load_mapping(text):
    try:
        obj = json.loads(text)
    except (ValueError, RecursionError):
        obj = None
    if isinstance(obj, dict):
        return obj
    if text.startswith("{"):
        try:
            obj = _literal(text)
        except (ValueError, SyntaxError, TypeError, MemoryError, RecursionError):
            obj = None
        if isinstance(obj, dict):
            return obj
    return None


def parse_place(raw: Optional[str]) -> Optional[PlaceInfo]:
    """Parse a raw Place cell. Absent or blank input gives ``None``; otherwise never raises."""
    if raw is None or not raw.strip():
        return None
    try:
        text = strip_encoding_artifact(raw.strip())
        obj = _load_mapping(text)
        if obj is not None:
            return _from_mapping(obj)
        return _from_scan(text)
    except Exception as e:  # best effort: garbage in, empty PlaceInfo out
        return PlaceInfo(warnings=(f"place parse failed: {type(e).__name__}",))


def serialize_place(info: PlaceInfo) -> str:
    """JSON place object that parse_place maps back to the same fields."""
    obj = {}
    if info.place_type is not None:
        obj["place_type"] = info.place_type
    if info.city is not None or info.state is not None:
        if info.city is None:
            obj["full_name"] = info.state
        else:
            obj["full_name"] = f"{info.city}, {info.state or ''}".rstrip()
    if info.country_code is not None:
        obj["country_code"] = info.country_code
    if info.country is not None:
        obj["country"] = info.country
    if info.coordinate is not None:
        lat, lon = info.coordinate
        obj["bounding_box"] = {"type": "Polygon", "coordinates": [[[lon, lat]]]}
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def state_code(name: Optional[str]) -> Optional[str]:
    """Map a state code or full state name to its US postal code."""
    if not name:
        return None
    name = name.strip()
    if name.upper() in US_STATES and len(name) == 2:
        return name.upper()
    return STATE_BY_NAME.get(name.lower())


def resolve_state(tweet, use_user_location: bool = False) -> Optional[str]:
    """US state code for a tweet, from its place, optionally falling back to user_location."""
    info = parse_place(tweet.place_raw)
    if info is not None and info.country_code in (None, "US"):
        code = state_code(info.state)
        if code is None and info.place_type == "admin":
            code = state_code(info.city)
        if code:
            return code
    if use_user_location and tweet.user_location:
        city, state = _split_full_name(tweet.user_location)
        return state_code(state) or state_code(city)
    return None
