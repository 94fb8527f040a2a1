"""Streaming parser for delimiter-separated event rows.

Only three columns matter: the event date and the two actor country
codes. Everything else on the row (event codes, action geography, tone,
source URLs) is read past without interpretation.
"""

from __future__ import annotations

import datetime as _dt
import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, TextIO, Union

from .errors import IngestError

log = logging.getLogger(__name__)

FIRST_YEAR = 1979


class DateFormat(str, enum.Enum):
    YYYYMMDD = "YYYYMMDD"
    YYYY = "YYYY"


class SkipReason(str, enum.Enum):
    MISSING_COLUMN = "missing-column"
    BAD_DATE = "bad-date"
    EMPTY_ACTOR = "empty-actor"
    MALFORMED_CODE = "malformed-code"


@dataclass(frozen=True)
class EventSchema:
    date_column: int = 0
    date_format: DateFormat = DateFormat.YYYYMMDD
    actor1_country_column: int = 1
    actor2_country_column: int = 2
    delimiter: str = "\t"
    country_code_length: int = 2
    min_year: int = FIRST_YEAR
    max_year: int = field(default_factory=lambda: _dt.date.today().year)

    def __post_init__(self):
        object.__setattr__(self, "date_format", DateFormat(self.date_format))
        cols = (self.date_column, self.actor1_country_column, self.actor2_country_column)
        if any(c < 0 for c in cols):
            raise ValueError("column indices must be non-negative")
        if len(set(cols)) != 3:
            raise ValueError("date and actor columns must be distinct")
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")
        if self.country_code_length < 1:
            raise ValueError("country_code_length must be positive")
        if self.min_year > self.max_year:
            raise ValueError("min_year exceeds max_year")

    @property
    def width(self) -> int:
        return max(self.date_column, self.actor1_country_column, self.actor2_country_column) + 1

    def is_country_code(self, code: str) -> bool:
        return len(code) == self.country_code_length and code.isascii() and code.isalpha()

    @classmethod
    def from_config(cls, text: str, **overrides) -> "EventSchema":
        """Build a schema from ``key=value`` lines; lines starting with ``#`` are comments.

        Recognised keys: date_column, date_format, actor1_country_column,
        actor2_country_column, delimiter, country_code_length, min_year,
        max_year. ``delimiter`` accepts ``\\t``, ``tab`` or ``comma`` as
        spellings.
        """
        kwargs = {}
        ints = {
            "date_column",
            "actor1_country_column",
            "actor2_country_column",
            "country_code_length",
            "min_year",
            "max_year",
        }
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key in ints:
                try:
                    kwargs[key] = int(value)
                except ValueError:
                    raise ValueError(f"config line {lineno}: {key} must be an integer") from None
            elif key == "date_format":
                kwargs[key] = DateFormat(value.upper())
            elif key == "delimiter":
                kwargs[key] = parse_delimiter(value)
            else:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


def parse_delimiter(value: str) -> str:
    named = {"\\t": "\t", "tab": "\t", "comma": ",", "space": " ", "pipe": "|"}
    if value.lower() in named:
        return named[value.lower()]
    if len(value) == 1:
        return value
    raise ValueError(f"delimiter must be one character, got {value!r}")


@dataclass(frozen=True)
class EventRecord:
    year: int
    actor1: str
    actor2: str

    def partner_of(self, target: str) -> str:
        return self.actor2 if self.actor1 == target else self.actor1


@dataclass(frozen=True)
class Skip:
    reason: SkipReason
    detail: str = ""


@dataclass
class IngestStats:
    rows_read: int = 0
    rows_parsed: int = 0
    rows_skipped_malformed: int = 0
    rows_filtered_no_target: int = 0
    skip_reasons: dict = field(default_factory=dict)

    @property
    def rows_emitted(self) -> int:
        return self.rows_parsed - self.rows_filtered_no_target

    def summary(self) -> str:
        parts = [
            f"rows_read={self.rows_read}",
            f"rows_parsed={self.rows_parsed}",
            f"rows_skipped_malformed={self.rows_skipped_malformed}",
            f"rows_filtered_no_target={self.rows_filtered_no_target}",
            f"rows_emitted={self.rows_emitted}",
        ]
        parts += [f"skip[{k}]={v}" for k, v in sorted(self.skip_reasons.items())]
        return " ".join(parts)


def _parse_year(text: str, schema: EventSchema) -> Optional[int]:
    if schema.date_format is DateFormat.YYYYMMDD:
        if len(text) != 8 or not text.isdigit():
            return None
        try:
            year = _dt.date(int(text[:4]), int(text[4:6]), int(text[6:])).year
        except ValueError:
            return None
    else:
        if len(text) != 4 or not text.isdigit():
            return None
        year = int(text)
    if not schema.min_year <= year <= schema.max_year:
        return None
    return year


def parse_record(line: str, schema: EventSchema) -> Union[EventRecord, Skip]:
    """Parse one row, returning a ``Skip`` (never raising) for bad input."""
    cells = line.rstrip("\r\n").split(schema.delimiter)
    if len(cells) < schema.width:
        return Skip(SkipReason.MISSING_COLUMN, f"{len(cells)} columns")
    date = cells[schema.date_column].strip()
    year = _parse_year(date, schema)
    if year is None:
        return Skip(SkipReason.BAD_DATE, date)
    a1 = cells[schema.actor1_country_column].strip().upper()
    a2 = cells[schema.actor2_country_column].strip().upper()
    if not a1 or not a2:
        return Skip(SkipReason.EMPTY_ACTOR)
    for code in (a1, a2):
        if not schema.is_country_code(code):
            return Skip(SkipReason.MALFORMED_CODE, code)
    return EventRecord(year, a1, a2)


def iter_records(
    source: Iterable[str], schema: EventSchema, target: str, stats: IngestStats
) -> Iterator[EventRecord]:
    """Yield records pairing ``target`` with a distinct partner, updating ``stats``.

    Lazy: memory use does not grow with the input.
    """
    target = target.strip().upper()
    if not schema.is_country_code(target):
        raise ValueError(f"target {target!r} is not a well-formed country code")
    return _scan(iter(source), schema, target, stats)


def _scan(it, schema: EventSchema, target: str, stats: IngestStats) -> Iterator[EventRecord]:
    while True:
        try:
            line = next(it)
        except StopIteration:
            return
        except (OSError, UnicodeDecodeError) as exc:
            raise IngestError(
                f"reading events failed after {stats.rows_read} rows: {exc}", stats
            ) from exc
        stats.rows_read += 1
        rec = parse_record(line, schema)
        if isinstance(rec, Skip):
            stats.rows_skipped_malformed += 1
            key = rec.reason.value
            stats.skip_reasons[key] = stats.skip_reasons.get(key, 0) + 1
            continue
        stats.rows_parsed += 1
        if (rec.actor1 == target) == (rec.actor2 == target):
            # Neither actor is the target, or both are.
            stats.rows_filtered_no_target += 1
            continue
        yield rec


def ingest(
    source: Union[Iterable[str], TextIO], schema: EventSchema, target: str
) -> tuple[list[EventRecord], IngestStats]:
    """Collect every target dyad record from ``source`` along with the counts."""
    stats = IngestStats()
    records = list(iter_records(source, schema, target, stats))
    log.debug("ingest: %s", stats.summary())
    return records, stats
