"""Yearly dyad counts and one-way connection strength.

For a target country c, a partner i and a year y, the connection strength
is the share of c's dyadic records that year whose partner is i:

    strength(y, i) = count(y, i) / sum_j count(y, j)      (j != c)

It is deliberately not normalised by the partner's own activity.
"""

from __future__ import annotations

import csv
import enum
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO

from .errors import DyadError, GdeltArimaError, UndefinedYearError
from .event_ingest import EventRecord

STRENGTH_TOLERANCE = 1e-12


class GapPolicy(str, enum.Enum):
    STRICT = "strict"
    FILL_ZERO = "fill-zero"


@dataclass
class DyadFrequencyTable:
    target: str
    counts: dict[int, dict[str, int]] = field(default_factory=dict)
    year_totals: dict[int, int] = field(default_factory=dict)

    @property
    def years(self) -> list[int]:
        return sorted(self.counts)

    @property
    def partners(self) -> list[str]:
        return sorted({p for row in self.counts.values() for p in row})

    def partner_totals(self) -> Counter:
        totals: Counter = Counter()
        for row in self.counts.values():
            totals.update(row)
        return totals

    def add(self, year: int, partner: str, count: int = 1) -> None:
        if partner == self.target:
            raise DyadError(f"partner equals the target {self.target!r}")
        if count < 0:
            raise DyadError("counts must be non-negative")
        row = self.counts.setdefault(year, {})
        row[partner] = row.get(partner, 0) + count
        self.year_totals[year] = self.year_totals.get(year, 0) + count

    def is_empty(self) -> bool:
        return not any(self.year_totals.values())


def accumulate(records: Iterable[EventRecord], target: str) -> DyadFrequencyTable:
    """Tally records per (year, partner), ignoring which actor slot held the target."""
    table = DyadFrequencyTable(target)
    tally: dict[int, Counter] = defaultdict(Counter)
    for rec in records:
        if rec.actor1 == rec.actor2 or target not in (rec.actor1, rec.actor2):
            raise DyadError(
                f"record {rec.actor1}-{rec.actor2} ({rec.year}) does not pair {target} "
                "with a distinct partner"
            )
        tally[rec.year][rec.partner_of(target)] += 1
    for year in sorted(tally):
        for partner in sorted(tally[year]):
            table.add(year, partner, tally[year][partner])
    return table


def connection_strength(table: DyadFrequencyTable, year: int, partner: str) -> float:
    total = table.year_totals.get(year, 0)
    if total <= 0:
        raise UndefinedYearError(f"no {table.target} dyad records in {year}")
    return table.counts[year].get(partner, 0) / total


def top_k(table: DyadFrequencyTable, k: int) -> list[str]:
    """Partners ranked by co-occurrence summed over every year.

    Ties are broken alphabetically by country code.
    """
    if k < 1:
        raise ValueError("k must be positive")
    totals = table.partner_totals()
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    return [country for country, _ in ranked[:k]]


@dataclass(frozen=True)
class ConnectionSeries:
    country: str
    start_year: int
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for v in self.values:
            if not -STRENGTH_TOLERANCE <= v <= 1 + STRENGTH_TOLERANCE:
                raise ValueError(f"strength {v} outside [0, 1]")

    @property
    def end_year(self) -> int:
        return self.start_year + len(self.values) - 1

    @property
    def years(self) -> list[int]:
        return list(range(self.start_year, self.start_year + len(self.values)))

    def __len__(self):
        return len(self.values)


def build_series(
    table: DyadFrequencyTable,
    partner: str,
    first_year: int,
    last_year: int,
    gap_policy: GapPolicy = GapPolicy.STRICT,
) -> ConnectionSeries:
    if first_year > last_year:
        raise ValueError("first_year must not exceed last_year")
    policy = GapPolicy(gap_policy)
    values = []
    for year in range(first_year, last_year + 1):
        try:
            values.append(connection_strength(table, year, partner))
        except UndefinedYearError:
            if policy is GapPolicy.STRICT:
                raise
            values.append(0.0)
    return ConnectionSeries(partner, first_year, tuple(values))


def build_top_series(
    table: DyadFrequencyTable,
    k: int = 15,
    first_year: Optional[int] = None,
    last_year: Optional[int] = None,
    gap_policy: GapPolicy = GapPolicy.STRICT,
) -> list[ConnectionSeries]:
    """Series for the ``k`` strongest partners over the table's year span."""
    if table.is_empty():
        raise GdeltArimaError("frequency table is empty")
    years = [y for y, t in table.year_totals.items() if t > 0]
    lo = min(years) if first_year is None else first_year
    hi = max(years) if last_year is None else last_year
    return [build_series(table, c, lo, hi, gap_policy) for c in top_k(table, k)]


# ---------------------------------------------------------------------------
# CSV exchange formats


def write_frequency_csv(table: DyadFrequencyTable, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["year", "partner", "count"])
    for year in table.years:
        row = table.counts[year]
        for partner in sorted(row):
            writer.writerow([year, partner, row[partner]])


def read_frequency_csv(src: TextIO, target: str = "") -> DyadFrequencyTable:
    reader = csv.reader(src)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["year", "partner", "count"]:
        raise GdeltArimaError("frequency CSV must start with header year,partner,count")
    table = DyadFrequencyTable(target)
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            year, partner, count = int(row[0]), row[1].strip().upper(), int(row[2])
        except (IndexError, ValueError):
            raise GdeltArimaError(f"frequency CSV line {lineno}: malformed row {row!r}") from None
        table.add(year, partner, count)
    return table


def format_strength(value: float) -> str:
    return f"{value:.6g}"


def write_series_csv(series: Iterable[ConnectionSeries], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["country", "year", "strength"])
    for s in series:
        for year, value in zip(s.years, s.values):
            writer.writerow([s.country, year, format_strength(value)])


def read_series_csv(src: TextIO) -> list[ConnectionSeries]:
    """Read series back, preserving first-appearance order of countries."""
    reader = csv.reader(src)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["country", "year", "strength"]:
        raise GdeltArimaError("series CSV must start with header country,year,strength")
    points: dict[str, dict[int, float]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            country, year, value = row[0].strip().upper(), int(row[1]), float(row[2])
        except (IndexError, ValueError):
            raise GdeltArimaError(f"series CSV line {lineno}: malformed row {row!r}") from None
        by_year = points.setdefault(country, {})
        if year in by_year:
            raise GdeltArimaError(f"series CSV line {lineno}: duplicate {country} {year}")
        by_year[year] = value
    out = []
    for country, by_year in points.items():
        years = sorted(by_year)
        if years != list(range(years[0], years[-1] + 1)):
            raise GdeltArimaError(f"series for {country} has missing years")
        out.append(ConnectionSeries(country, years[0], tuple(by_year[y] for y in years)))
    return out
