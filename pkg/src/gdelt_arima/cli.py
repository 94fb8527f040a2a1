"""Command-line front end.

Subcommands mirror the pipeline stages::

    gdelt-arima ingest   --input events.tsv --target CH --output freq.csv
    gdelt-arima series   --input freq.csv --top 15 --output series.csv
    gdelt-arima fit      --series series.csv --country US --order 1,1,0 --train-end 2012
    gdelt-arima auto     --series series.csv --train-end 2012
    gdelt-arima forecast --model model.json --series series.csv --horizon 1
    gdelt-arima validate --series series.csv --train-end 2012
    gdelt-arima classify --order 1,0,2

Usage problems exit with status 2, pipeline errors with status 1.
Results go to ``--output`` (standard output when omitted); diagnostics
go to standard error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
from typing import Optional, Sequence

from . import arima, connection, event_ingest, validation
from .arima import ArimaOrder
from .errors import GdeltArimaError

log = logging.getLogger("gdelt_arima")

VALUE_DIGITS = 4
PCT_DIGITS = 2


def _order(text: str) -> ArimaOrder:
    try:
        return ArimaOrder.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _non_negative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gdelt-arima",
        description="Connection-strength series from event records, ARIMA fits and holdout validation.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="events file -> yearly dyad frequency CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True, help="target country code, e.g. CH")
    p.add_argument("--output", default="-")
    p.add_argument("--schema", help="key=value schema config file")
    p.add_argument("--date-column", type=_non_negative)
    p.add_argument("--date-format", choices=[f.value for f in event_ingest.DateFormat])
    p.add_argument("--actor1-column", type=_non_negative)
    p.add_argument("--actor2-column", type=_non_negative)
    p.add_argument("--delimiter", type=event_ingest.parse_delimiter)
    p.add_argument("--code-length", type=_positive)
    p.add_argument("--min-year", type=int)
    p.add_argument("--max-year", type=int)
    p.add_argument("--skip-header", type=_non_negative, default=0, metavar="N")

    p = sub.add_parser("series", help="frequency CSV -> connection-strength series CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--top", type=_positive, default=15, metavar="K")
    p.add_argument("--target", default="", help="target code (only used for checks)")
    p.add_argument("--first-year", type=int)
    p.add_argument("--last-year", type=int)
    p.add_argument(
        "--gap-policy", choices=[g.value for g in connection.GapPolicy], default="strict"
    )

    def constant_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--constant", dest="include_constant", action="store_true", default=None)
        g.add_argument("--no-constant", dest="include_constant", action="store_false")

    def grid_flags(p):
        p.add_argument("--max-p", type=_non_negative, default=3)
        p.add_argument("--max-d", type=_non_negative, default=2)
        p.add_argument("--max-q", type=_non_negative, default=3)

    p = sub.add_parser("fit", help="fit one ARIMA order to one country's series")
    p.add_argument("--series", required=True)
    p.add_argument("--country", required=True)
    p.add_argument("--order", required=True, type=_order, metavar="P,D,Q")
    p.add_argument("--train-end", type=int, help="last year used for fitting")
    p.add_argument("--output", default="-")
    constant_flags(p)

    p = sub.add_parser("auto", help="AICc order selection for every series")
    p.add_argument("--series", required=True)
    p.add_argument("--country", action="append", help="restrict to these countries")
    p.add_argument("--train-end", type=int)
    p.add_argument("--output", default="-")
    grid_flags(p)
    constant_flags(p)

    p = sub.add_parser("forecast", help="model report + series -> forecast CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--series", required=True)
    p.add_argument("--horizon", type=_positive, default=1)
    p.add_argument("--output", default="-")

    p = sub.add_parser("validate", help="holdout validation report")
    p.add_argument("--series", required=True)
    p.add_argument("--train-end", required=True, type=int)
    p.add_argument("--horizon", type=_positive, default=1)
    p.add_argument("--order", type=_order, metavar="P,D,Q", help="use this order for every country")
    p.add_argument("--output", default="-")
    grid_flags(p)
    constant_flags(p)

    p = sub.add_parser("classify", help="model category of an ARIMA order")
    p.add_argument("--order", required=True, type=_order, metavar="P,D,Q")
    return parser


@contextlib.contextmanager
def _open_output(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _check_paths(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    inputs = [getattr(args, k) for k in ("input", "series", "model", "schema") if getattr(args, k, None)]
    for path in inputs:
        if not os.path.isfile(path):
            parser.error(f"no such file: {path}")
    output = getattr(args, "output", "-")
    if output != "-":
        real = {os.path.realpath(p) for p in inputs}
        if os.path.realpath(output) in real:
            parser.error("output path must differ from the input paths")
    if len({os.path.realpath(p) for p in inputs}) != len(inputs):
        parser.error("input paths must be distinct")


def _load_series(path: str) -> list[connection.ConnectionSeries]:
    with open(path, encoding="utf-8", newline="") as fh:
        return connection.read_series_csv(fh)


def _truncate(series: connection.ConnectionSeries, end_year: Optional[int]):
    if end_year is None:
        return list(series.values), series.end_year
    if not series.start_year <= end_year <= series.end_year:
        raise GdeltArimaError(
            f"{series.country}: train end {end_year} outside {series.start_year}-{series.end_year}"
        )
    return list(series.values[: end_year - series.start_year + 1]), end_year


def _report_entry(model: arima.ArimaModel, series, origin_year: int) -> dict:
    return arima.model_report(
        model, country=series.country, start_year=series.start_year, origin_year=origin_year
    )


def _write_models(entries: list[dict], path: str) -> None:
    with _open_output(path) as out:
        json.dump(entries, out, indent=2)
        out.write("\n")


def cmd_ingest(args) -> int:
    overrides = dict(
        date_column=args.date_column,
        date_format=args.date_format,
        actor1_country_column=args.actor1_column,
        actor2_country_column=args.actor2_column,
        delimiter=args.delimiter,
        country_code_length=args.code_length,
        min_year=args.min_year,
        max_year=args.max_year,
    )
    if args.schema:
        with open(args.schema, encoding="utf-8") as fh:
            schema = event_ingest.EventSchema.from_config(fh.read(), **overrides)
    else:
        schema = event_ingest.EventSchema(**{k: v for k, v in overrides.items() if v is not None})
    target = args.target.strip().upper()
    stats = event_ingest.IngestStats()
    with open(args.input, encoding="utf-8", newline="") as fh:
        for _ in range(args.skip_header):
            if not fh.readline():
                break
        table = connection.accumulate(event_ingest.iter_records(fh, schema, target, stats), target)
    with _open_output(args.output) as out:
        connection.write_frequency_csv(table, out)
    print(stats.summary(), file=sys.stderr)
    return 0


def cmd_series(args) -> int:
    with open(args.input, encoding="utf-8", newline="") as fh:
        table = connection.read_frequency_csv(fh, args.target.strip().upper())
    series = connection.build_top_series(
        table, args.top, args.first_year, args.last_year, connection.GapPolicy(args.gap_policy)
    )
    with _open_output(args.output) as out:
        connection.write_series_csv(series, out)
    return 0


def cmd_fit(args) -> int:
    country = args.country.strip().upper()
    by_country = {s.country: s for s in _load_series(args.series)}
    if country not in by_country:
        raise GdeltArimaError(f"no series for {country} in {args.series}")
    s = by_country[country]
    values, origin = _truncate(s, args.train_end)
    model = arima.fit(values, args.order, args.include_constant)
    _write_models([_report_entry(model, s, origin)], args.output)
    return 0


def cmd_auto(args) -> int:
    series = _load_series(args.series)
    if args.country:
        wanted = {c.strip().upper() for c in args.country}
        missing = wanted - {s.country for s in series}
        if missing:
            raise GdeltArimaError(f"no series for {', '.join(sorted(missing))}")
        series = [s for s in series if s.country in wanted]
    entries = []
    for s in series:
        values, origin = _truncate(s, args.train_end)
        chosen = arima.select_order(
            values, args.max_p, args.max_d, args.max_q, args.include_constant
        )
        log.info("%s: selected %s", s.country, chosen.order)
        entries.append(_report_entry(chosen.model, s, origin))
    _write_models(entries, args.output)
    return 0


def cmd_forecast(args) -> int:
    with open(args.model, encoding="utf-8") as fh:
        try:
            docs = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GdeltArimaError(f"model report is not valid JSON: {exc}") from None
    if isinstance(docs, dict):
        docs = [docs]
    by_country = {s.country: s for s in _load_series(args.series)}
    rows = []
    for doc in docs:
        model = arima.model_from_report(doc)
        country = str(doc.get("country", "")).upper()
        if country not in by_country:
            raise GdeltArimaError(f"no series for model country {country!r}")
        s = by_country[country]
        values, origin = _truncate(s, doc.get("origin_year"))
        fc = arima.forecast(model, values, args.horizon, origin_year=origin)
        for h, v in enumerate(fc.point_forecasts, start=1):
            rows.append((country, origin + h, v))
    with _open_output(args.output) as out:
        out.write("country,year,forecast\n")
        for country, year, v in rows:
            out.write(f"{country},{year},{v:.{VALUE_DIGITS}f}\n")
    return 0


def cmd_validate(args) -> int:
    series = _load_series(args.series)
    spec = validation.SplitSpec(args.train_end, args.horizon)
    orders = {s.country: args.order for s in series} if args.order else None
    report = validation.holdout_validate(
        series,
        spec,
        orders,
        max_p=args.max_p,
        max_d=args.max_d,
        max_q=args.max_q,
        include_constant=args.include_constant,
    )
    if report.rows and not any(r.ok for r in report.rows):
        raise GdeltArimaError(f"validation failed for every series; first: {report.rows[0].error}")
    with _open_output(args.output) as out:
        validation.write_report_csv(report, out, VALUE_DIGITS, PCT_DIGITS)
    return 0


def cmd_classify(args) -> int:
    print(arima.classify(args.order).value)
    note = arima.category_note(args.order)
    if note:
        print(f"note: {note}", file=sys.stderr)
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "series": cmd_series,
    "fit": cmd_fit,
    "auto": cmd_auto,
    "forecast": cmd_forecast,
    "validate": cmd_validate,
    "classify": cmd_classify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    _check_paths(parser, args)
    try:
        return COMMANDS[args.command](args)
    except (GdeltArimaError, ValueError, OSError) as exc:
        print(f"gdelt-arima {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
