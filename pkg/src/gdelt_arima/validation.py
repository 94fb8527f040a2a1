"""Holdout forecast validation scored by mean absolute percentage error."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, TextIO

import numpy as np

from . import arima
from .arima import ArimaOrder
from .connection import ConnectionSeries
from .errors import GdeltArimaError, MapeUndefinedError, SplitError

log = logging.getLogger(__name__)

MIN_TRAIN_POINTS = 10


@dataclass(frozen=True)
class SplitSpec:
    train_end_year: int
    test_horizon: int = 1

    def __post_init__(self):
        if self.test_horizon < 1:
            raise ValueError("test_horizon must be at least 1")


def split(series: ConnectionSeries, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Values through ``train_end_year`` and the ``test_horizon`` values after it."""
    values = np.asarray(series.values, dtype=float)
    n_train = spec.train_end_year - series.start_year + 1
    if n_train < 1:
        raise SplitError(
            f"{series.country}: train end {spec.train_end_year} precedes the series start "
            f"{series.start_year}"
        )
    if n_train + spec.test_horizon > values.size:
        raise SplitError(
            f"{series.country}: series ends in {series.end_year}, cannot hold out "
            f"{spec.test_horizon} year(s) after {spec.train_end_year}"
        )
    return values[:n_train], values[n_train : n_train + spec.test_horizon]


def mape(actual, forecast) -> float:
    """Mean absolute percentage error, in percent."""
    y = np.asarray(actual, dtype=float).ravel()
    f = np.asarray(forecast, dtype=float).ravel()
    if y.size != f.size:
        raise ValueError(f"length mismatch: {y.size} actual vs {f.size} forecast values")
    if y.size == 0:
        raise ValueError("mape needs at least one value")
    if np.any(y == 0):
        raise MapeUndefinedError("actual value of zero makes the percentage error undefined")
    return float(np.mean(np.abs((y - f) / y)) * 100.0)


@dataclass
class ValidationRow:
    country: str
    order: Optional[ArimaOrder]
    fitted: tuple[float, ...]
    observed: tuple[float, ...]
    abs_pct_error: float
    train_total: float = 0.0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ValidationReport:
    rows: list[ValidationRow] = field(default_factory=list)

    @property
    def average_mape(self) -> float:
        """Arithmetic mean over successfully scored rows (NaN if there are none)."""
        errors = [r.abs_pct_error for r in self.rows if r.ok]
        if not errors:
            return math.nan
        return sum(errors) / len(errors)

    @property
    def failures(self) -> list[ValidationRow]:
        return [r for r in self.rows if not r.ok]


def _validate_one(
    series: ConnectionSeries,
    spec: SplitSpec,
    order: Optional[ArimaOrder],
    grid: tuple[int, int, int],
    include_constant: Optional[bool],
) -> ValidationRow:
    train_total = 0.0
    try:
        train, test = split(series, spec)
        train_total = float(np.sum(train))
        if train.size < MIN_TRAIN_POINTS:
            raise SplitError(
                f"{series.country}: only {train.size} training points, need {MIN_TRAIN_POINTS}"
            )
        if order is None:
            model = arima.select_order(train, *grid, include_constant=include_constant).model
        else:
            model = arima.fit(train, order, include_constant)
        fc = arima.forecast(model, train, spec.test_horizon, origin_year=spec.train_end_year)
        return ValidationRow(
            country=series.country,
            order=model.order,
            fitted=tuple(float(v) for v in fc.point_forecasts),
            observed=tuple(float(v) for v in test),
            abs_pct_error=mape(test, fc.point_forecasts),
            train_total=train_total,
        )
    except (GdeltArimaError, ValueError) as exc:
        log.warning("validation failed for %s: %s", series.country, exc)
        return ValidationRow(
            country=series.country,
            order=order,
            fitted=(),
            observed=(),
            abs_pct_error=math.nan,
            train_total=train_total,
            error=str(exc),
        )


def holdout_validate(
    series_set: Iterable[ConnectionSeries],
    spec: SplitSpec,
    orders: Optional[Mapping[str, ArimaOrder]] = None,
    *,
    max_p: int = 3,
    max_d: int = 2,
    max_q: int = 3,
    include_constant: Optional[bool] = None,
) -> ValidationReport:
    """Fit each series on its training span, forecast the holdout, score it.

    Countries absent from ``orders`` get an AICc-selected order. A failure
    for one country is recorded on its row and does not stop the others.
    Rows are ordered by descending training-period total strength.
    """
    orders = orders or {}
    rows = [
        _validate_one(s, spec, orders.get(s.country), (max_p, max_d, max_q), include_constant)
        for s in series_set
    ]
    rows.sort(key=lambda r: (-r.train_total, r.country))
    return ValidationReport(rows)


def _format_values(values: Sequence[float], digits: Optional[int]) -> str:
    if digits is None:
        return ";".join(repr(v) for v in values)
    return ";".join(f"{v:.{digits}f}" for v in values)


def write_report_csv(
    report: ValidationReport,
    out: TextIO,
    value_digits: Optional[int] = None,
    pct_digits: Optional[int] = None,
) -> None:
    """``country,order,fitted,observed,abs_pct_error`` rows then ``AVERAGE_MAPE,<v>``.

    Multi-step horizons join the per-step values with ``;``. Failed rows
    carry the error text in the ``fitted`` column. Pass digit counts to
    round for display; by default values are written at full precision.
    """

    def pct(v: float) -> str:
        if math.isnan(v):
            return ""
        return repr(v) if pct_digits is None else f"{v:.{pct_digits}f}"

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["country", "order", "fitted", "observed", "abs_pct_error"])
    for r in report.rows:
        order = str(r.order) if r.order is not None else ""
        if r.ok:
            writer.writerow(
                [
                    r.country,
                    order,
                    _format_values(r.fitted, value_digits),
                    _format_values(r.observed, value_digits),
                    pct(r.abs_pct_error),
                ]
            )
        else:
            writer.writerow([r.country, order, f"error: {r.error}", "", ""])
    writer.writerow(["AVERAGE_MAPE", pct(report.average_mape)])
