import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gdelt_arima.arima import ArimaOrder
from gdelt_arima.connection import ConnectionSeries
from gdelt_arima.errors import MapeUndefinedError, SplitError
from gdelt_arima.synthetic import simulate_arima
from gdelt_arima.validation import (
    SplitSpec,
    ValidationReport,
    holdout_validate,
    mape,
    split,
    write_report_csv,
)

from conftest import US_FITTED_2013, US_OBSERVED_2013, US_SERIES


def synthetic_series(country, seed, **kw):
    raw = simulate_arima(35, seed=seed, sigma=0.004, **kw)
    return ConnectionSeries(country, 1979, tuple(0.1 + raw))


def test_split_us():
    s = ConnectionSeries("US", 1979, US_SERIES)
    train, test = split(s, SplitSpec(2012))
    assert train.size == 34 and test.size == 1
    assert list(np.concatenate([train, test])) == list(US_SERIES)


def test_split_errors():
    s = ConnectionSeries("US", 1979, US_SERIES)
    with pytest.raises(SplitError):
        split(s, SplitSpec(2013))
    with pytest.raises(SplitError):
        split(s, SplitSpec(1970))
    with pytest.raises(ValueError):
        SplitSpec(2012, test_horizon=0)


def test_split_multi_step():
    s = ConnectionSeries("XX", 2000, tuple(np.linspace(0.1, 0.5, 10)))
    train, test = split(s, SplitSpec(2007, test_horizon=2))
    assert (train.size, test.size) == (8, 2)


def test_mape_examples():
    assert mape([0.3, 0.4], [0.3, 0.4]) == 0.0
    assert mape([0.2], [0.19]) == pytest.approx(5.0, abs=1e-12)
    assert mape([0.1792], [0.1798]) == pytest.approx(0.335, abs=5e-4)


def test_mape_errors():
    with pytest.raises(MapeUndefinedError):
        mape([0.0, 0.1], [0.1, 0.1])
    with pytest.raises(ZeroDivisionError):
        mape([0.0], [0.1])
    with pytest.raises(ValueError):
        mape([0.1], [0.1, 0.2])


@settings(max_examples=100, deadline=None)
@given(
    pairs=st.lists(st.tuples(st.floats(0.01, 10), st.floats(-10, 10)), min_size=1, max_size=10),
    scale=st.floats(1e-3, 1e3),
)
def test_mape_scale_invariance(pairs, scale):
    y = np.array([p[0] for p in pairs])
    f = np.array([p[1] for p in pairs])
    base = mape(y, f)
    assert base >= 0
    assert mape(y * scale, f * scale) == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_us_row():
    report = holdout_validate(
        [ConnectionSeries("US", 1979, US_SERIES)], SplitSpec(2012), {"US": ArimaOrder(1, 1, 0)}
    )
    (row,) = report.rows
    assert row.ok and row.order == ArimaOrder(1, 1, 0)
    assert row.fitted[0] == pytest.approx(US_FITTED_2013, abs=0.005)
    # The printed series rounds 2013 to 0.179; the forecast table lists 0.1792.
    assert row.observed == (US_SERIES[-1],)
    assert abs(US_SERIES[-1] - US_OBSERVED_2013) < 5e-4
    assert report.average_mape == row.abs_pct_error < 1.5


def test_identical_series_give_identical_rows():
    a = synthetic_series("AA", 1, ar=[0.5])
    b = ConnectionSeries("BB", 1979, a.values)
    report = holdout_validate([a, b], SplitSpec(2012))
    r1, r2 = report.rows
    assert (r1.order, r1.fitted, r1.abs_pct_error) == (r2.order, r2.fitted, r2.abs_pct_error)
    assert report.average_mape == r1.abs_pct_error


def test_average_matches_independent_recomputation():
    series = [
        synthetic_series("S1", 10, ar=[0.6]),
        synthetic_series("S2", 11, d=1, constant=0.001),
        synthetic_series("S3", 12, ma=[0.4]),
        synthetic_series("S4", 13, ar=[0.3], d=1),
        synthetic_series("S5", 14),
    ]
    report = holdout_validate(series, SplitSpec(2011, test_horizon=2))
    assert len(report.rows) == 5 and not report.failures
    by_country = {s.country: s for s in series}
    per_row = []
    for row in report.rows:
        observed = by_country[row.country].values[33:35]
        assert row.observed == observed
        per_row.append(
            100 * sum(abs(y - f) / abs(y) for y, f in zip(observed, row.fitted)) / len(observed)
        )
        assert row.abs_pct_error == pytest.approx(per_row[-1], rel=1e-12)
    assert report.average_mape == pytest.approx(sum(per_row) / 5, rel=1e-12)
    assert report.average_mape == sum(r.abs_pct_error for r in report.rows) / 5


def test_rows_sorted_by_training_total():
    lo = ConnectionSeries("LO", 1979, tuple([0.05 + 0.001 * (i % 3) for i in range(35)]))
    hi = ConnectionSeries("HI", 1979, tuple([0.3 + 0.002 * (i % 4) for i in range(35)]))
    report = holdout_validate([lo, hi], SplitSpec(2012))
    assert [r.country for r in report.rows] == ["HI", "LO"]


def test_failures_are_recorded_per_row():
    good = ConnectionSeries("US", 1979, US_SERIES)
    short = ConnectionSeries("SH", 2005, tuple([0.1] * 9))
    zero = ConnectionSeries("ZE", 1979, tuple([0.1] * 34 + [0.0]))
    report = holdout_validate([good, short, zero], SplitSpec(2012), {"US": ArimaOrder(1, 1, 0)})
    assert [r.country for r in report.failures] == ["ZE", "SH"]
    assert all(r.error for r in report.failures)
    ok = [r for r in report.rows if r.ok]
    assert report.average_mape == ok[0].abs_pct_error


def test_average_of_empty_report_is_nan():
    assert math.isnan(ValidationReport([]).average_mape)


def test_report_csv():
    good = ConnectionSeries("US", 1979, US_SERIES)
    bad = ConnectionSeries("SH", 2005, tuple([0.1] * 9))
    report = holdout_validate([good, bad], SplitSpec(2012), {"US": ArimaOrder(1, 1, 0)})
    buf = io.StringIO()
    write_report_csv(report, buf, value_digits=4, pct_digits=2)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["country", "order", "fitted", "observed", "abs_pct_error"]
    assert rows[1][:2] == ["US", "ARIMA(1,1,0)"]
    assert rows[1][2] == f"{report.rows[0].fitted[0]:.4f}"
    assert rows[2][0] == "SH" and rows[2][2].startswith("error:")
    assert rows[-1] == ["AVERAGE_MAPE", f"{report.average_mape:.2f}"]


def test_report_csv_full_precision_joins_steps():
    s = synthetic_series("S1", 10, ar=[0.6])
    report = holdout_validate([s], SplitSpec(2010, test_horizon=3))
    buf = io.StringIO()
    write_report_csv(report, buf)
    row = list(csv.reader(io.StringIO(buf.getvalue())))[1]
    assert [float(v) for v in row[2].split(";")] == list(report.rows[0].fitted)
    assert float(row[4]) == report.rows[0].abs_pct_error
