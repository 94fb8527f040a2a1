"""Inter-country connection-strength time series from event records.

Pipeline: :mod:`.ingest` parses event rows, :mod:`.connection` turns them
into yearly strength series, :mod:`.arima` fits and forecasts, and
:mod:`.validation` scores holdout forecasts.
"""

from .arima import (
    ArimaModel,
    ArimaOrder,
    ForecastResult,
    ModelCategory,
    classify,
    css,
    difference,
    fit,
    forecast,
    integrate,
    select_order,
)
from .connection import (
    ConnectionSeries,
    DyadFrequencyTable,
    GapPolicy,
    accumulate,
    build_series,
    connection_strength,
    top_k,
)
from .event_ingest import EventRecord, EventSchema, IngestStats, ingest, parse_record
from .numopt import OptimizerOptions, OptimResult, minimize
from .validation import SplitSpec, ValidationReport, holdout_validate, mape, split

__version__ = "0.1.0"
