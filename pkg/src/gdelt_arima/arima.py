"""ARIMA(p, d, q) estimation by conditional sum of squares.

Models are fitted on the d-times differenced series ``w``. The residual
recursion is

    e_t = (w_t - c) - sum_i phi_i (w_{t-i} - c) - sum_j theta_j e_{t-j}

with pre-sample ``w`` equal to the constant ``c`` and pre-sample ``e``
equal to zero. Parameters violating stationarity (AR) or invertibility
(MA) get an infinite objective, which keeps the simplex search
unconstrained.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
import operator
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import FitError, InsufficientDataError, SelectionError
from .numopt import OptimizerOptions, minimize

log = logging.getLogger(__name__)

# Tolerances for the CSS search. The objective is normalised to ~1 before
# minimising, so these act as relative tolerances.
FIT_OPTIONS = OptimizerOptions(
    x_tolerance=1e-10, f_tolerance=1e-15, max_iterations=5000, initial_step=0.1
)
MAX_RESTARTS = 4
# Ranking pass used by select_order; AICc gaps between candidate orders
# dwarf the error these tolerances leave behind.
COARSE_OPTIONS = OptimizerOptions(
    x_tolerance=1e-3, f_tolerance=1e-7, max_iterations=5000, initial_step=0.1
)
REFINE_MARGIN = 3.0


@dataclass(frozen=True, order=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        for name in ("p", "d", "q"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @classmethod
    def parse(cls, text: str) -> "ArimaOrder":
        """Parse ``"p,d,q"`` (surrounding ``ARIMA(...)`` is tolerated)."""
        s = text.strip()
        if s.upper().startswith("ARIMA"):
            s = s[5:]
        s = s.strip().strip("()")
        parts = [x.strip() for x in s.split(",")]
        if len(parts) != 3 or not all(x.isdigit() for x in parts):
            raise ValueError(f"malformed order {text!r}; expected p,d,q")
        return cls(*(int(x) for x in parts))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.p, self.d, self.q)

    def __str__(self):
        return f"ARIMA({self.p},{self.d},{self.q})"


class ModelCategory(str, enum.Enum):
    AUTOREGRESSIVE = "Autoregressive"
    AUTOREGRESSIVE_INTEGRATED = "AutoregressiveIntegrated"
    INTEGRATED_MOVING_AVERAGE = "IntegratedMovingAverage"
    AUTOREGRESSIVE_MOVING_AVERAGE = "AutoregressiveMovingAverage"
    GENERAL_INTEGRATED = "GeneralIntegrated"
    WHITE_NOISE = "WhiteNoise"

    def __str__(self):
        return self.value


MIXED_MODEL_NOTE = "mixed model (p>0, d>0, q>0) grouped with AutoregressiveIntegrated"


def classify(order: ArimaOrder) -> ModelCategory:
    p, d, q = order.p > 0, order.d > 0, order.q > 0
    if p and d:
        # Covers the mixed p,d,q>0 case too; see MIXED_MODEL_NOTE.
        return ModelCategory.AUTOREGRESSIVE_INTEGRATED
    if p and q:
        return ModelCategory.AUTOREGRESSIVE_MOVING_AVERAGE
    if p:
        return ModelCategory.AUTOREGRESSIVE
    if d and q:
        return ModelCategory.INTEGRATED_MOVING_AVERAGE
    if d:
        return ModelCategory.GENERAL_INTEGRATED
    if q:
        # (0,0,q): pure moving average. Grouped with the integrated MA
        # models as the nearest labelled family.
        return ModelCategory.INTEGRATED_MOVING_AVERAGE
    return ModelCategory.WHITE_NOISE


def category_note(order: ArimaOrder) -> Optional[str]:
    if order.p > 0 and order.d > 0 and order.q > 0:
        return MIXED_MODEL_NOTE
    if order.p == 0 and order.d == 0 and order.q > 0:
        return "pure moving-average model grouped with IntegratedMovingAverage"
    return None


def default_include_constant(d: int) -> bool:
    return d <= 1


# ---------------------------------------------------------------------------
# differencing


def difference(series, d: int) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    if d < 0:
        raise ValueError("d must be non-negative")
    if x.size <= d:
        raise ValueError(f"series of length {x.size} cannot be differenced {d} times")
    for _ in range(d):
        x = np.diff(x)
    return x


def difference_heads(series, d: int) -> np.ndarray:
    """Leading value of each intermediate difference: ``[x[0], dx[0], ...]``.

    These are exactly the values ``integrate`` needs to undo ``difference``.
    """
    x = np.asarray(series, dtype=float)
    if x.size <= d:
        raise ValueError(f"series of length {x.size} cannot be differenced {d} times")
    heads = []
    for _ in range(d):
        heads.append(x[0])
        x = np.diff(x)
    return np.array(heads, dtype=float)


def integrate(diffs, heads) -> np.ndarray:
    """Inverse of ``difference``: ``heads[k]`` is the first value of the k-th difference."""
    w = np.asarray(diffs, dtype=float)
    h = np.asarray(heads, dtype=float).ravel()
    for k in range(h.size - 1, -1, -1):
        w = np.concatenate(([h[k]], h[k] + np.cumsum(w)))
    return w


def _integrate_forward(future_diffs: np.ndarray, series: np.ndarray, d: int) -> np.ndarray:
    """Carry differenced-scale forecasts back to the original scale."""
    levels = [np.asarray(series, dtype=float)]
    for _ in range(d):
        levels.append(np.diff(levels[-1]))
    out = future_diffs
    for k in range(d - 1, -1, -1):
        out = levels[k][-1] + np.cumsum(out)
    return out


# ---------------------------------------------------------------------------
# conditional sum of squares


def _reflection_test(phi: list[float]) -> bool:
    """True when 1 - phi_1 z - ... - phi_m z^m has every root outside |z| = 1.

    Step-down (Schur-Cohn) recursion: the polynomial qualifies iff every
    reflection coefficient produced along the way has modulus below one.
    """
    if len(phi) == 1:
        return -1.0 < phi[0] < 1.0
    if len(phi) == 2:
        a1, a2 = phi
        return a1 + a2 < 1.0 and a2 - a1 < 1.0 and -1.0 < a2 < 1.0
    a = phi
    for m in range(len(a), 0, -1):
        k = a[m - 1]
        if not -1.0 < k < 1.0:
            return False
        if m == 1:
            break
        denom = 1.0 - k * k
        a = [(a[i] + k * a[m - 2 - i]) / denom for i in range(m - 1)]
    return True


def is_stationary(ar) -> bool:
    return _reflection_test([float(v) for v in ar])


def is_invertible(ma) -> bool:
    return _reflection_test([-float(v) for v in ma])


def _split_params(order: ArimaOrder, params) -> tuple[np.ndarray, np.ndarray, float]:
    params = np.asarray(params, dtype=float).ravel()
    if params.size != order.p + order.q + 1:
        raise ValueError(
            f"expected {order.p + order.q + 1} parameters for {order}, got {params.size}"
        )
    return params[: order.p], params[order.p : order.p + order.q], float(params[-1])


def css_residuals(w, order: ArimaOrder, params) -> np.ndarray:
    """One-step residuals of the ARMA recursion on an already differenced series."""
    ar, ma, const = _split_params(order, params)
    return _residuals(np.asarray(w, dtype=float), ar, ma, const)


# Below this length plain-Python recursion beats numpy/lfilter call overhead.
_SHORT_SERIES = 120


def _residuals(w: np.ndarray, ar: np.ndarray, ma: np.ndarray, const: float) -> np.ndarray:
    if w.size <= _SHORT_SERIES:
        return np.array(_residuals_short(w.tolist(), ar.tolist(), ma.tolist(), const))
    z = w - const
    u = z
    if ar.size:
        # Pre-sample deviations are zero, so lag i only touches t >= i.
        u = z.copy()
        for i, phi in enumerate(ar, start=1):
            u[i:] -= phi * z[:-i]
    if ma.size:
        from scipy.signal import lfilter  # deferred: slow import, long series only

        u = lfilter([1.0], np.concatenate(([1.0], ma)), u)
    return u


def _residuals_short(
    w: list[float], ar: list[float], ma: list[float], const: float
) -> list[float]:
    z = [v - const for v in w]
    u = z
    for i, phi in enumerate(ar, start=1):
        u = u[:i] + [a - phi * b for a, b in zip(u[i:], z)]
    return _ma_filter(u, ma) if ma else u


def _ma_filter(u: list[float], theta: list[float]) -> list[float]:
    """Solve e_t = u_t - sum_j theta_j e_{t-j} with zero pre-sample e."""
    out = []
    if len(theta) == 1:
        (t1,) = theta
        e1 = 0.0
        for v in u:
            e1 = v - t1 * e1
            out.append(e1)
    elif len(theta) == 2:
        t1, t2 = theta
        e1 = e2 = 0.0
        for v in u:
            e1, e2 = v - t1 * e1 - t2 * e2, e1
            out.append(e1)
    elif len(theta) == 3:
        t1, t2, t3 = theta
        e1 = e2 = e3 = 0.0
        for v in u:
            e1, e2, e3 = v - t1 * e1 - t2 * e2 - t3 * e3, e1, e2
            out.append(e1)
    else:
        q = len(theta)
        e = [0.0] * q
        for v in u:
            for j in range(q):
                v -= theta[j] * e[-1 - j]
            e.append(v)
        out = e[q:]
    return out


def _sum_sq_short(w: list[float], ar: list[float], ma: list[float], const: float) -> float:
    """Residual sum of squares for p, q <= 3 in a single unrolled pass."""
    a1, a2, a3 = (ar + [0.0, 0.0, 0.0])[:3]
    b1, b2, b3 = (ma + [0.0, 0.0, 0.0])[:3]
    z1 = z2 = z3 = e1 = e2 = e3 = 0.0
    acc = 0.0
    for v in w:
        zt = v - const
        e = zt - a1 * z1 - a2 * z2 - a3 * z3 - b1 * e1 - b2 * e2 - b3 * e3
        z3, z2, z1 = z2, z1, zt
        e3, e2, e1 = e2, e1, e
        acc += e * e
    return acc


def _css_value(w, ar: list[float], ma: list[float], const: float) -> float:
    if not (_reflection_test(ar) and _reflection_test([-v for v in ma])):
        return math.inf
    if isinstance(w, list):
        if len(ar) <= 3 and len(ma) <= 3:
            return _sum_sq_short(w, ar, ma, const)
        e = _residuals_short(w, ar, ma, const)
        return sum(map(operator.mul, e, e))
    e = _residuals(w, np.asarray(ar, dtype=float), np.asarray(ma, dtype=float), const)
    return float(np.dot(e, e))


def css(w, order: ArimaOrder, params) -> float:
    """Conditional sum of squares; +inf outside the stationary/invertible region."""
    ar, ma, const = _split_params(order, params)
    w = np.asarray(w, dtype=float)
    if w.size <= _SHORT_SERIES:
        return _css_value(w.tolist(), ar.tolist(), ma.tolist(), const)
    return _css_value(w, ar.tolist(), ma.tolist(), const)


# ---------------------------------------------------------------------------
# fitting


@dataclass(frozen=True)
class ArimaModel:
    order: ArimaOrder
    ar_coefficients: np.ndarray
    ma_coefficients: np.ndarray
    constant: float
    sigma2: float
    css: float
    n_effective: int
    aicc: float
    include_constant: bool = True
    converged: bool = True
    zero_variance: bool = False

    @property
    def category(self) -> ModelCategory:
        return classify(self.order)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate((self.ar_coefficients, self.ma_coefficients, [self.constant]))

    @property
    def n_parameters(self) -> int:
        return self.order.p + self.order.q + int(self.include_constant) + 1


def aicc(css_value: float, n: int, k: int) -> float:
    """n*ln(css/n) + 2k + 2k(k+1)/(n-k-1); +inf when n-k-1 <= 0."""
    if n - k - 1 <= 0:
        return math.inf
    if css_value <= 0:
        return -math.inf
    return n * math.log(css_value / n) + 2 * k + 2 * k * (k + 1) / (n - k - 1)


def _ar_initial(z: np.ndarray, p: int) -> np.ndarray:
    """Least-squares regression of z_t on its p lags (no intercept)."""
    if p == 0:
        return np.zeros(0)
    X = np.column_stack([z[p - i - 1 : z.size - i - 1] for i in range(p)])
    y = z[p:]
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    if not is_stationary(coef):
        return np.zeros(p)
    return coef


def fit(
    series,
    order: ArimaOrder,
    include_constant: Optional[bool] = None,
    *,
    options: OptimizerOptions = FIT_OPTIONS,
    restarts: int = MAX_RESTARTS,
) -> ArimaModel:
    """Fit ``order`` to ``series`` (original scale) by conditional sum of squares.

    ``include_constant`` defaults to True for d <= 1 and False for d = 2.
    Pure (0, d, 0) models are solved in closed form. Otherwise the simplex
    search starts from the differenced-series mean, least-squares AR
    coefficients and zero MA coefficients, and is restarted from its own
    answer until a restart stops improving (at most ``restarts`` runs).
    """
    if include_constant is None:
        include_constant = default_include_constant(order.d)
    x = np.asarray(series, dtype=float)
    if not np.all(np.isfinite(x)):
        raise FitError("series contains non-finite values")
    if x.size - order.d <= order.p + order.q + 2:
        raise InsufficientDataError(
            f"{order} needs more than {order.p + order.q + 2} points after differencing, "
            f"series has {x.size} values"
        )
    w = difference(x, order.d)
    n = w.size
    k = order.p + order.q + int(include_constant) + 1
    mean = float(np.mean(w)) if include_constant else 0.0
    p, q = order.p, order.q

    if p == 0 and q == 0:
        resid = w - mean
        s = float(np.dot(resid, resid))
        return ArimaModel(
            order=order,
            ar_coefficients=np.zeros(0),
            ma_coefficients=np.zeros(0),
            constant=mean,
            sigma2=s / n,
            css=s,
            n_effective=n,
            aicc=aicc(s, n, k),
            include_constant=include_constant,
            converged=True,
            zero_variance=s == 0.0,
        )

    # Search in rescaled coordinates: the constant moves in units of the
    # series spread and the objective is divided by the centred sum of
    # squares, so one step size and one set of tolerances suit any scale.
    spread = float(np.std(w)) or 1.0
    centred = w - np.mean(w)
    scale = float(np.dot(centred, centred)) or 1.0
    data = w.tolist() if n <= _SHORT_SERIES else w

    def unpack(theta: list[float]) -> tuple[list[float], list[float], float]:
        c = mean + spread * theta[-1] if include_constant else 0.0
        return theta[:p], theta[p : p + q], c

    def objective(theta: np.ndarray) -> float:
        return _css_value(data, *unpack(theta.tolist())) / scale

    theta = np.concatenate(
        (_ar_initial(w - mean, p), np.zeros(q), [0.0] if include_constant else [])
    )
    current = objective(theta)
    result = None
    for _ in range(max(restarts, 1)):
        result = minimize(objective, theta, options)
        gain = current - result.minimum
        theta, current = result.minimizer, result.minimum
        if gain <= options.f_tolerance:
            break
    assert result is not None
    if not result.converged:
        log.warning("CSS search for %s hit the iteration limit", order)

    ar, ma, const = unpack(theta.tolist())
    params = np.array(ar + ma + [const])
    s = css(w, order, params)
    return ArimaModel(
        order=order,
        ar_coefficients=np.array(ar, dtype=float),
        ma_coefficients=np.array(ma, dtype=float),
        constant=float(const),
        sigma2=s / n,
        css=s,
        n_effective=n,
        aicc=aicc(s, n, k),
        include_constant=include_constant,
        converged=result.converged,
        zero_variance=s == 0.0,
    )


# ---------------------------------------------------------------------------
# forecasting


@dataclass(frozen=True)
class ForecastResult:
    horizon: int
    point_forecasts: np.ndarray
    origin_year: Optional[int] = None


def forecast(
    model: ArimaModel, series, horizon: int, origin_year: Optional[int] = None
) -> ForecastResult:
    """Point forecasts ``horizon`` steps past the end of ``series``.

    Future innovations are zero; past ones are the in-sample CSS residuals.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    order = model.order
    x = np.asarray(series, dtype=float)
    w = difference(x, order.d)
    c = model.constant
    ar, ma = model.ar_coefficients, model.ma_coefficients

    if order.p == 0 and order.q == 0 and order.d == 1:
        # Random walk with drift: keep the closed form exact (no cumsum round-off).
        steps = np.arange(1, horizon + 1, dtype=float)
        return ForecastResult(horizon, x[-1] + steps * c, origin_year)

    e = list(css_residuals(w, order, model.params)) if order.q else []
    z = list(w - c)
    n = len(z)
    out = np.empty(horizon)
    for h in range(horizon):
        t = n + h
        v = 0.0
        for i, phi in enumerate(ar, start=1):
            if t - i >= 0:
                v += phi * z[t - i]
        for j, theta in enumerate(ma, start=1):
            if t - j < n and t - j >= 0:
                v += theta * e[t - j]
        z.append(v)
        out[h] = v + c
    return ForecastResult(horizon, _integrate_forward(out, x, order.d), origin_year)


# ---------------------------------------------------------------------------
# order selection


@dataclass
class SelectionResult:
    order: ArimaOrder
    model: ArimaModel
    candidates: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)


def _selection_key(model: ArimaModel):
    o = model.order
    return (model.aicc, o.p + o.d + o.q, o.d, o.p, o.q)


def select_order(
    series,
    max_p: int = 3,
    max_d: int = 2,
    max_q: int = 3,
    include_constant: Optional[bool] = None,
) -> SelectionResult:
    """Exhaustive AICc grid search over 0..max_p x 0..max_d x 0..max_q.

    Candidates that cannot be fitted are skipped. Ties go to the smaller
    p+d+q, then smaller d, then smaller p.

    Every candidate is first fitted with a coarse search; those whose AICc
    lands within ``REFINE_MARGIN`` of the best are refitted at full
    precision before the final comparison.
    """
    fitted: dict[ArimaOrder, ArimaModel] = {}
    failures: dict[ArimaOrder, str] = {}
    for p, d, q in itertools.product(range(max_p + 1), range(max_d + 1), range(max_q + 1)):
        order = ArimaOrder(p, d, q)
        try:
            fitted[order] = fit(
                series, order, include_constant, options=COARSE_OPTIONS, restarts=1
            )
        except (FitError, ValueError, np.linalg.LinAlgError) as exc:
            failures[order] = str(exc)
    if not fitted:
        detail = "; ".join(f"{o}: {msg}" for o, msg in sorted(failures.items()))
        raise SelectionError(f"no candidate order could be fitted ({detail})")

    lead = min(m.aicc for m in fitted.values())
    for order, model in list(fitted.items()):
        if model.aicc <= lead + REFINE_MARGIN and (order.p or order.q):
            refined = fit(series, order, include_constant)
            if refined.aicc <= model.aicc:
                fitted[order] = refined
    best = min(fitted.values(), key=_selection_key)
    return SelectionResult(best.order, best, fitted, failures)


def model_report(model: ArimaModel, **extra) -> dict:
    """Plain-dict form of a model for structured-text export."""
    doc = dict(extra)
    doc.update(
        order=list(model.order.as_tuple()),
        ar=[float(v) for v in model.ar_coefficients],
        ma=[float(v) for v in model.ma_coefficients],
        constant=float(model.constant),
        sigma2=float(model.sigma2),
        css=float(model.css),
        aicc=float(model.aicc),
        n_effective=int(model.n_effective),
        category=classify(model.order).value,
        include_constant=bool(model.include_constant),
        converged=bool(model.converged),
        zero_variance=bool(model.zero_variance),
    )
    note = category_note(model.order)
    if note:
        doc["category_note"] = note
    return doc


def model_from_report(doc: dict) -> ArimaModel:
    try:
        order = ArimaOrder(*(int(v) for v in doc["order"]))
        ar = np.asarray(doc["ar"], dtype=float)
        ma = np.asarray(doc["ma"], dtype=float)
        if ar.size != order.p or ma.size != order.q:
            raise ValueError("coefficient lengths do not match order")
        return ArimaModel(
            order=order,
            ar_coefficients=ar,
            ma_coefficients=ma,
            constant=float(doc["constant"]),
            sigma2=float(doc["sigma2"]),
            css=float(doc["css"]),
            n_effective=int(doc["n_effective"]),
            aicc=float(doc["aicc"]),
            include_constant=bool(doc.get("include_constant", True)),
            converged=bool(doc.get("converged", True)),
            zero_variance=bool(doc.get("zero_variance", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FitError(f"malformed model report: {exc}") from exc
