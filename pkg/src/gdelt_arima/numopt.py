"""Deterministic Nelder-Mead simplex minimizer for small parameter vectors."""

from __future__ import annotations

import bisect
import math
import operator
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import OptimizerError

REFLECTION = 1.0
EXPANSION = 2.0
CONTRACTION = 0.5
SHRINK = 0.5


@dataclass(frozen=True)
class OptimizerOptions:
    x_tolerance: float = 1e-8
    f_tolerance: float = 1e-10
    max_iterations: int = 5000
    initial_step: float = 0.1

    def __post_init__(self):
        if self.x_tolerance < 0 or self.f_tolerance < 0:
            raise ValueError("tolerances must be non-negative")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.initial_step > 0:
            raise ValueError("initial_step must be positive")


@dataclass(frozen=True)
class OptimResult:
    minimizer: np.ndarray
    minimum: float
    iterations: int
    converged: bool


def _safe(f: float) -> float:
    # NaN anywhere after the start point just loses every comparison.
    return math.inf if math.isnan(f) else f


def minimize(
    objective: Callable[[np.ndarray], float],
    x0,
    options: Optional[OptimizerOptions] = None,
    callback: Optional[Callable[[np.ndarray, float], None]] = None,
) -> OptimResult:
    """Minimize ``objective`` starting from ``x0``.

    The initial simplex is ``x0`` plus ``options.initial_step`` along each
    coordinate axis. Iteration stops, flagged as converged, once the
    simplex spread (max coordinate distance from the best vertex) drops
    below ``x_tolerance``, or once the spread of objective values drops
    below ``f_tolerance`` and the simplex centroid is no better than the
    best vertex. ``callback(best_x, best_f)`` runs once per iteration.
    """
    opts = options or OptimizerOptions()
    x0 = np.asarray(x0, dtype=float).ravel()
    n = x0.size
    if n < 1:
        raise ValueError("x0 must have at least one coordinate")

    f0 = float(objective(x0.copy()))
    if math.isnan(f0):
        raise OptimizerError("objective is NaN at the starting point")
    if not math.isfinite(f0):
        raise OptimizerError("objective is not finite at the starting point")

    def f(x: list[float]) -> float:
        return _safe(float(objective(np.array(x))))

    # Vertices are plain lists: at these dimensions numpy call overhead
    # dominates the arithmetic.
    base = x0.tolist()
    simplex = [base]
    fvals = [f0]
    for i in range(n):
        v = list(base)
        v[i] += opts.initial_step
        simplex.append(v)
        fvals.append(f(v))

    order = sorted(range(n + 1), key=fvals.__getitem__)
    simplex = [simplex[i] for i in order]
    fvals = [fvals[i] for i in order]
    # Running coordinate sums over all n + 1 vertices; the centroid of the
    # n best is (total - worst) / n.
    total = [sum(col) for col in zip(*simplex)]

    def replace_worst(x: list[float], fx: float) -> None:
        nonlocal total
        old = simplex.pop()
        fvals.pop()
        total = [t + a - b for t, a, b in zip(total, x, old)]
        # bisect_right keeps the new vertex behind equal values, as a
        # stable sort would.
        k = bisect.bisect_right(fvals, fx)
        simplex.insert(k, x)
        fvals.insert(k, fx)

    iterations = 0
    converged = False
    while True:
        best, fbest = simplex[0], fvals[0]
        if callback is not None:
            callback(np.array(best), fbest)

        if max(max(map(abs, map(operator.sub, v, best))) for v in simplex[1:]) < opts.x_tolerance:
            converged = True
            break
        if fvals[-1] - fbest < opts.f_tolerance:
            # A flat simplex can straddle the minimum (vertices at equal
            # height on either side); only stop if the centroid is no better.
            mid = [t / (n + 1) for t in total]
            if f(mid) > fbest - opts.f_tolerance:
                converged = True
                break
        if iterations >= opts.max_iterations:
            break
        iterations += 1

        worst = simplex[-1]
        centroid = [(t - w) / n for t, w in zip(total, worst)]

        xr = [c + REFLECTION * (c - w) for c, w in zip(centroid, worst)]
        fr = f(xr)
        if fr < fbest:
            xe = [c + EXPANSION * (r - c) for c, r in zip(centroid, xr)]
            fe = f(xe)
            if fe < fr:
                replace_worst(xe, fe)
            else:
                replace_worst(xr, fr)
            continue
        if fr < fvals[-2]:
            replace_worst(xr, fr)
            continue

        if fr < fvals[-1]:
            xc = [c + CONTRACTION * (r - c) for c, r in zip(centroid, xr)]
            fc = f(xc)
            if fc <= fr:
                replace_worst(xc, fc)
                continue
        else:
            xc = [c + CONTRACTION * (w - c) for c, w in zip(centroid, worst)]
            fc = f(xc)
            if fc < fvals[-1]:
                replace_worst(xc, fc)
                continue

        for i in range(1, n + 1):
            simplex[i] = [b + SHRINK * (v - b) for b, v in zip(best, simplex[i])]
            fvals[i] = f(simplex[i])
        order = sorted(range(n + 1), key=fvals.__getitem__)
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        total = [sum(col) for col in zip(*simplex)]

    return OptimResult(
        minimizer=np.array(simplex[0]),
        minimum=float(fvals[0]),
        iterations=iterations,
        converged=converged,
    )
