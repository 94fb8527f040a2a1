"""Seeded synthetic data: event files and simulated ARIMA series.

Used by the test suite and handy for trying the CLI without real
event data::

    python -m gdelt_arima.synthetic --rows 10000 --seed 7 > events.tsv
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

# Partner codes (FIPS style) with base weights and yearly log-drift.
PARTNERS = {
    "US": (9.0, 0.000),
    "JA": (5.0, -0.004),
    "RS": (4.5, 0.002),
    "KS": (2.0, 0.030),
    "KN": (2.2, 0.010),
    "UK": (2.4, -0.010),
    "FR": (1.8, 0.000),
    "IR": (1.2, 0.015),
    "PK": (1.4, 0.008),
    "IN": (1.1, 0.020),
    "AS": (1.0, 0.018),
    "VM": (1.3, 0.005),
    "GM": (1.0, 0.012),
    "RP": (0.9, 0.006),
    "CA": (0.8, 0.004),
    "BR": (0.4, 0.030),
    "EG": (0.5, -0.005),
    "MX": (0.3, 0.010),
}
OTHERS = ["US", "UK", "FR", "GM", "IS", "SY", "MX", "BR"]


def event_lines(
    n_rows: int,
    seed: int = 0,
    target: str = "CH",
    first_year: int = 1979,
    last_year: int = 2013,
    noise_fraction: float = 0.15,
) -> list[str]:
    """Tab-separated rows ``date, actor1, actor2, event_code, action_country``.

    Most rows pair ``target`` with a partner whose share drifts over time;
    the rest are rows between other countries, target-target rows and
    malformed rows.
    """
    rng = np.random.default_rng(seed)
    codes = list(PARTNERS)
    base = np.array([PARTNERS[c][0] for c in codes])
    drift = np.array([PARTNERS[c][1] for c in codes])
    years = np.arange(first_year, last_year + 1)
    lines = []
    for _ in range(n_rows):
        year = int(rng.choice(years))
        date = f"{year}{int(rng.integers(1, 13)):02d}{int(rng.integers(1, 29)):02d}"
        event = f"0{int(rng.integers(10, 99))}"
        roll = rng.random()
        if roll < noise_fraction:
            kind = rng.integers(0, 4)
            if kind == 0:
                a, b = rng.choice(OTHERS, size=2, replace=False)
                lines.append(f"{date}\t{a}\t{b}\t{event}\t{a}")
            elif kind == 1:
                lines.append(f"{date}\t{target}\t{target}\t{event}\t{target}")
            elif kind == 2:
                lines.append(f"{date}\t\t{target}\t{event}\t")
            else:
                lines.append(f"{year}13XX\tUS\t{target}\t{event}\tUS")
            continue
        w = base * np.exp(drift * (year - first_year))
        partner = codes[int(rng.choice(len(codes), p=w / w.sum()))]
        if rng.random() < 0.5:
            a, b = partner, target
        else:
            a, b = target, partner
        lines.append(f"{date}\t{a}\t{b}\t{event}\t{partner}")
    return lines


def simulate_arima(
    n: int,
    ar: Sequence[float] = (),
    ma: Sequence[float] = (),
    d: int = 0,
    constant: float = 0.0,
    sigma: float = 1.0,
    seed: int = 0,
    burn_in: int = 200,
) -> np.ndarray:
    """Draw ``n`` values of an ARIMA process with Gaussian innovations.

    The ARMA part is ``w_t - c = sum phi_i (w_{t-i} - c) + e_t + sum theta_j e_{t-j}``;
    ``d`` cumulative sums then integrate it, starting from zero.
    """
    rng = np.random.default_rng(seed)
    ar = list(ar)
    ma = list(ma)
    total = n - d + burn_in
    e = rng.normal(0.0, sigma, size=total)
    z = np.zeros(total)
    for t in range(total):
        v = e[t]
        for i, phi in enumerate(ar, start=1):
            if t >= i:
                v += phi * z[t - i]
        for j, theta in enumerate(ma, start=1):
            if t >= j:
                v += theta * e[t - j]
        z[t] = v
    x = z[burn_in:] + constant
    for _ in range(d):
        x = np.concatenate(([0.0], np.cumsum(x)))
    return x


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="write a synthetic event file to stdout")
    parser.add_argument("--rows", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--target", default="CH")
    args = parser.parse_args(argv)
    for line in event_lines(args.rows, args.seed, args.target):
        sys.stdout.write(line + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
