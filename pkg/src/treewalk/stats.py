"""Statistics helpers: exponential tail fits, Kolmogorov-Smirnov distances,
and standard-error utilities used by the experiment reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


def normal_cdf(x):
    return 0.5 * (1.0 + np.vectorize(math.erf)(np.asarray(x, dtype=float) / math.sqrt(2.0)))


@dataclass
class TailFit:
    """Least-squares fit of log tail probabilities against the level."""

    ok: bool
    rate: float = float("nan")  # decay rate r in P ~ C * exp(-r * level)
    ratio: float = float("nan")  # per-unit-level ratio exp(-r)
    amplitude: float = float("nan")
    residual_rms: float = float("nan")
    levels: list = field(default_factory=list)
    reason: str = ""

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "rate": self.rate,
            "ratio": self.ratio,
            "amplitude": self.amplitude,
            "residual_rms": self.residual_rms,
            "levels": list(self.levels),
            "reason": self.reason,
        }


def tail_fit(levels: Sequence[float], hits: Sequence[int], total: int,
             min_hits: int = 20, window: Optional[tuple] = None,
             min_points: int = 5) -> TailFit:
    """Fit hits/total ~ C * exp(-rate * level) by least squares on logs.

    Bins with fewer than ``min_hits`` hits sit below the noise floor and are
    excluded, as are levels outside ``window``; with fewer than ``min_points``
    usable bins the fit declines rather than extrapolate.
    """
    pts = []
    for lv, h in zip(levels, hits):
        if h < max(min_hits, 1):
            continue
        if window is not None and not (window[0] <= lv <= window[1]):
            continue
        pts.append((float(lv), math.log(h / total)))
    if len(pts) < min_points:
        return TailFit(
            ok=False,
            levels=[lv for lv, _ in pts],
            reason=f"only {len(pts)} usable tail points (need {min_points})",
        )
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    res = ys - (slope * xs + intercept)
    return TailFit(
        ok=True,
        rate=float(-slope),
        ratio=float(math.exp(slope)),
        amplitude=float(math.exp(intercept)),
        residual_rms=float(np.sqrt(np.mean(res ** 2))),
        levels=[float(x) for x in xs],
    )


def ks_statistic(sample: np.ndarray, reference_cdf: Callable) -> float:
    """sup |empirical cdf - reference cdf| for a continuous reference."""
    xs = np.sort(np.asarray(sample, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    ref = np.asarray(reference_cdf(xs), dtype=float)
    upper = np.max(np.arange(1, n + 1) / n - ref)
    lower = np.max(ref - np.arange(0, n) / n)
    return float(max(upper, lower))


def ks_discrete(values: np.ndarray, probs: np.ndarray, reference_cdf: Callable) -> float:
    """sup |F - G| between an exact discrete law and a continuous cdf."""
    values = np.asarray(values, dtype=float)
    cdf = np.cumsum(np.asarray(probs, dtype=float))
    ref = np.asarray(reference_cdf(values), dtype=float)
    below = np.concatenate([[0.0], cdf[:-1]])
    return float(max(np.max(np.abs(cdf - ref)), np.max(np.abs(below - ref))))


def empirical_ccdf(samples: np.ndarray, levels: Sequence[int]):
    """P[sample >= level] with raw hit counts, per level."""
    samples = np.asarray(samples)
    hits = [int(np.count_nonzero(samples >= lv)) for lv in levels]
    probs = [h / len(samples) for h in hits]
    return hits, probs


def mean_standard_error(samples: np.ndarray) -> tuple[float, float]:
    samples = np.asarray(samples, dtype=float)
    m = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(len(samples))) if len(samples) > 1 else 0.0
    return m, se


def binomial_standard_error(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)
