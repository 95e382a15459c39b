"""Seed derivation, parallel trial maps and summary statistics."""
from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one trial, derived from the master seed by a counter."""
    return np.random.default_rng([int(seed), int(stream), int(trial)])


def thread_count() -> int:
    """Worker cap from ``DEGNET_THREADS`` (default 1: run in-process)."""
    try:
        return max(1, int(os.environ.get("DEGNET_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    """Ordered map; uses worker processes when more than one is allowed. ``fn`` must be picklable."""
    workers = thread_count() if workers is None else workers
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def z_value(confidence: float) -> float:
    return statistics.NormalDist().inv_cdf(0.5 + confidence / 2)


def mean_std(values: Iterable[float]) -> tuple[float, float]:
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("no values")
    mean = math.fsum(vals) / len(vals)
    std = statistics.stdev(vals) if len(vals) > 1 else 0.0
    return mean, std


def upper_bound_check(values: Iterable[float], bound: float, k_sigma: float = 3.0) -> dict:
    """Is the sample mean at most ``bound + k_sigma * std / sqrt(n)``?"""
    vals = [float(v) for v in values]
    mean, std = mean_std(vals)
    slack = k_sigma * std / math.sqrt(len(vals))
    return {"n": len(vals), "mean": mean, "std": std, "bound": float(bound),
            "slack": slack, "ok": mean <= float(bound) + slack}
