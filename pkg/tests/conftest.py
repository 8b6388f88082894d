"""Shared test oracles and fixture builders.

The integration oracle here is deliberately independent of the library's
closed forms: composite Simpson's rule over geometrically expanding
panels, with per-panel interval doubling until the estimate stabilizes.
"""

from __future__ import annotations

import numpy as np
import pytest

from tarstop.corpus import RankedTopic


def composite_simpson(f, lo: float, hi: float, rel_tol: float = 1e-9) -> float:
    """Integrate f over [lo, hi] by composite Simpson panels.

    Panels expand geometrically from the left endpoint so integrands
    that change fastest near the start (power laws) converge quickly.
    Each panel doubles its point count until the estimate stabilizes.
    """
    if hi <= lo:
        return 0.0
    edges = [lo]
    while edges[-1] * 2.0 < hi:
        edges.append(edges[-1] * 2.0)
    edges.append(hi)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += _simpson_panel(f, a, b, rel_tol)
    return total


def _simpson_panel(f, a: float, b: float, rel_tol: float) -> float:
    m = 128
    prev = _simpson_fixed(f, a, b, m)
    for _ in range(14):
        m *= 2
        cur = _simpson_fixed(f, a, b, m)
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise AssertionError(f"simpson oracle did not converge on [{a}, {b}]")


def _simpson_fixed(f, a: float, b: float, m: int) -> float:
    xs = np.linspace(a, b, m + 1)
    ys = f(xs)
    h = (b - a) / m
    return h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum())


def topic_from_labels(labels, topic_id: str = "T") -> RankedTopic:
    return RankedTopic(topic_id, np.asarray(labels, dtype=bool))


@pytest.fixture
def rng():
    return np.random.default_rng(20230925)
