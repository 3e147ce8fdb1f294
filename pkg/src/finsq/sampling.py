"""Deterministic sample generation for the verification suites.

Counter-based Philox streams keyed by an integer seed make runs
reproducible across processes and platforms; identical (seed, chart,
count) requests produce identical samples in identical order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import OneFormField, RiemannMetric, one_form_norm_sq


class SamplingError(RuntimeError):
    """The chart rejected too many draws to assemble a sample set."""


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


@dataclass(frozen=True)
class SampleSet:
    """Points with matched alpha-unit directions and transverse flag edges."""

    points: np.ndarray
    directions: np.ndarray
    edges: np.ndarray
    attempts: int


def _draw_point(rng, alpha: RiemannMetric, max_x: float) -> np.ndarray:
    if alpha.sample_box is not None:
        lo = np.array([b[0] for b in alpha.sample_box])
        hi = np.array([b[1] for b in alpha.sample_box])
        return rng.uniform(lo, hi)
    while True:
        x = rng.uniform(-max_x, max_x, alpha.dim)
        if float(np.linalg.norm(x)) <= max_x:
            return x


def sample_inputs(alpha: RiemannMetric, beta: Optional[OneFormField], count: int,
                  seed: int, max_x: float = 0.8, b_cap: float = 0.9) -> SampleSet:
    """count accepted samples, rejecting points outside the chart or with
    b >= b_cap, plus one alpha-unit y and one non-parallel edge u apiece."""
    if count < 1:
        raise ValueError("count must be positive")
    rng = rng_for(seed)
    n = alpha.dim
    limit = max(1000, 1000 * count)
    pts, ys, us = [], [], []
    attempts = 0
    while len(pts) < count:
        attempts += 1
        if attempts > limit:
            raise SamplingError(
                f"{alpha.name}: {attempts - 1} draws produced only {len(pts)} "
                f"of {count} samples (domain too small for max_x={max_x}, b_cap={b_cap})")
        x = _draw_point(rng, alpha, max_x)
        if not alpha.domain(x):
            continue
        if beta is not None:
            b2 = float(one_form_norm_sq(alpha, beta, [float(v) for v in x]))
            if b2 >= b_cap * b_cap:
                continue
        a = alpha.matrix(x)
        y = _unit_direction(rng, a)
        u = _transverse_edge(rng, a, y)
        pts.append(x)
        ys.append(y)
        us.append(u)
    return SampleSet(points=np.array(pts), directions=np.array(ys),
                     edges=np.array(us), attempts=attempts)


def _unit_direction(rng, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    while True:
        y = rng.uniform(-1.0, 1.0, n)
        norm2 = float(y @ a @ y)
        if norm2 > 1e-6:
            return y / np.sqrt(norm2)


def _transverse_edge(rng, a: np.ndarray, y: np.ndarray) -> np.ndarray:
    while True:
        u = rng.uniform(-1.0, 1.0, a.shape[0])
        nu = float(u @ a @ u)
        if nu <= 1e-6:
            continue
        cos = float(y @ a @ u) / np.sqrt(nu * float(y @ a @ y))
        if abs(cos) <= 0.95:
            return u / np.sqrt(nu)
