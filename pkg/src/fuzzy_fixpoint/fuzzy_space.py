"""Fuzzy seminorms induced by classical ones, fuzzy balls, and axiom checks.

The only construction is ``p(y, t) = t / (t + q(y))`` for ``t > 0`` and 0
otherwise.  Every fuzzy quantity is therefore recoverable from ``q``:
``p(y, t) > 1 - a`` iff ``q(y) < t * a / (1 - a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .seminorms import ClassicalSeminorm, as_point
from .tnorm import Axiom, AxiomReport, TNorm, make_report

SCALING_TOL = 1e-12
TRIANGLE_TOL = 1e-12
MONOTONE_TOL = 0.0
TAIL_EPSILONS = (1e-1, 1e-3, 1e-6)


@dataclass(frozen=True)
class FuzzySeminorm:
    base: ClassicalSeminorm

    @property
    def dim(self) -> int:
        return self.base.dim

    def evaluate_many(self, ys: np.ndarray, ts: np.ndarray) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        q = self.base.evaluate_many(ys)
        positive = ts > 0
        safe_t = np.where(positive, ts, 1.0)
        return np.where(positive, 1.0 / (1.0 + q / safe_t), 0.0)

    def __call__(self, y, t: float) -> float:
        return fuzzy_eval(self, y, t)


def fuzzy_eval(p: FuzzySeminorm, y, t: float) -> float:
    y = as_point(y, p.dim)
    t = float(t)
    if not math.isfinite(t):
        raise DomainError("t", "must be finite")
    if t <= 0:
        return 0.0
    # 1 / (1 + q/t) rather than t / (t + q): every rounding step is then
    # monotone in t, so nondecreasing-in-t holds exactly in floating point
    return 1.0 / (1.0 + p.base.evaluate(y) / t)


def level_radius(t: float, alpha: float) -> float:
    """Classical radius r with ``p(y, t) > 1 - alpha  <=>  q(y) < r``."""
    return t * alpha / (1.0 - alpha)


@dataclass(frozen=True)
class FuzzyBall:
    center: np.ndarray
    alpha: float
    t: float
    seminorm: FuzzySeminorm

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, self.seminorm.dim, "center"))
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha", "must lie in (0, 1)")
        if not self.t > 0:
            raise DomainError("t", "must be positive")

    def __contains__(self, z) -> bool:
        return ball_contains(self, z)


def ball_contains(ball: FuzzyBall, z) -> bool:
    z = as_point(z, ball.seminorm.dim, "z")
    return fuzzy_eval(ball.seminorm, ball.center - z, ball.t) > 1.0 - ball.alpha


# --- axiom checking ---------------------------------------------------------


def _sample_points(rng, n, dim):
    # magnitudes spread over six decades so both tiny and huge q(y) appear
    scale = 10.0 ** rng.uniform(-3, 3, size=(n, 1))
    pts = rng.standard_normal((n, dim)) * scale
    pts[: max(1, n // 50)] = 0.0
    return pts


def _sample_positive(rng, n):
    return 10.0 ** rng.uniform(-3, 3, size=n)


def _sample_scalars(rng, n):
    v = rng.standard_normal(n) * 10.0 ** rng.uniform(-2, 2, size=n)
    v[v == 0] = 1.0
    return v


def check_fuzzy_axioms(p: FuzzySeminorm, tn: TNorm, sample_count: int, seed: int) -> list[AxiomReport]:
    """Sampled reports for nullity, scaling, the t-norm triangle inequality,
    and monotonicity with limit 1 (axioms i-iv, in that order)."""
    if sample_count < 1:
        raise DomainError("sample_count", "must be >= 1")
    rng = np.random.default_rng(seed)
    n, d = sample_count, p.dim
    ys = _sample_points(rng, n, d)
    zs = _sample_points(rng, n, d)

    # (i) p(y, t) = 0 for t <= 0
    t_nonpos = -_sample_positive(rng, n)
    t_nonpos[: max(1, n // 10)] = 0.0
    nullity = np.abs(p.evaluate_many(ys, t_nonpos))
    reports = [make_report(Axiom.NULLITY, nullity, np.column_stack([t_nonpos, ys]), 0.0)]

    # (ii) p(v y, t) = p(y, t / |v|)
    vs = _sample_scalars(rng, n)
    ts = _sample_positive(rng, n)
    lhs = p.evaluate_many(vs[:, None] * ys, ts)
    rhs = p.evaluate_many(ys, ts / np.abs(vs))
    reports.append(make_report(Axiom.SCALING, np.abs(lhs - rhs), np.column_stack([vs, ts, ys]), SCALING_TOL))

    # (iii) p(y + z, t + s) >= tn(p(y, t), p(z, s)); some t, s nonpositive
    ts = _sample_positive(rng, n) * np.where(rng.random(n) < 0.1, -1.0, 1.0)
    ss = _sample_positive(rng, n) * np.where(rng.random(n) < 0.1, -1.0, 1.0)
    triangle = _triangle_violation(p, tn, ys, zs, ts, ss)
    reports.append(make_report(Axiom.TRIANGLE, triangle, np.column_stack([ts, ss, ys, zs]), TRIANGLE_TOL))

    # (iv) nondecreasing in t, and p(y, T) >= 1 - eps at the closed-form T(eps)
    t1 = _sample_positive(rng, n) * np.where(rng.random(n) < 0.1, -1.0, 1.0)
    t2 = t1 + _sample_positive(rng, n)
    mono = p.evaluate_many(ys, t1) - p.evaluate_many(ys, t2)
    q = p.base.evaluate_many(ys)
    tail = np.zeros(n)
    for eps in TAIL_EPSILONS:
        big_t = np.where(q > 0, q * (1.0 - eps) / eps, 1.0)
        tail = np.maximum(tail, (1.0 - eps) - p.evaluate_many(ys, big_t) - 1e-12)
    reports.append(
        make_report(Axiom.MONOTONE_LIMIT, np.maximum(mono, tail), np.column_stack([t1, t2, ys]), MONOTONE_TOL)
    )
    return reports


def check_literal_scaling(p: FuzzySeminorm, sample_count: int, seed: int) -> AxiomReport:
    """The scaling law as literally printed, ``p(y, t) = p(v y, t / |v|)``.

    Informational: induced fuzzy seminorms generally fail it, because it
    divides ``t`` where homogeneity would multiply.
    """
    rng = np.random.default_rng(seed)
    ys = _sample_points(rng, sample_count, p.dim)
    vs = _sample_scalars(rng, sample_count)
    ts = _sample_positive(rng, sample_count)
    lhs = p.evaluate_many(ys, ts)
    rhs = p.evaluate_many(vs[:, None] * ys, ts / np.abs(vs))
    return make_report(Axiom.SCALING_LITERAL, np.abs(lhs - rhs), np.column_stack([vs, ts, ys]), SCALING_TOL)


def _triangle_violation(p, tn, ys, zs, ts, ss):
    lhs = p.evaluate_many(ys + zs, ts + ss)
    rhs = tn(p.evaluate_many(ys, ts), p.evaluate_many(zs, ss))
    return rhs - lhs


LATTICE_TIMES = (-1.0, 0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0)


def lattice_vectors(dim: int, count: int = 10) -> np.ndarray:
    """``count`` vectors taken evenly from a regular lattice on [-2, 2]^dim.

    The per-axis resolution is odd so the origin is a lattice point.
    """
    k = max(5, math.ceil(count ** (1.0 / dim)))
    k += 1 - k % 2
    coords = np.linspace(-2.0, 2.0, k)
    n_full = k**dim
    flat = np.linspace(0, n_full - 1, count).round().astype(int)
    idx = np.stack(np.unravel_index(flat, (k,) * dim), axis=1)
    return coords[idx]


def lattice_triangle_check(p: FuzzySeminorm, tn: TNorm, per_axis: int = 10) -> AxiomReport:
    """Exhaustive check of the triangle inequality over a fixed lattice.

    Enumerates every combination of ``per_axis`` lattice vectors for y and z
    and ``per_axis`` values for each of t and s (10^4 tuples by default).
    """
    vecs = lattice_vectors(p.dim, per_axis)
    times = np.array(LATTICE_TIMES[:per_axis])
    iy, iz, it, is_ = np.meshgrid(
        np.arange(len(vecs)), np.arange(len(vecs)), np.arange(len(times)), np.arange(len(times)), indexing="ij"
    )
    ys, zs = vecs[iy.ravel()], vecs[iz.ravel()]
    ts, ss = times[it.ravel()], times[is_.ravel()]
    violation = _triangle_violation(p, tn, ys, zs, ts, ss)
    return make_report(Axiom.TRIANGLE, violation, np.column_stack([ts, ss, ys, zs]), TRIANGLE_TOL)
