"""Classical seminorms on R^d, their Minkowski gauges, and separation checks.

Every seminorm shipped here has a closed-form value, so the bisection-based
:func:`minkowski_functional` always has an analytic counterpart to agree with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError


def as_point(coords, dim: Optional[int] = None, name: str = "y") -> np.ndarray:
    """Validate ``coords`` as a finite point of R^dim and return a float array."""
    y = np.asarray(coords, dtype=float)
    if y.ndim == 0:
        y = y.reshape(1)
    if y.ndim != 1 or y.size == 0:
        raise DomainError(name, f"expected a nonempty flat coordinate list, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise DomainError(name, "coordinates must be finite")
    if dim is not None and y.size != dim:
        raise DomainError(name, f"dimension {y.size} does not match {dim}")
    return y


class ClassicalSeminorm:
    """Base class: a seminorm ``q`` on R^dim with a closed-form value."""

    dim: int

    def evaluate(self, y: np.ndarray) -> float:
        return float(self.evaluate_many(np.asarray(y, dtype=float)[None, :])[0])

    def evaluate_many(self, ys: np.ndarray) -> np.ndarray:
        """Row-wise values for an ``(n, dim)`` array."""
        raise NotImplementedError

    def kernel_axes(self) -> Optional[frozenset]:
        """Coordinate axes spanning the kernel, or None if the kernel is not a
        coordinate subspace."""
        return None

    def describe(self) -> dict:
        raise NotImplementedError

    def __call__(self, y) -> float:
        return seminorm_eval(self, y)


@dataclass(frozen=True)
class WeightedAbs(ClassicalSeminorm):
    """``weight * |y[axis]|``; a seminorm but not a norm when dim > 1."""

    dim: int
    axis: int
    weight: float = 1.0

    def __post_init__(self):
        _check_dim(self.dim)
        if not 0 <= self.axis < self.dim:
            raise DomainError("axis", f"{self.axis} is not an axis of R^{self.dim}")
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise DomainError("weight", "must be positive and finite")

    def evaluate_many(self, ys):
        return self.weight * np.abs(ys[:, self.axis])

    def kernel_axes(self):
        return frozenset(range(self.dim)) - {self.axis}

    def describe(self):
        return {"kind": "abs", "axis": self.axis, "weight": self.weight}


@dataclass(frozen=True)
class WeightedSup(ClassicalSeminorm):
    """``max_i w_i |y_i|`` with nonnegative weights."""

    weights: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise DomainError("weights", "must be nonempty")
        if any(not (x >= 0 and math.isfinite(x)) for x in w):
            raise DomainError("weights", "must be nonnegative and finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "dim", len(w))

    def evaluate_many(self, ys):
        return np.max(np.abs(ys) * np.asarray(self.weights), axis=1)

    def kernel_axes(self):
        return frozenset(i for i, w in enumerate(self.weights) if w == 0.0)

    def describe(self):
        return {"kind": "sup", "weights": list(self.weights)}


@dataclass(frozen=True)
class EllipsoidGauge(ClassicalSeminorm):
    """``sqrt(sum (y_i / a_i)^2)``: the gauge of an axis-aligned ellipsoid."""

    semi_axes: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        a = tuple(float(x) for x in self.semi_axes)
        if not a:
            raise DomainError("semi_axes", "must be nonempty")
        if any(not (x > 0 and math.isfinite(x)) for x in a):
            raise DomainError("semi_axes", "must be positive and finite")
        object.__setattr__(self, "semi_axes", a)
        object.__setattr__(self, "dim", len(a))

    def evaluate_many(self, ys):
        return np.sqrt(np.sum((ys / np.asarray(self.semi_axes)) ** 2, axis=1))

    def kernel_axes(self):
        return frozenset()

    def describe(self):
        return {"kind": "ellipsoid", "semi_axes": list(self.semi_axes)}


def _check_dim(dim):
    if not (isinstance(dim, (int, np.integer)) and dim >= 1):
        raise DomainError("dim", f"must be a positive integer, got {dim!r}")


def seminorm_eval(q: ClassicalSeminorm, y) -> float:
    y = as_point(y, q.dim)
    return q.evaluate(y)


def minkowski_functional(B: ClassicalSeminorm, y, tol: float = 1e-10) -> float:
    """inf{t > 0 : y in tB} where B = {x : q(x) <= 1}, found by bisection.

    Only membership queries ``q(y / t) <= 1`` are made; the closed form of
    ``q`` is never consulted directly.  Points in the kernel of ``q`` give 0.
    """
    y = as_point(y, B.dim)
    if not tol > 0:
        raise DomainError("tol", "must be positive")

    def inside(t: float) -> bool:
        return B.evaluate(y / t) <= 1.0

    if not np.any(y):
        return 0.0
    hi = 1.0
    while not inside(hi):
        hi *= 2.0
        if not math.isfinite(hi):
            raise DomainError("y", "gauge is not finite")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if inside(mid):
            hi = mid
        else:
            lo = mid
    if lo == 0.0:
        # every probe was inside: y/t stays in B as t -> 0 up to tol
        return 0.0
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SeminormFamily:
    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise DomainError("seminorms", "family must be nonempty")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise DomainError("seminorms", f"members have inconsistent dimensions {sorted(dims)}")
        object.__setattr__(self, "members", members)

    @property
    def dim(self) -> int:
        return self.members[0].dim

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]


@dataclass(frozen=True)
class SeparationResult:
    separating: bool
    exact: bool
    witness: Optional[np.ndarray] = None

    @property
    def label(self) -> str:
        if not self.separating:
            return "witness"
        return "separating" if self.exact else "separating_on_samples"


def canonical_candidates(dim: int, seed: int = 0, count: int = 64) -> np.ndarray:
    """Canonical basis vectors followed by a seeded Gaussian batch."""
    rng = np.random.default_rng(seed)
    return np.vstack([np.eye(dim), rng.standard_normal((count, dim))])


def is_separating(fam: SeminormFamily, candidates: Optional[Iterable] = None, seed: int = 0) -> SeparationResult:
    """Look for y != 0 that every member of ``fam`` sends to 0.

    When every member knows its kernel as a coordinate subspace (true for all
    shipped kinds) the answer is exact: the joint kernel is the intersection of
    those subspaces.  Otherwise the candidate points are scanned.
    """
    kernels = [m.kernel_axes() for m in fam]
    if all(k is not None for k in kernels):
        common = frozenset.intersection(*kernels)
        if not common:
            return SeparationResult(True, True)
        witness = np.zeros(fam.dim)
        witness[min(common)] = 1.0
        return SeparationResult(False, True, witness)

    if candidates is None:
        pts = canonical_candidates(fam.dim, seed)
    else:
        pts = np.vstack([np.eye(fam.dim), np.asarray(list(candidates), dtype=float).reshape(-1, fam.dim)])
    pts = pts[np.any(pts != 0, axis=1)]
    values = np.column_stack([m.evaluate_many(pts) for m in fam])
    blind = np.flatnonzero(np.all(values == 0.0, axis=1))
    if blind.size:
        return SeparationResult(False, False, pts[blind[0]].copy())
    return SeparationResult(True, False)


def seminorm_from_dict(desc: dict, dim: int) -> ClassicalSeminorm:
    kind = desc.get("kind")
    if kind == "abs":
        return WeightedAbs(dim, int(desc["axis"]), float(desc.get("weight", 1.0)))
    if kind == "sup":
        return WeightedSup(tuple(desc.get("weights", [1.0] * dim)))
    if kind == "ellipsoid":
        return EllipsoidGauge(tuple(desc.get("semi_axes", [1.0] * dim)))
    raise DomainError("kind", f"unknown seminorm kind {kind!r}")


def family_from_dicts(descs: Sequence[dict], dim: int) -> SeminormFamily:
    return SeminormFamily(tuple(seminorm_from_dict(d, dim) for d in descs))
