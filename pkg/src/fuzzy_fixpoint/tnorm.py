"""Triangular norms on the unit interval and a sampling-based axiom checker."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import DomainError

ASSOCIATIVITY_TOL = 1e-12
MONOTONICITY_TOL = 1e-12

BOUNDARY_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


class TNorm(enum.Enum):
    STANDARD_INTERSECTION = "min"
    ALGEBRAIC_PRODUCT = "product"
    BOUNDED_DIFFERENCE = "lukasiewicz"

    @classmethod
    def from_name(cls, name: str) -> "TNorm":
        try:
            return cls(name)
        except ValueError:
            known = ", ".join(repr(k.value) for k in cls)
            raise DomainError("tnorm", f"unknown t-norm {name!r}; expected one of {known}") from None

    def __call__(self, u, v):
        """Vectorised evaluation; no range checks."""
        if self is TNorm.STANDARD_INTERSECTION:
            return np.minimum(u, v)
        if self is TNorm.ALGEBRAIC_PRODUCT:
            return np.multiply(u, v)
        # lo - (1 - hi) instead of (u + v) - 1: 1 - hi is exact whenever the
        # result is positive, so u+v-1 gets one rounding and u*1 == u stays exact
        hi, lo = np.maximum(u, v), np.minimum(u, v)
        return np.maximum(0.0, lo - (1.0 - hi))

    def eval(self, u: float, v: float) -> float:
        return tnorm_eval(self, u, v)


DEFAULT_TNORM = TNorm.STANDARD_INTERSECTION


def _check_unit(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(name, f"{x!r} is outside [0, 1]")
    return x


def tnorm_eval(t: TNorm, u: float, v: float) -> float:
    u = _check_unit("u", u)
    v = _check_unit("v", v)
    return float(t(u, v))


class Axiom(enum.Enum):
    COMMUTATIVITY = "commutativity"
    ASSOCIATIVITY = "associativity"
    MONOTONICITY = "monotonicity"
    BOUNDARY_CONDITIONS = "boundary"
    # fuzzy seminorm axioms, reported by fuzzy_space
    NULLITY = "nullity"
    SCALING = "scaling"
    TRIANGLE = "triangle"
    MONOTONE_LIMIT = "monotone_limit"
    SCALING_LITERAL = "scaling_literal"


@dataclass(frozen=True)
class AxiomReport:
    axiom: Axiom
    passed: bool
    max_violation: float
    witness: Optional[Tuple[float, ...]] = None
    samples: int = 0
    tolerance: float = 0.0

    def describe(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (
            f"{status} {self.axiom.value}: max_violation={self.max_violation:.3g} "
            f"(tol={self.tolerance:g}, samples={self.samples})"
        )
        if self.witness is not None:
            line += " witness=(" + ", ".join(f"{w:.17g}" for w in self.witness) + ")"
        return line


def make_report(axiom: Axiom, violation: np.ndarray, witnesses: np.ndarray, tol: float) -> AxiomReport:
    """Collapse per-sample violation magnitudes into a single report.

    ``violation[k]`` is how far sample ``k`` misses the law (<= 0 when it
    holds); ``witnesses[k]`` is the tuple that produced it.
    """
    violation = np.asarray(violation, dtype=float)
    worst = int(np.argmax(violation))
    max_violation = max(float(violation[worst]), 0.0)
    if np.isnan(violation).any():
        worst = int(np.flatnonzero(np.isnan(violation))[0])
        max_violation = float("inf")
    passed = max_violation <= tol
    witness = None if passed else tuple(float(x) for x in np.atleast_1d(witnesses[worst]))
    return AxiomReport(axiom, passed, max_violation, witness, len(violation), tol)


BinaryOp = Callable[[np.ndarray, np.ndarray], np.ndarray]


def sample_triples(sample_count: int, seed: int) -> np.ndarray:
    """Seeded uniform triples in [0,1]^3 followed by the full boundary grid."""
    rng = np.random.default_rng(seed)
    random = rng.random((sample_count, 3))
    grid = np.array(list(itertools.product(BOUNDARY_GRID, repeat=3)))
    return np.vstack([random, grid])


def check_tnorm_axioms(t: Union[TNorm, BinaryOp], sample_count: int, seed: int) -> list[AxiomReport]:
    """Check the four t-norm axioms of ``t`` on a seeded sample.

    ``t`` may be a :class:`TNorm` or any vectorised binary operation, which
    is how deliberately broken operations are run through the same engine.
    Commutativity and the boundary laws are demanded exactly.
    """
    if sample_count < 1:
        raise DomainError("sample_count", "must be >= 1")
    op = t
    uvw = sample_triples(sample_count, seed)
    u, v, w = uvw.T

    comm = np.abs(op(u, v) - op(v, u))

    assoc = np.abs(op(u, op(v, w)) - op(op(u, v), w))

    lo, hi = np.minimum(v, w), np.maximum(v, w)
    ordered = np.column_stack([u, lo, hi])
    mono = op(u, lo) - op(u, hi)

    ones, zeros = np.ones_like(u), np.zeros_like(u)
    bound = np.maximum(np.abs(op(u, ones) - u), np.abs(op(u, zeros)))

    return [
        make_report(Axiom.COMMUTATIVITY, comm, uvw, 0.0),
        make_report(Axiom.ASSOCIATIVITY, assoc, uvw, ASSOCIATIVITY_TOL),
        make_report(Axiom.MONOTONICITY, mono, ordered, MONOTONICITY_TOL),
        make_report(Axiom.BOUNDARY_CONDITIONS, bound, uvw, 0.0),
    ]
