"""Averaged fixed-point iteration with fuzzy residual tracking.

The iteration is ``y_{n+1} = lam_n y_n + (1 - lam_n) F(y_n)``.  Each step
records, per seminorm of the family, the classical step and fixed-point
residuals and their fuzzy memberships at a fixed probe level ``t_probe``.
The run stops once every membership exceeds ``1 - alpha_tol``.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .contraction import AffineMap, apply_map
from .errors import DomainError, SingularSystemError
from .fuzzy_space import FuzzySeminorm, level_radius
from .seminorms import SeminormFamily, as_point, is_separating
from .tnorm import DEFAULT_TNORM, TNorm

DIVERGENCE_BOUND = 1e150
PIVOT_THRESHOLD = 1e-12
MONOTONE_TOL = 1e-12
_ALMOST_ONE = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class LambdaSchedule:
    kind: str = "zero"  # "zero" | "constant" | "harmonic"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "harmonic"):
            raise DomainError("schedule.kind", f"unknown schedule {self.kind!r}")
        if self.kind == "constant" and not 0.0 <= self.value < 1.0:
            raise DomainError("schedule.value", "constant lambda must lie in [0, 1)")

    def __call__(self, n: int) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "harmonic":
            return min(1.0 - 1.0 / (n + 1), _ALMOST_ONE)
        return 0.0


@dataclass(frozen=True)
class SolverConfig:
    family: SeminormFamily
    map: object
    y0: np.ndarray
    tnorm: TNorm = DEFAULT_TNORM
    schedule: LambdaSchedule = field(default_factory=LambdaSchedule)
    t_probe: float = 1.0
    alpha_tol: float = 1e-9
    max_iters: int = 1000
    cauchy_window: int = 50

    def __post_init__(self):
        object.__setattr__(self, "y0", as_point(self.y0, self.family.dim, "y0"))
        if self.map.dim != self.family.dim:
            raise DomainError("map", f"dimension {self.map.dim} does not match family dimension {self.family.dim}")
        if not (self.t_probe > 0 and math.isfinite(self.t_probe)):
            raise DomainError("t_probe", "must be positive and finite")
        if not 0 < self.alpha_tol < 1:
            raise DomainError("alpha_tol", "must lie in (0, 1)")
        if self.max_iters < 1:
            raise DomainError("max_iters", "must be >= 1")
        if self.cauchy_window < 1:
            raise DomainError("cauchy_window", "must be >= 1")
        sep = is_separating(self.family)
        if not sep.separating:
            raise DomainError("seminorms", f"family is not separating; witness {sep.witness.tolist()}")

    @property
    def fuzzy(self) -> List[FuzzySeminorm]:
        return [FuzzySeminorm(q) for q in self.family]

    @property
    def classical_tolerance(self) -> float:
        """q-radius equivalent of the stopping threshold."""
        return level_radius(self.t_probe, self.alpha_tol)

    def with_start(self, y0) -> "SolverConfig":
        return SolverConfig(
            self.family, self.map, y0, self.tnorm, self.schedule, self.t_probe, self.alpha_tol,
            self.max_iters, self.cauchy_window,
        )


class Termination(enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class StepRecord:
    n: int
    y: np.ndarray
    residual_step: np.ndarray
    residual_fix: np.ndarray
    membership_step: np.ndarray
    membership_fix: np.ndarray


@dataclass
class IterationTrace:
    steps: List[StepRecord] = field(default_factory=list)
    terminated: Termination = Termination.MAX_ITERS
    diverged_at: Optional[int] = None

    def __len__(self):
        return len(self.steps)

    def points(self) -> np.ndarray:
        return np.array([s.y for s in self.steps])

    def column(self, name: str) -> np.ndarray:
        """``(n_steps, n_seminorms)`` array of one recorded quantity."""
        return np.array([getattr(s, name) for s in self.steps])

    def to_csv(self) -> str:
        if not self.steps:
            return ""
        d = self.steps[0].y.size
        k = self.steps[0].residual_step.size
        header = ["n"] + [f"y_{j}" for j in range(d)]
        for i in range(k):
            header += [f"q{i}_step", f"q{i}_fix", f"p{i}_step", f"p{i}_fix"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for s in self.steps:
            row = [str(s.n)] + [f"{v:.17g}" for v in s.y]
            for i in range(k):
                row += [f"{x:.17g}" for x in (s.residual_step[i], s.residual_fix[i], s.membership_step[i], s.membership_fix[i])]
            writer.writerow(row)
        return buf.getvalue()


@dataclass
class FixedPointResult:
    point: np.ndarray
    trace: IterationTrace
    oracle_point: Optional[np.ndarray] = None
    oracle_gap: Optional[float] = None

    @property
    def converged(self) -> bool:
        return self.trace.terminated is Termination.CONVERGED


def oracle_affine_fixed_point(F: AffineMap) -> np.ndarray:
    """Solve ``(I - A) x = b`` by Gaussian elimination with partial pivoting.

    Independent of the iteration and of every fuzzy quantity.
    """
    n = F.dim
    M = np.eye(n) - F.A
    rhs = F.b.astype(float).copy()
    M = M.copy()
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(M[col:, col])))
        if abs(M[pivot, col]) < PIVOT_THRESHOLD:
            raise SingularSystemError("I - A is singular: no unique fixed point")
        if pivot != col:
            M[[col, pivot]] = M[[pivot, col]]
            rhs[[col, pivot]] = rhs[[pivot, col]]
        for row in range(col + 1, n):
            factor = M[row, col] / M[col, col]
            if factor:
                M[row, col:] -= factor * M[col, col:]
                rhs[row] -= factor * rhs[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (rhs[row] - M[row, row + 1:] @ x[row + 1:]) / M[row, row]
    return x


def _blown_up(y: np.ndarray) -> bool:
    return not np.all(np.isfinite(y)) or bool(np.any(np.abs(y) > DIVERGENCE_BOUND))


def iterate(cfg: SolverConfig) -> FixedPointResult:
    family = list(cfg.family)
    fuzzy = cfg.fuzzy
    F = cfg.map
    threshold = 1.0 - cfg.alpha_tol
    trace = IterationTrace()
    y = cfg.y0.copy()

    for n in range(cfg.max_iters):
        fy = F(y)
        if _blown_up(fy):
            trace.terminated, trace.diverged_at = Termination.DIVERGED, n
            break
        lam = cfg.schedule(n)
        y_next = fy if lam == 0.0 else lam * y + (1.0 - lam) * fy
        if _blown_up(y_next):
            trace.terminated, trace.diverged_at = Termination.DIVERGED, n
            break
        step, fix = y_next - y, y - fy
        r_step = np.array([q.evaluate(step) for q in family])
        r_fix = np.array([q.evaluate(fix) for q in family])
        m_step = np.array([p(step, cfg.t_probe) for p in fuzzy])
        m_fix = np.array([p(fix, cfg.t_probe) for p in fuzzy])
        trace.steps.append(StepRecord(n, y, r_step, r_fix, m_step, m_fix))
        y = y_next
        if np.all(m_step > threshold) and np.all(m_fix > threshold):
            trace.terminated = Termination.CONVERGED
            break

    # the last iterate computed, i.e. y_{n+1} of the final record
    point = y
    result = FixedPointResult(point, trace)
    if isinstance(F, AffineMap):
        try:
            result.oracle_point = oracle_affine_fixed_point(F)
        except SingularSystemError:
            pass
        else:
            result.oracle_gap = float(np.max(np.abs(point - result.oracle_point)))
    return result


def picard(F, y0, steps: int) -> np.ndarray:
    """Plain ``y <- F(y)`` loop, for cross-checking the zero schedule."""
    ys = [np.asarray(y0, dtype=float)]
    for _ in range(steps):
        ys.append(F(ys[-1]))
    return np.array(ys)


# --- diagnostics ------------------------------------------------------------


@dataclass
class MonotonicityReport:
    monotone: bool
    first_violation: Optional[tuple] = None  # (n, seminorm index)


def residual_monotonicity(trace: IterationTrace, tol: float = MONOTONE_TOL) -> MonotonicityReport:
    """Is ``membership_fix`` nondecreasing in n for every seminorm?"""
    if len(trace) < 2:
        raise DomainError("trace", "needs at least 2 steps")
    m = trace.column("membership_fix")
    drops = m[:-1] - m[1:] > tol
    if not np.any(drops):
        return MonotonicityReport(True)
    n, i = np.argwhere(drops)[0]
    return MonotonicityReport(False, (int(n) + 1, int(i)))


def geometric_envelope_holds(trace: IterationTrace, lipschitz: Sequence[float], rel: float = 1e-9) -> bool:
    """``q_i(y_{n+1} - y_n) <= L_i^n q_i(y_1 - y_0)`` at every recorded step."""
    r = trace.column("residual_step")
    if r.size == 0:
        return True
    L = np.asarray(lipschitz, dtype=float)
    n = np.arange(len(r))[:, None]
    bound = L[None, :] ** n * r[0][None, :] * (1.0 + rel)
    return bool(np.all(r <= bound))


@dataclass
class CauchyReport:
    clean: bool
    burn_in: int
    pairs_scanned: int
    offending_before_burn_in: int
    offending_after_burn_in: int
    first_offending: Optional[tuple] = None  # (n, m, seminorm index) at or beyond burn-in


def cauchy_burn_in(first_step: Sequence[float], lipschitz: Sequence[float], radius: float) -> int:
    """Smallest N with ``L^N q(y_1 - y_0) / (1 - L) < radius`` for every seminorm."""
    N = 0
    for r0, L in zip(first_step, lipschitz):
        if not 0 <= L < 1:
            raise DomainError("lipschitz", "burn-in needs 0 <= L < 1")
        tail = r0 / (1.0 - L)
        if tail < radius:
            continue
        if L == 0:
            # 0^0 = 1: only the first step can be long
            N = max(N, 1)
            continue
        N = max(N, int(math.floor(math.log(radius / tail) / math.log(L))) + 1)
    return N


def cauchy_diagnostic(
    trace: IterationTrace,
    family: SeminormFamily,
    epsilon: float,
    delta: float,
    alpha: float,
    beta: float,
    lipschitz: Optional[Sequence[float]] = None,
    window: Optional[int] = None,
) -> CauchyReport:
    """Scan for index pairs n < m with ``p(y_n - y_m, eps + delta/2) <= 1 - (alpha + beta/2)``.

    Such a pair is the witness a non-Cauchy sequence must keep producing.
    With per-seminorm Lipschitz constants the scan tolerates offending pairs
    before the burn-in index derived from the geometric tail bound; without
    them the burn-in is 0.
    """
    if not alpha + beta < 1:
        raise DomainError("beta", "alpha + beta must be < 1")
    level = epsilon + delta / 2.0
    cut = 1.0 - (alpha + beta / 2.0)
    pts = trace.points()
    burn_in = 0
    if lipschitz is not None and len(trace) >= 1:
        burn_in = cauchy_burn_in(trace.steps[0].residual_step, lipschitz, level_radius(level, alpha + beta / 2.0))
    window = len(pts) if window is None else window
    fuzzy = [FuzzySeminorm(q) for q in family]
    before = after = scanned = 0
    first = None
    for n in range(len(pts) - 1):
        m_hi = min(len(pts), n + 1 + window)
        diffs = pts[n] - pts[n + 1:m_hi]
        scanned += len(diffs)
        for i, p in enumerate(fuzzy):
            memb = p.evaluate_many(diffs, np.full(len(diffs), level))
            hits = np.flatnonzero(memb <= cut)
            if not hits.size:
                continue
            if n < burn_in:
                before += hits.size
            else:
                after += hits.size
                if first is None:
                    first = (n, n + 1 + int(hits[0]), i)
    return CauchyReport(after == 0, burn_in, scanned, before, after, first)


@dataclass
class FixedPointCheck:
    holds: bool
    membership: float
    residual: float

    def __bool__(self):
        return self.holds


def verify_fixed_point(U, F, p: FuzzySeminorm, t: float, alpha_tol: float) -> FixedPointCheck:
    """``p(U - F(U), t) > 1 - alpha_tol``, with the classical residual alongside."""
    U = as_point(U, p.dim, "U")
    gap = U - apply_map(F, U)
    membership = p(gap, t)
    return FixedPointCheck(membership > 1.0 - alpha_tol, membership, p.base.evaluate(gap))


@dataclass
class RunSummary:
    start: np.ndarray
    terminated: Termination
    point: Optional[np.ndarray]
    iterations: int


@dataclass
class UniquenessReport:
    runs: List[RunSummary]
    max_distance: Optional[float]
    min_membership: Optional[float]
    min_chain_bound: Optional[float]
    memberships_ok: bool

    @property
    def all_converged(self) -> bool:
        return all(r.terminated is Termination.CONVERGED for r in self.runs)

    @property
    def failures(self) -> List[int]:
        return [k for k, r in enumerate(self.runs) if r.terminated is Termination.DIVERGED]


def uniqueness_probe(
    cfg: SolverConfig, starts: Sequence, alpha_tol: Optional[float] = None, workers: int = 1
) -> UniquenessReport:
    """Run from every start and compare the limits pairwise.

    Besides the sup distance, each pair gets its direct membership
    ``p(U_i - U_j, t)`` and the t-norm chain lower bound
    ``p(U_i - F U_i, t/2) * p(F U_i - U_j, t/2)``.  Diverged runs are
    reported and left out of the pairwise comparison.
    """
    if len(starts) < 2:
        raise DomainError("starts", "need at least 2 starts")
    alpha_tol = cfg.alpha_tol if alpha_tol is None else alpha_tol
    cfgs = [cfg.with_start(s) for s in starts]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(iterate, cfgs))
    else:
        results = [iterate(c) for c in cfgs]

    runs = [RunSummary(c.y0, r.trace.terminated, None if r.trace.terminated is Termination.DIVERGED else r.point, len(r.trace))
            for c, r in zip(cfgs, results)]
    pts = [r.point for r in runs if r.point is not None]
    if len(pts) < 2:
        return UniquenessReport(runs, None, None, None, False)

    fuzzy = cfg.fuzzy
    t = cfg.t_probe
    max_dist, min_memb, min_chain = 0.0, 1.0, 1.0
    for i in range(len(pts)):
        fu = cfg.map(pts[i])
        for j in range(len(pts)):
            if i == j:
                continue
            max_dist = max(max_dist, float(np.max(np.abs(pts[i] - pts[j]))))
            for p in fuzzy:
                min_memb = min(min_memb, p(pts[i] - pts[j], t))
                chain = float(cfg.tnorm(p(pts[i] - fu, t / 2), p(fu - pts[j], t / 2)))
                min_chain = min(min_chain, chain)
    return UniquenessReport(runs, max_dist, min_memb, min_chain, min_memb >= 1.0 - alpha_tol)
