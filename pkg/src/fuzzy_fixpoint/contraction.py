"""Self-maps, Lipschitz bounds relative to a seminorm, and contraction certificates.

Under the induced construction ``p(x, s) = s / (s + q(x))`` the contraction
implication reduces to two classical radii.  The hypothesis
``p(y - z, eps + delta) > 1 - (alpha + beta)`` is the same as
``q(y - z) < (eps + delta)(alpha + beta) / (1 - alpha - beta)`` and the
conclusion ``p(F y - F z, eps) > 1 - alpha`` follows once
``q(y - z) < eps * alpha / (L (1 - alpha))``.  A certificate is a pair
(delta, beta) for which the first radius does not exceed the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CertificationRefused, DomainError, NotAContraction, UnknownMapError
from .fuzzy_space import FuzzySeminorm, level_radius
from .seminorms import ClassicalSeminorm, EllipsoidGauge, WeightedAbs, WeightedSup, as_point

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_MAX = 100_000
# fraction of the admissible radius given up so rounding near the
# threshold cannot flip the implication
CERTIFICATE_SAFETY = 1e-6


# --- maps --------------------------------------------------------------------

MAP_REGISTRY: Dict[str, Callable[[np.ndarray], np.ndarray]] = {}


def register_map(name: str):
    def wrap(fn):
        MAP_REGISTRY[name] = fn
        return fn

    return wrap


@register_map("identity")
def _identity(y):
    return y.copy()


@register_map("negate")
def _negate(y):
    return -y


@register_map("halving")
def _halving(y):
    return 0.5 * y


@register_map("cos_half")
def _cos_half(y):
    # Lipschitz 1/2 in every weighted sup seminorm
    return 0.5 * np.cos(y)


@register_map("tanh_shift")
def _tanh_shift(y):
    return 0.6 * np.tanh(y) + 1.0


@dataclass(frozen=True, eq=False)
class AffineMap:
    """``y -> A y + b``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DomainError("A", f"must be square, got shape {A.shape}")
        if A.shape[0] != b.size:
            raise DomainError("b", f"length {b.size} does not match A of size {A.shape[0]}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise DomainError("A", "entries must be finite")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.b.size

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.A @ y + self.b

    def __eq__(self, other):
        return isinstance(other, AffineMap) and np.array_equal(self.A, other.A) and np.array_equal(self.b, other.b)

    def __hash__(self):
        return hash((self.A.tobytes(), self.b.tobytes()))


@dataclass(frozen=True)
class RegisteredMap:
    name: str
    dim: int
    fn: Callable = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        try:
            object.__setattr__(self, "fn", MAP_REGISTRY[self.name])
        except KeyError:
            raise UnknownMapError(self.name) from None

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(y), dtype=float)


def apply_map(F, y) -> np.ndarray:
    return F(as_point(y, F.dim))


# --- Lipschitz constants ------------------------------------------------------


@dataclass(frozen=True)
class LipschitzBound:
    value: float
    exact: bool  # False: a sampled supremum, i.e. only a lower bound


def spectral_norm(M: np.ndarray, seed: int = 0, tol: float = POWER_ITERATION_TOL) -> float:
    """Largest singular value of ``M`` by power iteration on ``M^T M``."""
    G = M.T @ M
    if not np.any(G):
        return 0.0
    x = np.random.default_rng(seed).standard_normal(G.shape[0]) + 1.0
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(POWER_ITERATION_MAX):
        gx = G @ x
        norm = np.linalg.norm(gx)
        if norm == 0.0:
            # started in the null space; restart along the largest diagonal entry
            x = np.zeros_like(x)
            x[int(np.argmax(np.diag(G)))] = 1.0
            continue
        x = gx / norm
        new_sigma = math.sqrt(float(x @ G @ x))
        if abs(new_sigma - sigma) <= tol:
            return new_sigma
        sigma = new_sigma
    return sigma


def _kernel_preserved(A: np.ndarray, q: ClassicalSeminorm) -> bool:
    axes = q.kernel_axes()
    if axes is None:
        return True
    seen = sorted(set(range(q.dim)) - axes)
    blind = sorted(axes)
    return not np.any(A[np.ix_(seen, blind)])


def _sampled_lipschitz(F, q: ClassicalSeminorm, sample_count: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    d = q.dim
    ys = rng.standard_normal((sample_count, d)) * 10.0 ** rng.uniform(-2, 2, size=(sample_count, 1))
    dz = rng.standard_normal((sample_count, d)) * 10.0 ** rng.uniform(-4, 1, size=(sample_count, 1))
    zs = ys + dz
    num = q.evaluate_many(np.array([F(y) - F(z) for y, z in zip(ys, zs)]))
    den = q.evaluate_many(ys - zs)
    ok = den > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(num[ok] / den[ok]))


def operator_lipschitz(F, q: ClassicalSeminorm, sample_count: int = 10_000, seed: int = 0) -> LipschitzBound:
    """Bound ``sup q(F y - F z) / q(y - z)`` over pairs with ``q(y - z) != 0``.

    Affine maps with a shipped seminorm get the exact value.  Anything else
    gets a sampled supremum, flagged ``exact=False``.

    Raises
    ------
    CertificationRefused
        If an affine map sends a kernel vector of ``q`` outside the kernel,
        in which case the ratio is unbounded.
    """
    if F.dim != q.dim:
        raise DomainError("map", f"dimension {F.dim} does not match seminorm dimension {q.dim}")
    if not isinstance(F, AffineMap):
        return LipschitzBound(_sampled_lipschitz(F, q, sample_count, seed), exact=False)

    A = F.A
    if not _kernel_preserved(A, q):
        raise CertificationRefused(f"map does not preserve the kernel of {q.describe()}")
    if isinstance(q, WeightedAbs):
        return LipschitzBound(abs(float(A[q.axis, q.axis])), exact=True)
    if isinstance(q, WeightedSup):
        w = np.asarray(q.weights)
        seen = w > 0
        if not np.any(seen):
            return LipschitzBound(0.0, exact=True)
        scaled = np.abs(A[np.ix_(seen, seen)]) * w[seen][:, None] / w[seen][None, :]
        return LipschitzBound(float(np.max(scaled.sum(axis=1))), exact=True)
    if isinstance(q, EllipsoidGauge):
        a = np.asarray(q.semi_axes)
        return LipschitzBound(spectral_norm(A * a[None, :] / a[:, None], seed), exact=True)
    return LipschitzBound(_sampled_lipschitz(F, q, sample_count, seed), exact=False)


# --- certificates -------------------------------------------------------------


def hypothesis_radius(epsilon: float, delta: float, alpha: float, beta: float) -> float:
    """q(y - z) below this  <=>  p(y - z, eps + delta) > 1 - (alpha + beta)."""
    return level_radius(epsilon + delta, alpha + beta)


def admissible_radius(epsilon: float, alpha: float, lipschitz: float) -> float:
    """q(y - z) below this forces p(F y - F z, eps) > 1 - alpha."""
    if lipschitz == 0:
        return math.inf
    return level_radius(epsilon, alpha) / lipschitz


def max_admissible_delta(lipschitz: float, epsilon: float, alpha: float, beta: float) -> float:
    """Largest delta keeping the hypothesis radius within the admissible one."""
    if lipschitz == 0:
        return math.inf
    return admissible_radius(epsilon, alpha, lipschitz) * (1.0 - alpha - beta) / (alpha + beta) - epsilon


@dataclass(frozen=True)
class ContractionCertificate:
    seminorm_index: Optional[int]
    epsilon: float
    alpha: float
    delta: float
    beta: float
    lipschitz: float
    proven: bool = True

    @property
    def hypothesis_radius(self) -> float:
        return hypothesis_radius(self.epsilon, self.delta, self.alpha, self.beta)

    @property
    def admissible_radius(self) -> float:
        return admissible_radius(self.epsilon, self.alpha, self.lipschitz)

    def holds(self) -> bool:
        return (
            self.delta > 0
            and 0 < self.beta < 1
            and self.alpha + self.beta < 1
            and self.hypothesis_radius <= self.admissible_radius
        )

    def as_dict(self) -> dict:
        return {
            "seminorm_index": self.seminorm_index,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "delta": self.delta,
            "beta": self.beta,
            "lipschitz": self.lipschitz,
            "proven": self.proven,
            "hypothesis_radius": self.hypothesis_radius,
            "admissible_radius": self.admissible_radius,
        }


def choose_certificate(
    lipschitz: float, epsilon: float, alpha: float, seminorm_index: Optional[int] = None, proven: bool = True
) -> ContractionCertificate:
    if not epsilon > 0:
        raise DomainError("epsilon", "must be positive")
    if not 0 < alpha < 1:
        raise DomainError("alpha", "must lie in (0, 1)")
    if not lipschitz < 1:
        raise NotAContraction(lipschitz)

    if lipschitz == 0:
        beta = 0.1 * (1.0 - alpha)
        delta = epsilon
    else:
        ratio = alpha / (lipschitz * (1.0 - alpha))
        beta_max = ratio / (1.0 + ratio) - alpha
        beta = min(0.1 * (1.0 - alpha), 0.5 * beta_max)
        delta_max = max_admissible_delta(lipschitz, epsilon, alpha, beta)
        delta = delta_max * (1.0 - CERTIFICATE_SAFETY)
        if not delta > 0:
            raise NotAContraction(lipschitz)
    return ContractionCertificate(seminorm_index, epsilon, alpha, delta, beta, lipschitz, proven)


def certify_affine_contraction(
    F, q: ClassicalSeminorm, epsilon: float, alpha: float, seminorm_index: Optional[int] = None,
    sample_count: int = 10_000, seed: int = 0,
) -> ContractionCertificate:
    """Pick (delta, beta) making the contraction implication hold for all pairs.

    beta is the smaller of ``0.1 (1 - alpha)`` and half the largest feasible
    beta; delta is then the largest value the certificate inequality allows,
    less a relative safety margin of 1e-6.  Non-affine maps go through the
    same arithmetic on a sampled Lipschitz estimate and come back with
    ``proven=False``.
    """
    bound = operator_lipschitz(F, q, sample_count, seed)
    return choose_certificate(bound.value, epsilon, alpha, seminorm_index, proven=bound.exact)


# --- empirical checks ----------------------------------------------------------


def sample_pairs(
    dim: int, q: ClassicalSeminorm, radius: float, count: int, seed: int
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Seeded pairs (y, z) with ``q(y - z)`` concentrated around ``radius``.

    Half the pairs land within a factor of 2 of the radius on either side,
    the rest are spread from 1e-4 to 1e2 times it; a few have y == z.
    """
    rng = np.random.default_rng(seed)
    ys = rng.standard_normal((count, dim)) * 3.0
    dirs = rng.standard_normal((count, dim))
    qd = q.evaluate_many(dirs)
    dirs = np.where(qd[:, None] > 0, dirs / np.where(qd > 0, qd, 1.0)[:, None], dirs)
    if not math.isfinite(radius) or radius <= 0:
        radius = 1.0
    factor = np.where(
        np.arange(count) % 2 == 0, 2.0 ** rng.uniform(-1, 1, size=count), 10.0 ** rng.uniform(-4, 2, size=count)
    )
    zs = ys - dirs * (radius * factor)[:, None]
    zs[: max(1, count // 100)] = ys[: max(1, count // 100)]
    return list(zip(ys, zs))


@dataclass
class ContractivityReport:
    passed: bool
    checked: int
    violations: int
    first_violation: Optional[dict] = None
    proven: bool = False  # a sampled check never proves the universal statement


def check_contractive(F, p: FuzzySeminorm, epsilon: float, delta: float, pairs: Sequence) -> ContractivityReport:
    """Check strict improvement ``p(F y - F z, eps) > p(y - z, eps + delta)``.

    Where ``p(y - z, eps + delta) == 1`` the images must also be at
    membership 1.
    """
    if not pairs:
        raise DomainError("pairs", "must be nonempty")
    ys = np.array([y for y, _ in pairs], dtype=float)
    zs = np.array([z for _, z in pairs], dtype=float)
    fy = np.array([F(y) for y in ys])
    fz = np.array([F(z) for z in zs])
    n = len(ys)
    before = p.evaluate_many(ys - zs, np.full(n, epsilon + delta))
    after = p.evaluate_many(fy - fz, np.full(n, epsilon))
    ok = np.where(before == 1.0, after == 1.0, after > before)
    bad = np.flatnonzero(~ok)
    first = None
    if bad.size:
        k = int(bad[0])
        first = {"index": k, "y": ys[k].tolist(), "z": zs[k].tolist(), "before": float(before[k]), "after": float(after[k])}
    return ContractivityReport(not bad.size, n, int(bad.size), first)


@dataclass
class ImplicationReport:
    passed: bool
    checked: int
    hypotheses_met: int
    cap_excluded: int  # met the lower bound but not the cap 1 - alpha >= p(y - z, eps + delta)
    violations: int
    first_violation: Optional[dict] = None

    @property
    def cap_binding(self) -> bool:
        return self.cap_excluded > 0


def check_implication(F, p: FuzzySeminorm, cert: ContractionCertificate, pairs: Sequence) -> ImplicationReport:
    """Evaluate the two-sided contraction implication on ``pairs``.

    A pair is in scope when ``1 - alpha >= p(y - z, eps + delta) > 1 - (alpha + beta)``;
    it then must satisfy ``p(F y - F z, eps) > 1 - alpha``.
    """
    eps, dl, al, be = cert.epsilon, cert.delta, cert.alpha, cert.beta
    ys = np.array([y for y, _ in pairs], dtype=float)
    zs = np.array([z for _, z in pairs], dtype=float)
    fy = np.array([F(y) for y in ys])
    fz = np.array([F(z) for z in zs])
    n = len(ys)
    before = p.evaluate_many(ys - zs, np.full(n, eps + dl))
    after = p.evaluate_many(fy - fz, np.full(n, eps))
    lower = before > 1.0 - (al + be)
    capped = before <= 1.0 - al
    scope = lower & capped
    bad = np.flatnonzero(scope & ~(after > 1.0 - al))
    first = None
    if bad.size:
        k = int(bad[0])
        first = {"index": k, "y": ys[k].tolist(), "z": zs[k].tolist(), "before": float(before[k]), "after": float(after[k])}
    return ImplicationReport(
        not bad.size, n, int(scope.sum()), int((lower & ~capped).sum()), int(bad.size), first
    )
