"""Strict JSON scenario files.

A scenario names a seminorm family, a t-norm, a self-map, a start point and
the solver knobs.  Unknown keys are rejected; every error names the field
path it refers to (``map.A``, ``seminorms[1].axis``, ...).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, List, Optional

import numpy as np

from .contraction import MAP_REGISTRY, AffineMap, RegisteredMap
from .errors import FuzzyFixpointError
from .seminorms import EllipsoidGauge, SeminormFamily, WeightedAbs, WeightedSup
from .solver import LambdaSchedule, SolverConfig
from .tnorm import TNorm


class ScenarioError(FuzzyFixpointError):
    exit_code = 2

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ScenarioNotFound(ScenarioError):
    pass


class ScenarioSyntaxError(ScenarioError):
    pass


class UnknownKeyError(ScenarioError):
    pass


class MissingKeyError(ScenarioError):
    pass


class ScenarioTypeError(ScenarioError):
    pass


class DimensionError(ScenarioError):
    pass


class RangeError(ScenarioError):
    pass


TOP_KEYS = {"dim", "seminorms", "tnorm", "map", "y0", "schedule", "t_probe", "alpha_tol", "max_iters", "seed"}
REQUIRED_TOP = {"dim", "seminorms", "map"}
SEMINORM_KEYS = {"abs": {"kind", "axis", "weight"}, "sup": {"kind", "weights"}, "ellipsoid": {"kind", "semi_axes"}}
MAP_KEYS = {"affine": {"kind", "A", "b"}, "registered": {"kind", "name"}, "random_affine": {"kind", "spectral_radius", "b"}}
SCHEDULE_KEYS = {"zero": {"kind"}, "constant": {"kind", "value"}, "harmonic": {"kind"}}


# --- field helpers -----------------------------------------------------------


def _keys(obj: Any, path: str, allowed: set, required: set = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise ScenarioTypeError(path, f"expected an object, got {type(obj).__name__}")
    extra = sorted(set(obj) - allowed)
    if extra:
        where = f"{path}.{extra[0]}" if path else extra[0]
        raise UnknownKeyError(where, f"unknown key (allowed: {', '.join(sorted(allowed))})")
    missing = sorted(required - set(obj))
    if missing:
        where = f"{path}.{missing[0]}" if path else missing[0]
        raise MissingKeyError(where, "required key is missing")
    return obj


def _real(x: Any, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ScenarioTypeError(path, f"expected a number, got {x!r}")
    x = float(x)
    if not math.isfinite(x):
        raise RangeError(path, "must be finite")
    return x


def _int(x: Any, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ScenarioTypeError(path, f"expected an integer, got {x!r}")
    return x


def _vector(x: Any, path: str, dim: Optional[int] = None) -> List[float]:
    if not isinstance(x, list):
        raise ScenarioTypeError(path, "expected a list of numbers")
    out = [_real(v, f"{path}[{i}]") for i, v in enumerate(x)]
    if dim is not None and len(out) != dim:
        raise DimensionError(path, f"length {len(out)} does not match dim {dim}")
    return out


def _kind(obj: dict, path: str, table: dict) -> str:
    kind = obj.get("kind") if isinstance(obj, dict) else None
    if kind not in table:
        raise RangeError(f"{path}.kind", f"expected one of {sorted(table)}, got {kind!r}")
    return kind


# --- scenario ------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    dim: int
    seminorms: list
    map: dict
    tnorm: str = "min"
    y0: Optional[list] = None
    schedule: dict = field(default_factory=lambda: {"kind": "zero"})
    t_probe: float = 1.0
    alpha_tol: float = 1e-9
    max_iters: int = 1000
    seed: int = 0

    def to_dict(self) -> dict:
        """Canonical, fully explicit form; ``parse_scenario_dict`` inverts it."""
        return {
            "dim": self.dim,
            "seminorms": self.seminorms,
            "tnorm": self.tnorm,
            "map": self.map,
            "y0": self.start,
            "schedule": self.schedule,
            "t_probe": self.t_probe,
            "alpha_tol": self.alpha_tol,
            "max_iters": self.max_iters,
            "seed": self.seed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @property
    def start(self) -> list:
        return list(self.y0) if self.y0 is not None else [0.0] * self.dim

    def family(self) -> SeminormFamily:
        members = []
        for d in self.seminorms:
            if d["kind"] == "abs":
                members.append(WeightedAbs(self.dim, d["axis"], d.get("weight", 1.0)))
            elif d["kind"] == "sup":
                members.append(WeightedSup(tuple(d.get("weights", [1.0] * self.dim))))
            else:
                members.append(EllipsoidGauge(tuple(d.get("semi_axes", [1.0] * self.dim))))
        return SeminormFamily(tuple(members))

    def tnorm_kind(self) -> TNorm:
        return TNorm(self.tnorm)

    def map_spec(self):
        m = self.map
        if m["kind"] == "registered":
            return RegisteredMap(m["name"], self.dim)
        if m["kind"] == "affine":
            return AffineMap(np.array(m["A"], dtype=float), np.array(m.get("b", [0.0] * self.dim)))
        A = random_symmetric_contraction(self.dim, m["spectral_radius"], self.seed)
        if "b" in m:
            b = np.array(m["b"], dtype=float)
        else:
            b = np.random.default_rng([self.seed, 1]).standard_normal(self.dim)
        return AffineMap(A, b)

    def schedule_spec(self) -> LambdaSchedule:
        return LambdaSchedule(self.schedule["kind"], self.schedule.get("value", 0.0))

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            family=self.family(),
            map=self.map_spec(),
            y0=np.array(self.start),
            tnorm=self.tnorm_kind(),
            schedule=self.schedule_spec(),
            t_probe=self.t_probe,
            alpha_tol=self.alpha_tol,
            max_iters=self.max_iters,
        )


def random_symmetric_contraction(dim: int, spectral_radius: float, seed: int) -> np.ndarray:
    """Symmetric matrix whose largest |eigenvalue| is exactly ``spectral_radius``.

    Symmetric, so its Euclidean operator norm equals its spectral radius.
    """
    rng = np.random.default_rng([seed, 0])
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    eig = rng.uniform(-spectral_radius, spectral_radius, size=dim)
    eig[int(np.argmax(np.abs(eig)))] = spectral_radius
    A = (Q * eig) @ Q.T
    return (A + A.T) / 2.0


def _parse_seminorm(obj: Any, path: str, dim: int) -> dict:
    kind = _kind(obj, path, SEMINORM_KEYS)
    _keys(obj, path, SEMINORM_KEYS[kind], {"kind", "axis"} if kind == "abs" else {"kind"})
    out: dict = {"kind": kind}
    if kind == "abs":
        axis = _int(obj["axis"], f"{path}.axis")
        if not 0 <= axis < dim:
            raise DimensionError(f"{path}.axis", f"axis {axis} outside 0..{dim - 1}")
        out["axis"] = axis
        weight = _real(obj.get("weight", 1.0), f"{path}.weight")
        if weight <= 0:
            raise RangeError(f"{path}.weight", "must be positive")
        out["weight"] = weight
    elif kind == "sup":
        w = _vector(obj.get("weights", [1.0] * dim), f"{path}.weights", dim)
        if any(x < 0 for x in w):
            raise RangeError(f"{path}.weights", "must be nonnegative")
        out["weights"] = w
    else:
        a = _vector(obj.get("semi_axes", [1.0] * dim), f"{path}.semi_axes", dim)
        if any(x <= 0 for x in a):
            raise RangeError(f"{path}.semi_axes", "must be positive")
        out["semi_axes"] = a
    return out


def _parse_map(obj: Any, dim: int) -> dict:
    kind = _kind(obj, "map", MAP_KEYS)
    required = {"kind", "A"} if kind == "affine" else {"kind", "name"} if kind == "registered" else {"kind", "spectral_radius"}
    _keys(obj, "map", MAP_KEYS[kind], required)
    out: dict = {"kind": kind}
    if kind == "registered":
        name = obj["name"]
        if name not in MAP_REGISTRY:
            raise RangeError("map.name", f"unknown registered map {name!r} (known: {', '.join(sorted(MAP_REGISTRY))})")
        out["name"] = name
        return out
    if kind == "affine":
        A = obj["A"]
        if not isinstance(A, list) or len(A) != dim:
            raise DimensionError("map.A", f"expected {dim} rows for dim {dim}")
        out["A"] = [_vector(row, f"map.A[{i}]", None) for i, row in enumerate(A)]
        if any(len(row) != dim for row in out["A"]):
            raise DimensionError("map.A", f"expected a {dim}x{dim} matrix")
    else:
        rho = _real(obj["spectral_radius"], "map.spectral_radius")
        if not 0 <= rho < 1:
            raise RangeError("map.spectral_radius", "must lie in [0, 1)")
        out["spectral_radius"] = rho
    if "b" in obj:
        out["b"] = _vector(obj["b"], "map.b", dim)
    elif kind == "affine":
        out["b"] = [0.0] * dim
    return out


def _parse_schedule(obj: Any) -> dict:
    kind = _kind(obj, "schedule", SCHEDULE_KEYS)
    _keys(obj, "schedule", SCHEDULE_KEYS[kind], {"kind", "value"} if kind == "constant" else {"kind"})
    out: dict = {"kind": kind}
    if kind == "constant":
        value = _real(obj["value"], "schedule.value")
        if not 0 <= value < 1:
            raise RangeError("schedule.value", "must lie in [0, 1)")
        out["value"] = value
    return out


def parse_scenario_dict(raw: Any) -> Scenario:
    _keys(raw, "", TOP_KEYS, REQUIRED_TOP)
    dim = _int(raw["dim"], "dim")
    if dim < 1:
        raise RangeError("dim", "must be >= 1")

    sems = raw["seminorms"]
    if not isinstance(sems, list) or not sems:
        raise ScenarioTypeError("seminorms", "expected a nonempty list")
    seminorms = [_parse_seminorm(s, f"seminorms[{i}]", dim) for i, s in enumerate(sems)]

    tnorm = raw.get("tnorm", "min")
    if tnorm not in {k.value for k in TNorm}:
        raise RangeError("tnorm", f"expected one of min, product, lukasiewicz, got {tnorm!r}")

    map_desc = _parse_map(raw["map"], dim)
    y0 = _vector(raw["y0"], "y0", dim) if "y0" in raw else [0.0] * dim
    schedule = _parse_schedule(raw.get("schedule", {"kind": "zero"}))

    t_probe = _real(raw.get("t_probe", 1.0), "t_probe")
    if t_probe <= 0:
        raise RangeError("t_probe", "must be positive")
    alpha_tol = _real(raw.get("alpha_tol", 1e-9), "alpha_tol")
    if not 0 < alpha_tol < 1:
        raise RangeError("alpha_tol", f"must lie in (0, 1), got {alpha_tol!r}")
    max_iters = _int(raw.get("max_iters", 1000), "max_iters")
    if max_iters < 1:
        raise RangeError("max_iters", "must be >= 1")
    seed = _int(raw.get("seed", 0), "seed")
    if seed < 0:
        raise RangeError("seed", "must be >= 0")

    scenario = Scenario(dim, seminorms, map_desc, tnorm, y0, schedule, t_probe, alpha_tol, max_iters, seed)
    try:
        scenario.family()
        scenario.map_spec()
    except FuzzyFixpointError as exc:
        raise RangeError("", str(exc)) from exc
    return scenario


def parse_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ScenarioNotFound(str(path), "no such file") from None
    except OSError as exc:
        raise ScenarioNotFound(str(path), exc.strerror or "unreadable") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(str(path), f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_scenario_dict(raw)


def shipped_scenario_paths() -> List[Path]:
    root = resources.files("fuzzy_fixpoint") / "scenarios"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def shipped_scenario(name: str) -> Path:
    for p in shipped_scenario_paths():
        if p.stem == name:
            return p
    raise ScenarioNotFound(name, "no shipped scenario with this name")
