"""Acceptance gate: one test function per criterion, summarised by conftest."""

import contextlib
import io
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import AFFINE_CONTRACTIONS, CERTIFIED_PICARD, CONTRACTIONS
from fuzzy_fixpoint.cli import main
from fuzzy_fixpoint.contraction import (
    AffineMap,
    certify_affine_contraction,
    check_contractive,
    check_implication,
    operator_lipschitz,
    sample_pairs,
)
from fuzzy_fixpoint.errors import NotAContraction
from fuzzy_fixpoint.fuzzy_space import FuzzySeminorm, check_fuzzy_axioms, fuzzy_eval, lattice_triangle_check
from fuzzy_fixpoint.scenario import shipped_scenario, shipped_scenario_paths
from fuzzy_fixpoint.seminorms import EllipsoidGauge, SeminormFamily, WeightedAbs, WeightedSup
from fuzzy_fixpoint.solver import (
    SolverConfig,
    Termination,
    cauchy_diagnostic,
    geometric_envelope_holds,
    iterate,
    residual_monotonicity,
    uniqueness_probe,
)
from fuzzy_fixpoint.tnorm import Axiom, TNorm, check_tnorm_axioms

SAMPLES = 10_000
SEED = 42


@contextlib.contextmanager
def within(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.3f}s, budget {seconds}s"


def test_ac01_tnorm_axioms():
    with within(1.0):
        all_reports = {tn: check_tnorm_axioms(tn, SAMPLES, SEED) for tn in TNorm}
    for tn, reports in all_reports.items():
        by_axiom = {r.axiom: r for r in reports}
        assert set(by_axiom) == {Axiom.COMMUTATIVITY, Axiom.ASSOCIATIVITY, Axiom.MONOTONICITY, Axiom.BOUNDARY_CONDITIONS}
        for r in reports:
            assert r.passed, f"{tn.value}: {r.describe()}"
            assert r.samples == SAMPLES + 125
        assert by_axiom[Axiom.ASSOCIATIVITY].tolerance == 1e-12
        assert by_axiom[Axiom.BOUNDARY_CONDITIONS].tolerance == 0.0
        assert by_axiom[Axiom.BOUNDARY_CONDITIONS].max_violation == 0.0


SEMINORM_KINDS = [
    FuzzySeminorm(WeightedAbs(3, 1, 2.0)),
    FuzzySeminorm(WeightedSup((1.0, 0.5, 2.0))),
    FuzzySeminorm(EllipsoidGauge((2.0, 1.0, 0.5))),
]


def test_ac02_fuzzy_seminorm_axioms():
    tn = TNorm.STANDARD_INTERSECTION
    with within(5.0):
        for p in SEMINORM_KINDS:
            lattice = lattice_triangle_check(p, tn)
            assert lattice.samples == 10_000
            assert lattice.passed, lattice.describe()
            reports = check_fuzzy_axioms(p, tn, SAMPLES, SEED)
            assert [r.axiom for r in reports] == [Axiom.NULLITY, Axiom.SCALING, Axiom.TRIANGLE, Axiom.MONOTONE_LIMIT]
            for r in reports:
                assert r.passed, r.describe()
                assert r.samples >= SAMPLES


@pytest.mark.parametrize("name", CONTRACTIONS)
@pytest.mark.parametrize("eps, alpha", [(1.0, 0.5), (0.1, 0.1), (2.0, 0.9)])
def test_ac03_contractive_consistency(load, name, eps, alpha):
    sc = load(name)
    cfg = sc.solver_config()
    with within(2.0):
        for i, q in enumerate(cfg.family):
            cert = certify_affine_contraction(cfg.map, q, eps, alpha, i, seed=sc.seed)
            assert cert.holds()
            p = FuzzySeminorm(q)
            pairs = sample_pairs(cfg.map.dim, q, cert.hypothesis_radius, SAMPLES, sc.seed)
            assert len(pairs) == SAMPLES
            contractive = check_contractive(cfg.map, p, cert.epsilon, cert.delta, pairs)
            assert contractive.passed and contractive.violations == 0 and contractive.checked == SAMPLES
            implication = check_implication(cfg.map, p, cert, pairs)
            assert implication.passed and implication.hypotheses_met > 0


def test_ac04_convergence():
    halving = SolverConfig(SeminormFamily((WeightedAbs(1, 0),)), AffineMap([[0.5]], [0.0]), [1.0], alpha_tol=1e-9)
    family = SeminormFamily((WeightedSup((1.0, 1.0)),))
    affine = SolverConfig(family, AffineMap([[0.5, 0.1], [0.0, 0.3]], [1.0, 1.0]), [0.0, 0.0], alpha_tol=1e-9)
    with within(1.0):
        results = [(cfg, iterate(cfg)) for cfg in (halving, affine)]
    for cfg, res in results:
        assert res.converged
        assert len(res.trace) <= 60
        assert np.all(res.trace.steps[-1].membership_fix > 1 - 1e-9)
        assert cfg.t_probe == 1.0
        L = [operator_lipschitz(cfg.map, q).value for q in cfg.family]
        assert geometric_envelope_holds(res.trace, L)


def test_ac05_oracle_equivalence(load):
    configs = [load(name).solver_config() for name in AFFINE_CONTRACTIONS]
    assert any(cfg.map.dim == 5 for cfg in configs)
    with within(1.0):
        results = [iterate(cfg) for cfg in configs]
    for res in results:
        assert res.converged
        assert res.oracle_point is not None
        assert res.oracle_gap <= 1e-8


def test_ac05_oracle_matches_numpy(load):
    for name in AFFINE_CONTRACTIONS:
        cfg = load(name).solver_config()
        res = iterate(cfg)
        F = cfg.map
        direct = np.linalg.solve(np.eye(F.dim) - F.A, F.b)
        assert np.max(np.abs(res.point - direct)) <= 1e-8


def test_ac05_random5_spectral_radius(load):
    F = load("random5").solver_config().map
    assert np.max(np.abs(np.linalg.eigvals(F.A))) == pytest.approx(0.7, abs=1e-12)


@pytest.mark.parametrize("name", CERTIFIED_PICARD)
def test_ac06_monotone_membership(load, name):
    cfg = load(name).solver_config()
    assert cfg.schedule.kind == "zero"
    for q in cfg.family:
        assert certify_affine_contraction(cfg.map, q, 1.0, 0.5).proven
    trace = iterate(cfg).trace
    report = residual_monotonicity(trace, tol=1e-12)
    assert report.monotone, report.first_violation


@pytest.mark.parametrize("name", CERTIFIED_PICARD)
def test_ac07_cauchy_clean(load, name):
    cfg = load(name).solver_config()
    res = iterate(cfg)
    assert res.converged
    L = [operator_lipschitz(cfg.map, q).value for q in cfg.family]
    report = cauchy_diagnostic(res.trace, cfg.family, 0.1, 0.1, 0.1, 0.1, lipschitz=L)
    assert report.clean and report.first_offending is None


def test_ac07_cauchy_negation_offends(load):
    cfg = load("negate").solver_config()
    assert cfg.y0.tolist() == [1.0]
    report = cauchy_diagnostic(iterate(cfg).trace, cfg.family, 0.1, 0.1, 0.1, 0.1)
    assert not report.clean
    n, m, i = report.first_offending
    assert n < m
    pts = iterate(cfg).trace.points()
    assert fuzzy_eval(FuzzySeminorm(cfg.family[i]), pts[n] - pts[m], 0.15) <= 0.85


@pytest.mark.parametrize("name", CONTRACTIONS)
def test_ac08_uniqueness(load, name):
    sc = load(name)
    cfg = sc.solver_config()
    rng = np.random.default_rng([sc.seed, 2])
    starts = [rng.standard_normal(cfg.family.dim) * 10.0 for _ in range(10)]
    report = uniqueness_probe(cfg, starts, alpha_tol=1e-9)
    assert report.all_converged
    assert report.max_distance <= 1e-8
    assert report.min_membership >= 1 - 1e-9
    assert report.memberships_ok


def test_ac09_identity_control(load):
    with pytest.raises(NotAContraction) as err:
        certify_affine_contraction(AffineMap([[1.0]], [0.0]), WeightedAbs(1, 0), 1.0, 0.5)
    assert err.value.lipschitz == 1.0
    cfg = load("identity").solver_config()
    assert np.array_equal(cfg.map.A, np.eye(1))
    with pytest.raises(NotAContraction):
        certify_affine_contraction(cfg.map, cfg.family[0], 1.0, 0.5)
    res = iterate(cfg)
    assert res.trace.terminated is Termination.MAX_ITERS
    assert len(res.trace) == cfg.max_iters


def test_ac09_broken_tnorm_witness():
    def average(u, v):
        return (u + v) / 2

    first = {r.axiom: r for r in check_tnorm_axioms(average, SAMPLES, SEED)}
    again = {r.axiom: r for r in check_tnorm_axioms(average, SAMPLES, SEED)}
    assoc = first[Axiom.ASSOCIATIVITY]
    assert not assoc.passed
    assert assoc.witness == again[Axiom.ASSOCIATIVITY].witness
    u, v, w = assoc.witness
    assert abs(average(u, average(v, w)) - average(average(u, v), w)) > 1e-12


def _capture(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


def _commands(path):
    tail = ["--epsilon", "0.1", "--delta", "0.1", "--alpha", "0.1", "--beta", "0.1"]
    return [
        ["run", path],
        ["run", path, "--json"],
        ["certify", path, "--epsilon", "1", "--alpha", "0.5"],
        ["check-axioms", path, "--samples", "2000"],
        ["probe-uniqueness", path, "--starts", "4"],
        ["probe-uniqueness", path, "--starts", "4", "--workers", "3"],
        ["cauchy", path, *tail],
        ["dump", path],
    ]


@pytest.mark.parametrize("path", shipped_scenario_paths(), ids=lambda p: p.stem)
def test_ac10_determinism(path, tmp_path):
    for argv in _commands(str(path)):
        assert _capture(argv) == _capture(argv), argv
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    _capture(["run", str(path), "--trace-out", str(a)])
    _capture(["run", str(path), "--trace-out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_ac10_determinism_across_processes():
    path = str(shipped_scenario("random5"))
    outs = []
    for hashseed in ("1", "2"):
        env = {**os.environ, "PYTHONHASHSEED": hashseed}
        proc = subprocess.run(
            [sys.executable, "-m", "fuzzy_fixpoint", "probe-uniqueness", path, "--starts", "5", "--workers", "2"],
            capture_output=True, env=env, check=False,
        )
        outs.append((proc.returncode, proc.stdout))
    assert outs[0] == outs[1]
    assert outs[0][0] == 0
