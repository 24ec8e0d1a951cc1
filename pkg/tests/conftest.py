import re

import pytest

from fuzzy_fixpoint.scenario import parse_scenario, shipped_scenario

CONTRACTIONS = ["halving", "affine2d", "affine2d_family", "random5", "constant", "relaxed", "cosine"]
AFFINE_CONTRACTIONS = ["halving", "affine2d", "affine2d_family", "random5", "constant", "relaxed"]
# zero schedule, affine, exactly certified
CERTIFIED_PICARD = ["halving", "affine2d", "affine2d_family", "random5", "constant"]

CRITERIA = {
    1: "t-norm axiom suite",
    2: "fuzzy seminorm axiom suite",
    3: "contractive check consistent with certificates",
    4: "halving and 2D affine convergence with envelope",
    5: "oracle equivalence on affine scenarios",
    6: "monotone fixed-point membership",
    7: "Cauchy diagnostic clean and negation witness",
    8: "uniqueness across seeded starts",
    9: "negative controls",
    10: "byte-identical CLI output",
}

_acceptance = {}


@pytest.fixture
def load():
    def _load(name):
        return parse_scenario(shipped_scenario(name))

    return _load


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    match = re.search(r"test_ac(\d+)_", report.nodeid)
    if not match:
        return
    key = int(match.group(1))
    failed = report.failed
    if report.when == "call" or failed:
        _acceptance[key] = _acceptance.get(key, True) and not failed


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        ok = _acceptance.get(num)
        status = "NOT RUN" if ok is None else "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"AC{num:02d} {status} {CRITERIA[num]}")
