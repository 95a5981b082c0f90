import numpy as np
import pytest

from logistic_threshold import power_absorption, rational_decay
from logistic_threshold.logistic import MONOTONE_STATS

# acceptance verdicts, printed once at the end of the session
CRITERIA = {}


def record_criterion(key, ok, detail=""):
    """Register one part of an acceptance criterion; a criterion passes iff all parts do."""
    entry = CRITERIA.setdefault(key, [])
    entry.append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    tr = terminalreporter
    if CRITERIA:
        tr.section("acceptance criteria")
        for key in sorted(CRITERIA, key=lambda k: int(k[1:])):
            parts = CRITERIA[key]
            verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
            tr.write_line(f"{key} {verdict}: " + "; ".join(d for _, d in parts))
    tr.write_line(f"monotone iteration: {MONOTONE_STATS['steps_checked']} steps checked, "
                  f"{MONOTONE_STATS['violations']} ordering violations")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def decaying_potential():
    """V = (1 + r^2)^-2, for which Lambda = 3 exactly in R^3."""
    return rational_decay(1.0, 2.0, decay_bound=(1.0, 2.0))


@pytest.fixture(scope="session")
def fisher():
    return power_absorption(2.0)
