import math

import numpy as np
import pytest

from zerodepth.poisson import QProfile, SyntheticProfile, profile_for
from zerodepth.weights import DCSequence, PowerWeight, sequence_weight

# criterion number -> (status, detail), filled by the acceptance tests
ACCEPTANCE = {}


def record(n, ok, detail):
    status = "PASS" if ok else "FAIL"
    prev = ACCEPTANCE.get(n)
    if prev is not None and prev[0] == "FAIL":
        status = "FAIL"
        detail = prev[1] + "; " + detail
    elif prev is not None:
        detail = prev[1] + "; " + detail
    ACCEPTANCE[n] = (status, detail)
    return f"CRITERION {n:2d} {'PASS' if ok else 'FAIL'}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"CRITERION {n:2d} {status}: {detail}")


@pytest.fixture
def say(capsys):
    def _say(line):
        with capsys.disabled():
            print("\n" + line)
    return _say


def closed_q(alpha, y, order=0):
    """``sec(πα/2) y^α`` and its derivatives."""
    c = 1 / math.cos(math.pi * alpha / 2)
    coef = 1.0
    for k in range(order):
        coef *= alpha - k
    return c * coef * y ** (alpha - order)


@pytest.fixture(scope="session")
def power_profiles():
    return {a: QProfile(PowerWeight(a)) for a in (0.3, 0.5, 0.7)}


@pytest.fixture(scope="session")
def p05(power_profiles):
    return power_profiles[0.5]


@pytest.fixture(scope="session")
def sqrt_prof():
    return SyntheticProfile.sqrt_profile()


@pytest.fixture(scope="session")
def fact2_seq():
    return DCSequence.factorial_power(2.0, n_max=1000)


@pytest.fixture(scope="session")
def fact2_prof(fact2_seq):
    return profile_for(sequence_weight(fact2_seq))


@pytest.fixture(scope="session")
def log_grid():
    return np.logspace(0, 6, 13)
