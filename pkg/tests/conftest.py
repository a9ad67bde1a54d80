from itertools import product

import numpy as np
import pytest

from strongsim.unitary import haar_random_unitary

_criteria = []


def brute_force_layer(m, k):
    """Every k-photon occupation vector over m modes, by exhaustive product."""
    return [occ for occ in product(range(k + 1), repeat=m) if sum(occ) == k]


@pytest.fixture
def haar():
    return haar_random_unitary


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for key, value in report.user_properties:
        if key == "criterion":
            _criteria.append((value, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criteria:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
