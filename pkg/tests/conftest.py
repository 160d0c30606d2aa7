import os

import numpy as np
import pytest

FULL = os.environ.get("GINIBRE_ACCEPTANCE", "fast").lower() == "full"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def within_sigma(estimate, stderr, reference, k=3.0):
    return abs(estimate - reference) <= k * stderr


ACCEPTANCE_LINES = []


def report(criterion, ok, detail):
    line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section(f"acceptance ({'full' if FULL else 'fast'} mode)")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
