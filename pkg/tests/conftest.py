import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from weylcurv import InnerProduct  # noqa: E402

ACCEPTANCE_LINES = []


def signatures(dims):
    """Definite and Lorentzian signatures for each dimension."""
    return [(n, 0) for n in dims] + [(n - 1, 1) for n in dims]


@pytest.fixture(params=signatures([2, 3, 4]), ids=lambda s: f"sig{s[0]}{s[1]}")
def metric(request):
    return InnerProduct.from_signature(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
