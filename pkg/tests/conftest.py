import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from faultbasis import kernels
from faultbasis.sigmatrix import VerdictMatrix

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def toy():
    """Filtered matrix of the three-row worked example: rows 001, 011, 010."""
    return VerdictMatrix.from_strings(["001", "011", "010"], problem_id="toy")


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
