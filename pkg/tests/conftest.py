import math

import pytest

from photon_bundles.model import SystemParams

PHI3 = 2 * math.pi / 3

# one entry per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.split("-")[0]), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def base_params():
    return SystemParams(delta_a=25.0)
