from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ubdg", max_examples=60, deadline=None)
settings.load_profile("ubdg")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    lines = []
    for mod in list(sys.modules.values()):
        lines.extend(getattr(mod, "ACCEPTANCE_LINES", []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
