import numpy as np
import pytest

from psiphi.catalog import (S2_PHI, S2_PSI, S4_PHI1, S4_PHI2, S4_PSI, S4_W1, S4_W2,
                            example_s2, example_s4)
from psiphi.piecewise import PiecewiseFn


@pytest.fixture
def s2():
    return example_s2()


@pytest.fixture
def s4_ifs():
    return example_s4()


@pytest.fixture
def identity():
    return PiecewiseFn.identity()


@pytest.fixture
def half():
    return PiecewiseFn.linear(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def unit_grid(hi=1.0, step=1e-3):
    n = int(round(hi / step))
    return np.arange(n + 1) * step


ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
