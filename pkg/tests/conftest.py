from fractions import Fraction

import pytest

from ansatzlab.ansatz import AnsatzProblem, extend_to_rd, solve_bvp, solve_closed_form_d1


@pytest.fixture(scope="session")
def closed_n2_c9():
    """u(t) = (2t)^(3/2), the d = 1, n = 2 solution with a1 = 1."""
    return solve_closed_form_d1(2, 9)


@pytest.fixture(scope="session")
def closed_n2_third():
    return solve_closed_form_d1(2, Fraction(1, 3))


@pytest.fixture(scope="session")
def two_component():
    """n = 3, d = 2, c = 1 at the default grid."""
    return solve_bvp(AnsatzProblem(3, 2, Fraction(1)))


@pytest.fixture(scope="session")
def two_component_extension(two_component):
    return extend_to_rd(two_component)


# one line per acceptance criterion, printed after the run
_ACCEPTANCE_LINES = []


@pytest.fixture
def record():
    """Record a verdict line for the acceptance summary and return the verdict."""

    def _record(label: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
