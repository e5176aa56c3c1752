import pytest

from helpers import ACCEPTANCE_LINES, make_cases

N_RANDOM_CASES = 10_000


@pytest.fixture(scope="session")
def random_cases():
    """10^4 certified (world, path, oracle cost) triples in 2D and 3D, shared across modules."""
    return make_cases(seed=20240611, n_cases=N_RANDOM_CASES)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
