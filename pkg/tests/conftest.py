import pytest
from hypothesis import settings

from daisyforge.construct import basis_family, two_layer_family

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def basis_2_3():
    return basis_family(2, 3)


@pytest.fixture(scope="session")
def basis_3_3():
    return basis_family(3, 3)


@pytest.fixture(scope="session")
def two_layer_2():
    return two_layer_family(2)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
