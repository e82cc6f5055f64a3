import pytest

from oplax3.adc import simplex_complex
from oplax3.cat3 import make_disk, make_invertible_disk3, truncate_from_adc


@pytest.fixture(scope="session")
def disks():
    return {i: make_disk(i) for i in range(4)}


@pytest.fixture(scope="session")
def d3sharp():
    return make_invertible_disk3()


@pytest.fixture(scope="session")
def orientals3():
    """The 3-truncations of the orientals O_0 .. O_3."""
    return {n: truncate_from_adc(simplex_complex(n)) for n in range(4)}


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
