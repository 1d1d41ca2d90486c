import pytest

from densityseek import Bitstream

S = "010110101100"
T = "1001101001011"

# filled by test_acceptance.py, printed after the run
CRITERIA: dict[int, str] = {}


@pytest.fixture
def s_example():
    return Bitstream.from_string(S)


@pytest.fixture
def t_example():
    return Bitstream.from_string(T)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])
