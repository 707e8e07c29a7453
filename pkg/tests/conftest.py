import pytest

from wqed import SystemParams


@pytest.fixture
def loop():
    """Colocated loop with lambda=0.1, f=0.3, g=0.2 at omega = v_g = 1."""
    return SystemParams()


@pytest.fixture
def separated():
    return SystemParams(x0=2.0, phi=0.05 * 3.141592653589793)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(module.RESULTS, key=lambda s: int(s[2:4])):
        terminalreporter.write_line(line)
