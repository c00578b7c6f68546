import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def criterion(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""
    lines = request.config.stash[_LINES_KEY]

    def report(number, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {detail}"
        print(line)
        lines.append((number, line))
        return passed

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
