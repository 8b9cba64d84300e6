import pytest

_LINES = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    store = request.config.stash.setdefault(_LINES, {})

    def log(key, passed, detail):
        store[key] = f"{'PASS' if passed else 'FAIL'} {key}: {detail}"
        return passed

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_LINES, None)
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(store):
        terminalreporter.write_line(store[key])
