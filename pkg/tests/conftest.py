import pytest

_LINES = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    """Record one acceptance line: ``report(id, passed, detail)``."""
    lines = request.config.stash.setdefault(_LINES, [])

    def add(criterion: str, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
        lines.append(line)
        print(line)
        return passed

    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("C", 1)[1].split(" ")[0].rstrip(":"))):
            terminalreporter.write_line(line)
