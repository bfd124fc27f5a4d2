import numpy as np
import pytest

_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line per acceptance criterion and fail the test when it does not hold."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number, title, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{'ok' if passed else 'MISS'} {text}" for text, passed in checks)
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
