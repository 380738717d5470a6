import pytest
from hypothesis import settings

from treembed import kernels

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

BACKENDS = kernels.backends()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Each kernel module that can be imported here."""
    return BACKENDS[request.param]


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for the terminal summary and assert it."""

    def record(name: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        request.config.stash.setdefault(_VERDICTS, []).append(line)
        print(line)
        assert ok, line

    return record


_VERDICTS = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
