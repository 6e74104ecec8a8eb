import pytest

RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def record(request):
    """Store one acceptance verdict for the end-of-run summary."""
    results = request.config.stash.setdefault(RESULTS, {})

    def _record(criterion: int, ok: bool, detail: str) -> bool:
        results[criterion] = (ok, detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(results):
        ok, detail = results[criterion]
        terminalreporter.write_line(f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
