import mpmath as mp
import pytest


@pytest.fixture(autouse=True)
def _reset_mp_precision():
    # tests must not leak working precision into each other
    saved = mp.mp.dps
    yield
    mp.mp.dps = saved


def close(x, y, tol):
    return abs(mp.mpc(x) - mp.mpc(y)) < mp.mpf(tol)


_ACCEPTANCE: list = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for the acceptance summary."""
    def record(criterion: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append((criterion, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
