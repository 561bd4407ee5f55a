import numpy as np
import pytest

from carlab import field as fd

_ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def record_criterion(num: int, desc: str, ok: bool, detail: str = ""):
    """Collect one acceptance verdict; the summary hook prints them."""
    _ACCEPTANCE.append((num, desc, ok, detail))
    return ok


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, ok, detail in sorted(_ACCEPTANCE):
        suffix = f" -- {detail}" if detail else ""
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'} criterion {num}: {desc}{suffix}")


@pytest.fixture(scope="session")
def wave_family():
    return fd.wave_shift_family()


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
