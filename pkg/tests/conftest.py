"""Shared fixtures and the acceptance-summary hook."""

import numpy as np
import pytest

import torusmf as tm

# criterion label -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def record_criterion(label: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS[label] = (passed, detail)
    status = "PASS" if passed else "FAIL"
    print(f"[acceptance] {label}: {status} {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[label]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{label}: {status} {detail}")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def do_kernel():
    return tm.doi_onsager()


@pytest.fixture(scope="session")
def do_normalized():
    w, _ = tm.normalize(tm.doi_onsager(), 1)
    return w
