import numpy as np
import pytest

from mibci.core import ClassLabel, Epoch
from mibci.preprocess import extract_epochs
from mibci.synthgen import diag_spec, generate_session

SEPARATED_LEFT = [4.0, 1.0] + [1.0] * 12
SEPARATED_RIGHT = [1.0, 4.0] + [1.0] * 12


def separated_spec(**kw):
    kw.setdefault("seed", 7)
    return diag_spec(SEPARATED_LEFT, SEPARATED_RIGHT, **kw)


def null_spec(**kw):
    kw.setdefault("seed", 7)
    return diag_spec([1.0] * 14, [1.0] * 14, **kw)


def gaussian_epochs(rng, cov_left, cov_right, n_per_class=50, n_samples=256):
    """White Gaussian trials with the given spatial covariances."""
    out = []
    for label, cov in ((ClassLabel.LEFT, cov_left), (ClassLabel.RIGHT, cov_right)):
        chol = np.linalg.cholesky(cov)
        for _ in range(n_per_class):
            out.append(Epoch(label, chol @ rng.standard_normal((len(cov), n_samples)), 0.0))
    return out


@pytest.fixture(scope="session")
def separated_session():
    return generate_session(separated_spec())


@pytest.fixture(scope="session")
def separated_epochs(separated_session):
    signal, markers = separated_session
    return extract_epochs(signal, markers)[0]


@pytest.fixture(scope="session")
def null_session():
    return generate_session(null_spec())


# ---------------------------------------------------------------------------
# acceptance criteria: one PASS/FAIL line per criterion in the terminal summary

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number, title = getattr(report, "acceptance", (None, None))
    if number is not None:
        _ACCEPTANCE[number] = (title, report.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {title}")
