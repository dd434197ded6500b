import numpy as np
import pytest

from cutmatch.projections import bregman_project_zero_diag

ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_feasible(rng, n):
    """Random symmetric zero-diagonal doubly stochastic matrix."""
    R = rng.random((n, n))
    X = bregman_project_zero_diag(R + R.T, 1e-12, 100000).X
    X = 0.5 * (X + X.T)
    np.fill_diagonal(X, 0.0)
    return X
