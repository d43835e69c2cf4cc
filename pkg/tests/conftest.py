import re

import numpy as np
import pytest

from ibpdca.problems import MatrixCompletionProblem, SamplingMask

# criterion id -> (passed, message); filled by test_acceptance.py
ACCEPTANCE = {}


def record_acceptance(cid, passed, message):
    ACCEPTANCE[cid] = (bool(passed), message)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {cid}: {message}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")

    def key(c):
        m = re.match(r"(\d+)(.*)", c)
        return (int(m.group(1)), m.group(2)) if m else (99, c)

    for cid in sorted(ACCEPTANCE, key=key):
        ok, msg = ACCEPTANCE[cid]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {msg}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scalar_problem():
    """The 1x1 fully observed instance M = 5, lam = 0.5."""
    return MatrixCompletionProblem(np.array([[5.0]]), np.ones((1, 1), bool), lam=0.5)


@pytest.fixture
def small_problem():
    """10x10 rank-2 instance, half observed."""
    r = np.random.default_rng(3)
    X = r.random((10, 2)) @ r.random((2, 10))
    obs = r.random((10, 10)) < 0.5
    return MatrixCompletionProblem(X, SamplingMask(obs))
