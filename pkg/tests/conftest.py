import numpy as np
import pytest

from bootshape.ldpc import regular_code

GRID = tuple([round(0.005 * i, 3) for i in range(1, 12)] + [0.057])

# Word lengths over blocks 0000..1111 of the k=4 matcher for w=(1,5).
K4_LENGTHS = (2, 3, 3, 5, 3, 5, 5, 7, 3, 5, 5, 6, 5, 6, 6, 7)


@pytest.fixture(scope="session")
def code_36():
    return regular_code(1024, 0.5, seed=0)


@pytest.fixture(scope="session")
def code_34():
    return regular_code(1024, 0.75, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_pmf(rng, n=2, floor=0.0):
    p = rng.dirichlet(np.ones(n))
    if floor:
        p = np.maximum(p, floor)
        p /= p.sum()
    return p


def random_channel_matrix(rng):
    a, b = rng.random(2)
    return np.array([[a, b], [1 - a, 1 - b]])


# (number, title, passed, seconds, detail) for the acceptance summary
ACCEPTANCE_LOG = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, seconds, detail in sorted(ACCEPTANCE_LOG):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title} ({seconds:.1f}s) {detail}")
