import numpy as np
import pytest

from autotune.model import Dataset


def random_dataset(seed, n=50, p=20, s=3, rho=0.0, noise=1.0):
    """Gaussian AR(1) design with an s-sparse signal of unit coefficients."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, p))
    X = np.empty_like(z)
    X[:, 0] = z[:, 0]
    c = np.sqrt(1 - rho * rho)
    for k in range(1, p):
        X[:, k] = rho * X[:, k - 1] + c * z[:, k]
    beta = np.zeros(p)
    beta[:s] = 1.0
    y = X @ beta + noise * rng.standard_normal(n)
    return Dataset(X, y), beta


@pytest.fixture
def small_data():
    return random_dataset(0)[0]


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def record(request):
    """Store the verdict of one acceptance criterion for the summary table."""
    table = request.config.stash.setdefault(_ACCEPTANCE, {})

    def _record(number: int, passed: bool, detail: str) -> bool:
        table[number] = (bool(passed), detail)
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_ACCEPTANCE, {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(table):
        passed, detail = table[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
