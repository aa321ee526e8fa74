import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def fourier_atom(N, m):
    return np.exp(2j * np.pi * m * np.arange(N) / N) / np.sqrt(N)


def spike(N, k):
    e = np.zeros(N, dtype=complex)
    e[k] = 1
    return e


@pytest.fixture(scope="session")
def gaussian_cal():
    from prosparse.bases import gaussian_calibrate
    return gaussian_calibrate(64, K_range=(1, 2, 3, 4), target_rate=0.95, seed=0)


ACCEPTANCE: list = []


def record(name: str, ok: bool, detail: str = "") -> bool:
    line = f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
