import numpy as np
import pytest

from sixdma_isac.channel import Scenario
from sixdma_isac.geometry import Region
from sixdma_isac.manifold import PbfProblem


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scenario():
    return Scenario()


@pytest.fixture
def irs_scenario():
    """Small geometry where the reflected path is comparable to the direct one."""
    H = 10.0
    return Scenario(
        p_B=(0.0, 0.0, 0.0),
        p_U=(80.0, -20.0, 0.0),
        p_T=(60.0, 40.0, 0.0),
        H=H,
        regions={"R1": Region(50.0, 70.0, 10.0, 30.0, H), "R2": Region(40.0, 80.0, 0.0, 40.0, H)},
        fixed_xy=(60.0, 20.0),
        N_t=4,
        N_r=4,
        N_x=2,
        N_y=2,
        beta0=1.0,
    )


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_problem(rng, N, N_t=4, N_r=4, direct_scale=1.0):
    return PbfProblem(
        U_c=crandn(rng, N, N_t) / np.sqrt(N),
        U_r=crandn(rng, N_r, N) / np.sqrt(N),
        U_t=crandn(rng, N, N_t) / np.sqrt(N),
        h_BU=direct_scale * crandn(rng, N_t),
        hbar_TB=direct_scale * crandn(rng, N_r),
        h_BT=direct_scale * crandn(rng, N_t),
    )


def random_unit(rng, n):
    return np.exp(1j * rng.uniform(0, 2 * np.pi, n))


# -- acceptance bookkeeping: one PASS/FAIL line per criterion in the terminal summary

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_log():
    def record(criterion, ok, detail=""):
        prev_ok, prev_detail = _ACCEPTANCE.get(criterion, (True, []))
        _ACCEPTANCE[criterion] = (prev_ok and bool(ok), prev_detail + ([detail] if detail else []))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE):
        ok, details = _ACCEPTANCE[criterion]
        terminalreporter.write_line(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {'; '.join(details)}")
