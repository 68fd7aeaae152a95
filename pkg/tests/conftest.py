import time

import pytest

from fdrbench.experiment import RunOptions, run_experiment
from fdrbench.simcore import SimulationConfig, simulate_dataset

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def default_dataset():
    return simulate_dataset(SimulationConfig(seed=43))


@pytest.fixture(scope="session")
def default_sweep():
    """20 replicates of the default scenario (seeds 43..62); wall time kept in ``elapsed_s``."""
    start = time.perf_counter()
    summary = run_experiment(SimulationConfig(), RunOptions(replicates=20))
    summary.elapsed_s = time.perf_counter() - start
    return summary


@pytest.fixture(scope="session")
def null_sweep():
    """20 replicates with no DE genes."""
    return run_experiment(SimulationConfig(prop_de=0.0), RunOptions(replicates=20))


@pytest.fixture
def acceptance_report():
    def record(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
