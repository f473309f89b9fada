import pytest

from qpanet import measures

# grid behind the ordering/threshold acceptance checks: every combination
# of decay factor, links-per-node and quality range below
SWEEP_QS = [round(0.1 * i, 10) for i in range(1, 21)]
SWEEP_BETAS = [2, 4, 6, 8]
SWEEP_THETA_MAXES = [4, 8, 16, 24]


@pytest.fixture(scope="session")
def exponential_sweep():
    """The full exponential-quality sweep shared by the acceptance checks."""
    rows = measures.sweep(
        "exponential", SWEEP_QS, SWEEP_BETAS, SWEEP_THETA_MAXES, threads=2
    )
    return rows
