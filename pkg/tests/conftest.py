import numpy as np
import pytest

from frontsweep.disorder import realization_seed, sample_couplings

# small instances used across the oracle comparisons: N in {2,4,6,8}, 20 seeds each
CORPUS_SIZES = (2, 4, 6, 8)
CORPUS_SEEDS = tuple(realization_seed(20240601, i) for i in range(20))


def corpus():
    for N in CORPUS_SIZES:
        for seed in CORPUS_SEEDS:
            yield sample_couplings(N, seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def report(criterion: int, passed: bool, detail: str) -> bool:
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
