import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

finite = st.floats(min_value=-3, max_value=3, allow_nan=False, allow_infinity=False)
quats = st.lists(finite, min_size=4, max_size=4).map(np.array)
nonzero_quats = quats.filter(lambda q: np.linalg.norm(q) > 1e-2)
unit_quats = nonzero_quats.map(lambda q: q / np.linalg.norm(q))
seeds = st.integers(min_value=0, max_value=2**31 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# lines recorded by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
