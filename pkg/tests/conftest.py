import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qkbench.simulator import GATE_ARITY, Gate

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


@st.composite
def gates(draw, n_qubits):
    kinds = [k for k, (t, _) in GATE_ARITY.items() if t <= n_qubits]
    kind = draw(st.sampled_from(kinds))
    n_targets, n_angles = GATE_ARITY[kind]
    targets = draw(st.permutations(range(n_qubits)))[:n_targets]
    return Gate(kind, tuple(targets), tuple(draw(angles) for _ in range(n_angles)))


@st.composite
def circuits(draw, max_qubits=6, max_depth=30):
    n = draw(st.integers(1, max_qubits))
    return n, draw(st.lists(gates(n), max_size=max_depth))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
