import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qclone.states import bloch_to_ket


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


def complex_matrices(n, m=None):
    m = n if m is None else m
    return st.tuples(arrays(float, (n, m), elements=finite), arrays(float, (n, m), elements=finite)).map(
        lambda p: p[0] + 1j * p[1]
    )


def hermitian_matrices(n):
    return complex_matrices(n).map(lambda a: (a + a.conj().T) / 2)


@st.composite
def unit_bloch(draw):
    z = draw(st.floats(-1.0, 1.0))
    phi = draw(st.floats(0.0, 2 * np.pi))
    r = np.sqrt(1 - z * z)
    return np.array([r * np.cos(phi), r * np.sin(phi), z])


pure_kets = unit_bloch().map(bloch_to_ket)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record and print one pass/fail line for an acceptance criterion."""
    state = {}

    def report(number, title, passed, detail):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        state["line"] = line
        print(line)
        assert passed, line

    yield report
    if "line" in state:
        ACCEPTANCE_LINES.append(state["line"])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
