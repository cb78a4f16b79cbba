import math
from functools import reduce

import numpy as np
import pytest

TWO_PI = 2 * math.pi


def series_expm(m, terms=30):
    """Taylor-series exponential, independent of the spectral route."""
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ m / k
        out = out + term
    return out


PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(m, ops):
    """Kronecker product with ``ops[p]`` on site p (site p = bit p, up = bit set).

    Bit p of the index is the p-th factor from the right; with up = |1> the
    z eigenvalue of "up" must be +1, so Z is taken as diag(-1, +1) in the
    (bit 0, bit 1) ordering.
    """
    z_up = np.diag([-1.0, 1.0]).astype(complex)
    factors = []
    for p in reversed(range(m)):
        op = ops.get(p, "I")
        factors.append(z_up if op == "Z" else PAULI[op])
    return reduce(np.kron, factors)


def xy_oracle(m, bonds, J, field):
    """(field/2) sum sz + (J/2) sum_bonds (sx sx + sy sy) from explicit Pauli strings."""
    h = sum(0.5 * field * pauli_string(m, {p: "Z"}) for p in range(m))
    for p, q in bonds:
        h = h + 0.5 * J * (pauli_string(m, {p: "X", q: "X"}) + pauli_string(m, {p: "Y", q: "Y"}))
    return h


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
