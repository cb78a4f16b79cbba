import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from cqedxy.linalg import commutator, eig_hermitian, expm_antihermitian, similarity_transform
from cqedxy.star import (
    StarParams,
    ancilla_energy_formula,
    ancilla_residual,
    build_star_hamiltonian,
    closed_form_U,
    decoupling_angle,
    derived_frequencies,
    dress_star,
    effective_coupling,
    energies_from_derived,
    excitation_number_matrix,
    generator,
    resonator_energy_formula,
    single_excitation_basis,
)

from .conftest import series_expm


def test_basis_labels_conserve_excitations():
    for n in range(1, 6):
        labels = single_excitation_basis(n)
        assert len(labels) == n + 1
        for lab in labels:
            assert sum(lab[:-1]) + lab[-1] + 0.5 == 1


def test_n2_matrix_literal():
    wr, wa, f = 5.0, 6.0, 0.1
    expected = np.array(
        [
            [wr - wa / 2, 0, -f],
            [0, wr - wa / 2, -f],
            [-f, -f, wa / 2],
        ]
    )
    np.testing.assert_array_equal(build_star_hamiltonian(StarParams.uniform(2, wr, wa, f)), expected)


def test_zero_coupling_is_diagonal():
    h = build_star_hamiltonian(StarParams.uniform(4, 5.0, 6.0, 0.0))
    np.testing.assert_array_equal(h, np.diag([2.0] * 4 + [3.0]))


def test_n3_bright_dark_levels():
    wr, wa, f = 5.0, 6.0, 0.1
    w = eig_hermitian(build_star_hamiltonian(StarParams.uniform(3, wr, wa, f))).eigenvalues
    root = math.sqrt((wa - wr) ** 2 + 12 * f**2)
    expected = sorted([wr - wa / 2] * 2 + [wr / 2 - root / 2, wr / 2 + root / 2])
    np.testing.assert_allclose(w, expected, atol=1e-13)


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=0, omega_r=1, omega_a=1, couplings=()), dict(n=2, omega_r=1, omega_a=1, couplings=(0.1, -0.1))],
)
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        StarParams(**kwargs)


def test_excitation_number_commutes(rng):
    np.testing.assert_array_equal(excitation_number_matrix(2), np.eye(3))
    for _ in range(20):
        n = int(rng.integers(1, 7))
        p = StarParams(n, rng.uniform(4, 6), rng.uniform(4, 6), tuple(rng.uniform(0, 0.3, n)))
        h = build_star_hamiltonian(p)
        assert np.linalg.norm(commutator(h, excitation_number_matrix(n))) < 1e-14


def residual_oracle(n, f, delta):
    """Minimise the ancilla off-diagonal of U^dagger H U over theta numerically."""
    h = build_star_hamiltonian(StarParams.uniform(n, 0.0, delta, f))

    def cost(theta):
        return abs(similarity_transform(h, series_expm(generator(n, theta)).real)[n, 0])

    half = math.pi / (4 * math.sqrt(n))
    bracket = (0.0, half) if delta > 0 else (-half, 0.0)
    return minimize_scalar(cost, bounds=bracket, method="bounded", options={"xatol": 1e-13}).x


def test_decoupling_angle_special_values():
    for n in range(1, 7):
        assert decoupling_angle(n, 0.2, 0.0) == pytest.approx(math.pi / (4 * math.sqrt(n)), abs=1e-15)
        assert decoupling_angle(n, 0.0, 0.7) == 0.0


@pytest.mark.parametrize("n,f,delta", [(2, 0.1, 1.0), (3, 0.05, -0.4), (5, 0.3, 0.2)])
def test_decoupling_angle_matches_residual_minimiser(n, f, delta):
    assert decoupling_angle(n, f, delta) == pytest.approx(residual_oracle(n, f, delta), abs=1e-8)


def test_decoupling_angle_frozen_value():
    # residual_oracle(2, 0.1, 1.0) = 0.0974544...
    assert decoupling_angle(2, 0.1, 1.0) == pytest.approx(0.0974544, abs=1e-7)


def test_closed_form_identity_at_zero():
    for n in range(1, 7):
        np.testing.assert_array_equal(closed_form_U(n, 0.0), np.eye(n + 1))


def test_closed_form_n2_literal():
    t = 0.37
    c, s = math.cos(math.sqrt(2) * t), math.sin(math.sqrt(2) * t)
    expected = np.array(
        [
            [(c + 1) / 2, (c - 1) / 2, -s / math.sqrt(2)],
            [(c - 1) / 2, (c + 1) / 2, -s / math.sqrt(2)],
            [s / math.sqrt(2), s / math.sqrt(2), c],
        ]
    )
    np.testing.assert_allclose(closed_form_U(2, t), expected, atol=1e-15)


@pytest.mark.parametrize("n", range(1, 7))
def test_closed_form_equals_exponential(n):
    for theta in np.linspace(-1.5, 1.5, 13):
        u = closed_form_U(n, theta)
        assert np.linalg.norm(u - expm_antihermitian(generator(n, theta))) < 1e-12
        assert np.linalg.norm(u - series_expm(generator(n, theta))) < 1e-12


GRID = list(
    itertools.product(range(1, 7), np.linspace(0.01, 0.3, 5), np.linspace(-1.0, 1.0, 7))
)


@pytest.mark.parametrize("n,f,delta", GRID)
def test_dress_star_grid(n, f, delta):
    p = StarParams.uniform(n, 5.0, 5.0 + delta, f)
    h = build_star_hamiltonian(p)
    ht, d = dress_star(p)
    scale = np.linalg.norm(h)
    assert ancilla_residual(ht) < 1e-10 * scale
    j = effective_coupling(n, f, delta)
    if n > 1:
        off = ht[:n, :n][~np.eye(n, dtype=bool)]
        assert np.max(np.abs(off - off[0])) < 1e-12
        assert np.max(np.abs(off - j)) < 1e-10
        assert d.J == pytest.approx(j, abs=1e-10)
    assert d.eps_a == pytest.approx(ancilla_energy_formula(n, f, delta, 5.0), abs=1e-10)
    assert abs(np.trace(ht) - np.trace(h)) < 1e-10
    # exact resonator energy
    assert d.eps_r == pytest.approx(5.0 - (5.0 + delta) / 2 + j, abs=1e-10)
    if n == 2:
        assert d.eps_r == pytest.approx(resonator_energy_formula(2, f, delta, 5.0), abs=1e-10)
    else:
        assert d.eps_r - d.eps_r_formula == pytest.approx(-delta * (n - 2) / (2 * n), abs=1e-10)


def test_golden_j2():
    _, d = dress_star(StarParams.uniform(2, 5.0, 6.0, 0.1))
    assert d.J == pytest.approx(0.25 * (1.0 - math.sqrt(1.0 + 8 * 0.01)), abs=1e-12)
    assert d.J == pytest.approx(-9.8076e-3, abs=1e-7)


def test_golden_j2_against_dressed_splitting():
    # dark state sits at w_r - w_a/2, resonator block = dark + n J on the bright state
    p = StarParams.uniform(2, 5.0, 6.0, 0.1)
    w = eig_hermitian(build_star_hamiltonian(p)).eigenvalues
    dark = 5.0 - 3.0
    bright = w[0] if abs(w[0] - dark) > 1e-9 else w[1]
    assert (bright - dark) / 2 == pytest.approx(dress_star(p)[1].J, abs=1e-12)


def test_j3_resonance():
    f = 0.1
    _, d = dress_star(StarParams.uniform(3, 5.0, 5.0, f))
    assert d.J == pytest.approx(-f / math.sqrt(3), abs=1e-12)
    assert effective_coupling(3, f, 0.0) == pytest.approx(-f / math.sqrt(3), abs=1e-15)


@pytest.mark.parametrize("n", range(2, 7))
def test_dispersive_limit(n):
    f = 0.01
    delta = 100 * f
    assert effective_coupling(n, f, delta) == pytest.approx(-f * f / delta, rel=0.01)


def test_zero_coupling_no_hopping():
    for n in range(1, 5):
        assert effective_coupling(n, 0.0, 0.3) == 0.0


@pytest.mark.parametrize(
    "n,f,delta", list(itertools.product(range(1, 7), [0.01, 0.1, 0.3], [-1.0, -0.2, 0.2, 1.0]))
)
def test_coupling_sign_follows_detuning(n, f, delta):
    j = effective_coupling(n, f, delta)
    assert (j < 0) == (delta > 0)


def test_effective_coupling_matches_direct_formula():
    for n, f, delta in itertools.product(range(1, 7), [0.01, 0.2], [-1, -0.1, 0.0, 0.1, 1]):
        s = -1.0 if delta < 0 else 1.0
        direct = (delta - s * math.sqrt(delta**2 + 4 * n * f**2)) / (2 * n)
        assert effective_coupling(n, f, delta) == pytest.approx(direct, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.floats(0.01, 0.3), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_coupling_monotonicity(n, f, d1, d2):
    lo, hi = sorted([d1, d2])
    bound = f / math.sqrt(n)
    assert abs(effective_coupling(n, f, lo)) <= bound * (1 + 1e-15)
    if hi > lo + 1e-9:
        assert abs(effective_coupling(n, f, hi)) < abs(effective_coupling(n, f, lo))
        assert abs(effective_coupling(n, f, -hi)) < abs(effective_coupling(n, f, -lo))
    assert abs(effective_coupling(n, f * 1.1, lo)) > abs(effective_coupling(n, f, lo))


def test_derived_frequencies_examples():
    assert derived_frequencies(-1.0, 1.0, 2) == (0.0, 2.0)
    with pytest.raises(ValueError):
        derived_frequencies(-1.0, 1.0, 1)


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.integers(2, 8))
def test_derived_frequencies_round_trip(er, ea, n):
    wr, wa = derived_frequencies(er, ea, n)
    er2, ea2 = energies_from_derived(wr, wa, n)
    assert er2 == pytest.approx(er, abs=1e-12)
    assert ea2 == pytest.approx(ea, abs=1e-12)


def test_n3_derived_frequencies_satisfy_relations():
    _, d = dress_star(StarParams.uniform(3, 5.0, 6.0, 0.1))
    n = 3
    assert -(n - 2) / 2 * d.omega_r_prime - d.omega_a_prime / 2 == pytest.approx(d.eps_r, abs=1e-12)
    assert -n / 2 * d.omega_r_prime + d.omega_a_prime / 2 == pytest.approx(d.eps_a, abs=1e-12)


def test_nonuniform_couplings_numerical_path():
    p = StarParams(3, 5.0, 5.6, (0.05, 0.1, 0.2))
    h = build_star_hamiltonian(p)
    ht, d = dress_star(p)
    assert d.J is None and d.eps_r is None
    assert ancilla_residual(ht) < 1e-10 * np.linalg.norm(h)
    np.testing.assert_allclose(eig_hermitian(ht).eigenvalues, eig_hermitian(h).eigenvalues, atol=1e-12)


def test_ancilla_stays_ancilla_on_negative_detuning():
    # principal branch: the transformed ancilla state keeps most of its weight
    for n in range(1, 7):
        u = closed_form_U(n, decoupling_angle(n, 0.3, -1.0))
        assert u[n, n] ** 2 > 0.5
