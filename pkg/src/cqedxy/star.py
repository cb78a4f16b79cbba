"""One ancilla qubit coupled to ``n`` resonators (a "star"), single-excitation sector.

Basis ordering: states ``0..n-1`` hold one photon in resonator ``p`` with the
ancilla down; state ``n`` has no photons and the ancilla up.  Diagonal entries
follow the convention ``omega_r - omega_a/2`` (resonator states) and
``omega_a/2`` (ancilla state), so the matrix is

    [[w_r - w_a/2,     0, ..., -f_1],
     [0, w_r - w_a/2,  ..., -f_2],
     ...
     [-f_1, -f_2, ...,   w_a/2]]

The decoupling rotation mixes the ancilla with the symmetric ("bright")
resonator combination only; the dark combinations are untouched.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import expm_antihermitian, similarity_transform

DECOUPLING_RTOL = 1e-10


class DecouplingError(RuntimeError):
    pass


def sgn(x):
    """Sign with sgn(0) = +1."""
    return -1.0 if x < 0 else 1.0


@dataclass(frozen=True)
class StarParams:
    n: int
    omega_r: float
    omega_a: float
    couplings: tuple = field(default=())

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"resonator count must be an integer >= 1, got {self.n}")
        couplings = tuple(float(c) for c in np.atleast_1d(self.couplings))
        if len(couplings) == 1 and self.n > 1:
            couplings = couplings * self.n
        if len(couplings) != self.n:
            raise ValueError(f"expected {self.n} couplings, got {len(couplings)}")
        if any(c < 0 for c in couplings):
            raise ValueError("couplings must be non-negative")
        values = (self.omega_r, self.omega_a) + couplings
        if not all(math.isfinite(v) for v in values):
            raise ValueError("frequencies and couplings must be finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "couplings", couplings)

    @classmethod
    def uniform(cls, n, omega_r, omega_a, f):
        return cls(n, omega_r, omega_a, (f,) * n)

    @property
    def delta(self):
        return self.omega_a - self.omega_r

    @property
    def is_uniform(self):
        return all(c == self.couplings[0] for c in self.couplings)

    @property
    def f(self):
        if not self.is_uniform:
            raise ValueError("couplings are not uniform")
        return self.couplings[0]


@dataclass(frozen=True)
class DressedStar:
    """Parameters of the decoupled star.

    ``J``, ``eps_r`` and the primed frequencies are ``None`` when they are
    undefined: nonuniform couplings (no single hopping) or ``n = 1`` (the
    primed-frequency relations are singular).
    """

    delta: float
    theta: float
    J: float | None
    eps_r: float | None
    eps_a: float
    omega_r_prime: float | None
    omega_a_prime: float | None
    # closed-form resonator energy as printed in the literature; differs from
    # eps_r by -delta (n - 2) / (2n)
    eps_r_formula: float | None = None


def single_excitation_basis(n):
    """Labels ``(N_r1, ..., N_rn, s_az)`` in matrix order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    labels = []
    for p in range(n):
        photons = [0] * n
        photons[p] = 1
        labels.append((*photons, -0.5))
    labels.append((*([0] * n), 0.5))
    return labels


def build_star_hamiltonian(params):
    n = params.n
    h = np.zeros((n + 1, n + 1))
    h[np.arange(n), np.arange(n)] = params.omega_r - 0.5 * params.omega_a
    h[n, n] = 0.5 * params.omega_a
    f = np.asarray(params.couplings)
    h[:n, n] = -f
    h[n, :n] = -f
    return h


def excitation_number_matrix(n):
    """Total excitation number on the single-excitation sector (the identity)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.eye(n + 1)


def decoupling_angle(n, f, delta):
    """Angle solving tan(2 sqrt(n) theta) = 2 sqrt(n) f / delta.

    Principal branch, 2 sqrt(n) theta in (-pi/2, pi/2]: the rotated ancilla
    state stays ancilla-dominated for either sign of the detuning.
    """
    if n < 1 or f < 0:
        raise ValueError("need n >= 1 and f >= 0")
    rn = math.sqrt(n)
    if f == 0.0:
        return 0.0
    if delta == 0.0:
        return math.pi / (4.0 * rn)
    return math.atan(2.0 * rn * f / delta) / (2.0 * rn)


def generator(n, thetas):
    """Anti-Hermitian M with U = exp(M); ``thetas`` is a scalar or one per resonator."""
    thetas = np.broadcast_to(np.asarray(thetas, dtype=float), (n,))
    m = np.zeros((n + 1, n + 1))
    m[:n, n] = -thetas
    m[n, :n] = thetas
    return m


def closed_form_U(n, theta):
    if n < 1:
        raise ValueError("n must be >= 1")
    rn = math.sqrt(n)
    c, s = math.cos(rn * theta), math.sin(rn * theta)
    u = np.full((n + 1, n + 1), (c - 1.0) / n)
    u[np.arange(n), np.arange(n)] = (n - 1 + c) / n
    u[:n, n] = -s / rn
    u[n, :n] = s / rn
    u[n, n] = c
    return u


def effective_coupling(n, f, delta):
    """Ancilla-mediated resonator hopping J_n = (delta - sgn(delta) sqrt(delta^2 + 4 n f^2)) / (2n)."""
    if n < 1 or f < 0:
        raise ValueError("need n >= 1 and f >= 0")
    if f == 0.0:
        return 0.0
    root = math.sqrt(delta * delta + 4.0 * n * f * f)
    if delta == 0.0:
        return -root / (2.0 * n)
    # the two terms nearly cancel in the dispersive limit; use the conjugate form
    return -2.0 * f * f / (delta + sgn(delta) * root)


def resonator_energy_formula(n, f, delta, omega_r):
    return -(delta + sgn(delta) * math.sqrt(delta**2 + 4 * n * f**2)) / (2 * n) + 0.5 * omega_r


def ancilla_energy_formula(n, f, delta, omega_r):
    return 0.5 * sgn(delta) * math.sqrt(delta**2 + 4 * n * f**2) + 0.5 * omega_r


def derived_frequencies(eps_r, eps_a, n):
    """(omega_r', omega_a') of the tight-binding form; inverse of
    eps_r = -(n-2)/2 omega_r' - omega_a'/2, eps_a = -n/2 omega_r' + omega_a'/2."""
    if n < 2:
        raise ValueError("derived frequencies need n >= 2")
    omega_r_prime = -(eps_r + eps_a) / (n - 1)
    omega_a_prime = -(n * eps_r - (n - 2) * eps_a) / (n - 1)
    return omega_r_prime, omega_a_prime


def energies_from_derived(omega_r_prime, omega_a_prime, n):
    eps_r = -0.5 * (n - 2) * omega_r_prime - 0.5 * omega_a_prime
    eps_a = -0.5 * n * omega_r_prime + 0.5 * omega_a_prime
    return eps_r, eps_a


def ancilla_residual(transformed):
    """Largest ancilla row/column off-diagonal magnitude."""
    n = transformed.shape[0] - 1
    if n == 0:
        return 0.0
    return float(max(np.max(np.abs(transformed[n, :n])), np.max(np.abs(transformed[:n, n]))))


def star_unitary(params):
    """Decoupling unitary; closed form for uniform couplings, matrix exponential otherwise."""
    n = params.n
    if params.is_uniform:
        return closed_form_U(n, decoupling_angle(n, params.f, params.delta))
    f = np.asarray(params.couplings)
    g = float(np.linalg.norm(f))
    # rotate the ancilla into the f-weighted bright mode, by the n = 1 angle for coupling g
    phi = decoupling_angle(1, g, params.delta)
    # real generator, so the exponential is real up to round-off
    return expm_antihermitian(generator(n, phi * f / g)).real


def dress_star(params):
    """Decouple the ancilla; returns ``(U^dagger H U, DressedStar)``."""
    n = params.n
    h = build_star_hamiltonian(params)
    u = star_unitary(params)
    transformed = similarity_transform(h, u)

    residual = ancilla_residual(transformed)
    if residual > DECOUPLING_RTOL * np.linalg.norm(h):
        raise DecouplingError(f"ancilla not decoupled, residual {residual:.3e}")
    if abs(u[n, n]) ** 2 < 0.5 - 1e-12:
        raise DecouplingError("transformed ancilla state lost its ancilla character")

    delta = params.delta
    eps_a = float(transformed[n, n])
    if not params.is_uniform:
        theta = decoupling_angle(1, float(np.linalg.norm(params.couplings)), delta)
        return transformed, DressedStar(delta, theta, None, None, eps_a, None, None)

    f = params.f
    theta = decoupling_angle(n, f, delta)
    eps_r = float(np.mean(np.diag(transformed)[:n]))
    if n >= 2:
        block = transformed[:n, :n]
        J = float(block[~np.eye(n, dtype=bool)].mean())
        wr_p, wa_p = derived_frequencies(eps_r, eps_a, n)
    else:
        J = effective_coupling(n, f, delta)
        wr_p = wa_p = None
    dressed = DressedStar(
        delta=delta,
        theta=theta,
        J=J,
        eps_r=eps_r,
        eps_a=eps_a,
        omega_r_prime=wr_p,
        omega_a_prime=wa_p,
        eps_r_formula=resonator_energy_formula(n, f, delta, params.omega_r),
    )
    return transformed, dressed
