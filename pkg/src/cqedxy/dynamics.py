"""Spectral time evolution and full-vs-effective comparisons."""

from dataclasses import dataclass

import numpy as np

from .lattice import build_lattice, effective_from_full
from .linalg import eig_hermitian

NORM_TOL = 1e-12


@dataclass(frozen=True)
class ObservableTrace:
    times: np.ndarray
    populations: np.ndarray  # (T, dim)
    norm: np.ndarray
    excitation: np.ndarray

    def population(self, site):
        return self.populations[:, site]


def propagate(h, psi0, times):
    """States psi(t) = V exp(-i w t) V^dagger psi0, one row per time."""
    h = np.asarray(h)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (h.shape[0],):
        raise ValueError(f"state of length {psi0.shape} does not match dimension {h.shape[0]}")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    w, v = eig_hermitian(h)
    coeffs = v.conj().T @ psi0
    return (np.exp(-1j * np.outer(times, w)) * coeffs) @ v.T


def evolve(h, psi0, times, excitation=None):
    """Populations, norm and excitation expectation along ``times``.

    ``excitation`` is the excitation-number operator; in the single-excitation
    sector it defaults to the identity.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > NORM_TOL:
        raise ValueError("initial state is not normalized")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    states = propagate(h, psi0, times)
    pops = np.abs(states) ** 2
    norm = np.sqrt(pops.sum(axis=1))
    if excitation is None:
        exc = pops.sum(axis=1)
    else:
        exc = np.einsum("ti,ij,tj->t", states.conj(), excitation, states).real
    return ObservableTrace(times, pops, norm, exc)


def site_state(dim, site):
    psi = np.zeros(dim, dtype=complex)
    psi[site] = 1.0
    return psi


@dataclass(frozen=True)
class Comparison:
    times: np.ndarray
    deviation: np.ndarray  # L2 distance of resonator populations per time
    full: ObservableTrace
    effective: ObservableTrace

    @property
    def max_deviation(self):
        return float(self.deviation.max())


def compare_full_effective(spec, params, psi0, times):
    """Evolve a resonator-supported state in the full and effective lattices.

    ``psi0`` is given on the resonator sites (effective-model ordering).
    """
    full = build_lattice(spec, "full", params)
    effective = effective_from_full(full)
    res = full.resonators
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape == (full.dim,) and full.dim != len(res):
        if np.any(np.abs(psi0[full.ancillas]) > 0):
            raise ValueError("initial state has ancilla support")
        psi0 = psi0[res]
    if psi0.shape != (len(res),):
        raise ValueError(
            f"initial state must live on the {len(res)} resonator sites, got length {psi0.shape}"
        )
    psi_full = np.zeros(full.dim, dtype=complex)
    psi_full[res] = psi0
    tr_full = evolve(full.hamiltonian, psi_full, times)
    tr_eff = evolve(effective.hamiltonian, psi0, times)
    dev = np.linalg.norm(tr_full.populations[:, res] - tr_eff.populations, axis=1)
    return Comparison(tr_full.times, dev, tr_full, tr_eff)
