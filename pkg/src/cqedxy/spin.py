"""xy-model spin Hamiltonians on the full 2^m space.

Basis convention: site ``p`` is bit ``p`` of the basis index, bit set = spin up
= one photon in resonator ``p``.  Each bond carries the hopping element ``J``
between the single-flip states, i.e. ``J (s+_p s-_q + s-_p s+_q)``, which is
``(J/2)(sx sx + sy sy)``; listing each bond once avoids the double counting of
an ordered-pair sum.
"""

from dataclasses import dataclass
from math import comb

import numpy as np

MAX_SPINS = 14


@dataclass(frozen=True)
class SpinHamiltonian:
    m: int
    bonds: tuple
    field: float
    matrix: np.ndarray


@dataclass(frozen=True)
class SectorProjection:
    k_up: int
    basis: np.ndarray
    matrix: np.ndarray


def _popcount(states, m):
    return sum((states >> p) & 1 for p in range(m))


def _normalize_bonds(m, bonds, J):
    out, seen = [], set()
    for bond in bonds:
        p, q = int(bond[0]), int(bond[1])
        if J is None and len(bond) < 3:
            raise ValueError("bond without amplitude and no shared J given")
        amp = float(bond[2]) if J is None else float(J)
        if not (0 <= p < m and 0 <= q < m) or p == q:
            raise ValueError(f"invalid bond ({p}, {q}) for {m} spins")
        key = (min(p, q), max(p, q))
        if key in seen:
            raise ValueError(f"duplicate bond {key}")
        seen.add(key)
        out.append((p, q, amp))
    return tuple(out)


def build_xy(m, bonds, J=None, omega_r_prime=0.0):
    """(w'/2) sum_p sz_p + sum_bonds J (s+_p s-_q + h.c.).

    ``bonds`` holds ``(p, q)`` pairs sharing the scalar ``J``, or ``(p, q, J_pq)``
    triples when ``J`` is None.
    """
    if m < 1:
        raise ValueError("need at least one spin")
    if m > MAX_SPINS:
        raise ValueError(f"{m} spins exceeds the dense limit of {MAX_SPINS}")
    bonds = _normalize_bonds(m, bonds, J)
    dim = 1 << m
    states = np.arange(dim)
    h = np.zeros((dim, dim))
    h[states, states] = 0.5 * omega_r_prime * (2 * _popcount(states, m) - m)
    for p, q, amp in bonds:
        bp, bq = (states >> p) & 1, (states >> q) & 1
        src = states[bp != bq]
        h[src ^ ((1 << p) | (1 << q)), src] += amp
    return SpinHamiltonian(m, bonds, float(omega_r_prime), h)


def xy_from_lattice(model, omega_r_prime=0.0):
    """Spin Hamiltonian on the bonds of an effective lattice model."""
    if model.flavor != "effective":
        raise ValueError("xy mapping applies to effective (resonator-only) models")
    return build_xy(model.dim, [(i, j, amp) for i, j, amp in model.bonds], None, omega_r_prime)


def total_sz(m):
    states = np.arange(1 << m)
    return np.diag(_popcount(states, m) - 0.5 * m)


def sector_basis(m, k_up):
    if not 0 <= k_up <= m:
        raise ValueError(f"k_up must lie in [0, {m}], got {k_up}")
    states = np.arange(1 << m)
    basis = states[_popcount(states, m) == k_up]
    assert len(basis) == comb(m, k_up)
    return basis


def project_sector(h, k_up):
    basis = sector_basis(h.m, k_up)
    return SectorProjection(k_up, basis, h.matrix[np.ix_(basis, basis)])


def sector_equivalence(h_spin, h_tb):
    """Max |P1 H_spin P1 - H_tb - c I| with the constant offset c removed.

    ``h_tb`` is an effective LatticeModel or a plain matrix in site order.
    """
    if hasattr(h_tb, "bonds"):
        tb_bonds = {(min(i, j), max(i, j)) for i, j, _ in h_tb.bonds}
        spin_bonds = {(min(p, q), max(p, q)) for p, q, _ in h_spin.bonds}
        if tb_bonds != spin_bonds:
            raise ValueError("spin and tight-binding bond sets differ")
        h_tb = h_tb.hamiltonian
    h_tb = np.asarray(h_tb)
    projected = project_sector(h_spin, 1).matrix
    if projected.shape != h_tb.shape:
        raise ValueError(f"shape mismatch: {projected.shape} vs {h_tb.shape}")
    diff = projected - h_tb
    offset = float(np.mean(np.diag(diff)))
    return float(np.max(np.abs(diff - offset * np.eye(len(diff)))))
