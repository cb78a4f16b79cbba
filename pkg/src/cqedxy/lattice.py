"""Chain and Kagome resonator lattices, full (resonators + ancillas) or effective.

A lattice is described by a unit cell (sublattices with roles, positions and
on-site energies) plus bond templates ``(source, target, cell_offset, amplitude)``.
The same description assembles the finite real-space matrix and the Bloch
Hamiltonian, so the two cannot drift apart.

Geometry
--------
chain:  Bravais vector (1,); resonator ``r`` at x = 0, ancilla ``q`` at x = 1/2
        couples resonators i and i + 1.
kagome: Bravais vectors a1 = (1, 0), a2 = (1/2, sqrt(3)/2); resonators
        c = 0, b = a1/2, a = a2/2.  Up triangle (a, b, c) of cell (i, j); down
        triangle (b_{i,j}, a_{i+1,j-1}, c_{i+1,j}).  In the full model the up
        and down triangles each carry one ancilla at the triangle centre
        (sublattices ``u`` and ``d``), so the ancillas form a honeycomb.

Full-model energies use the single-star frame: resonator states sit at
``omega_r - omega_a/2`` and ancilla states at ``omega_a/2``.  This is the true
single-excitation energy shifted by the constant ``(N_anc - 1) omega_a / 2``.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import eig_hermitian
from .star import StarParams, dress_star, effective_coupling

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class LatticeSpec:
    kind: str
    extents: tuple
    boundary: str = "periodic"

    def __post_init__(self):
        extents = tuple(int(e) for e in np.atleast_1d(self.extents))
        object.__setattr__(self, "extents", extents)
        if self.kind not in ("chain", "kagome"):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if len(extents) != (1 if self.kind == "chain" else 2):
            raise ValueError(f"{self.kind} needs {1 if self.kind == 'chain' else 2} extents")
        if any(e < 1 for e in extents):
            raise ValueError("extents must be >= 1")
        if self.periodic:
            minimum = 3 if self.kind == "chain" else 2
            if any(e < minimum for e in extents):
                raise ValueError(f"periodic {self.kind} needs extents >= {minimum}")

    @classmethod
    def chain(cls, n_sites, boundary="periodic"):
        return cls("chain", (n_sites,), boundary)

    @classmethod
    def kagome(cls, l1, l2=None, boundary="periodic"):
        return cls("kagome", (l1, l1 if l2 is None else l2), boundary)

    @property
    def periodic(self):
        return self.boundary == "periodic"

    @property
    def n_star(self):
        return 2 if self.kind == "chain" else 3


@dataclass(frozen=True)
class EffectiveParams:
    J: float
    onsite: float = 0.0


@dataclass(frozen=True)
class Site:
    role: str
    cell: tuple
    sublattice: str
    position: tuple


@dataclass(frozen=True)
class _Sublattice:
    name: str
    role: str
    offset: tuple
    onsite: float


@dataclass
class _UnitCell:
    bravais: np.ndarray
    sublattices: list
    templates: list  # (source, target, cell_offset, amplitude)

    def index(self, name):
        return [s.name for s in self.sublattices].index(name)


@dataclass
class BlochModel:
    """H(k) = sum_t blocks[t] exp(i k . (t @ bravais))."""

    blocks: dict
    cell_dim: int
    bravais: np.ndarray
    reciprocal: np.ndarray

    def hamiltonian(self, k):
        k = np.atleast_1d(np.asarray(k, dtype=float))
        h = np.zeros((self.cell_dim, self.cell_dim), dtype=complex)
        for t, block in self.blocks.items():
            h += block * np.exp(1j * (k @ (np.asarray(t) @ self.bravais)))
        return h


@dataclass
class LatticeModel:
    spec: LatticeSpec
    flavor: str
    sites: list
    bonds: list
    hamiltonian: np.ndarray
    params: object
    cell: _UnitCell = field(repr=False)

    @property
    def dim(self):
        return len(self.sites)

    @property
    def resonators(self):
        return [i for i, s in enumerate(self.sites) if s.role == "resonator"]

    @property
    def ancillas(self):
        return [i for i, s in enumerate(self.sites) if s.role == "ancilla"]

    def degrees(self):
        deg = np.zeros(self.dim, dtype=int)
        for i, j, _ in self.bonds:
            deg[i] += 1
            deg[j] += 1
        return deg


# -- unit cells -------------------------------------------------------------

def _chain_cell(flavor, params):
    bravais = np.array([[1.0]])
    if flavor == "effective":
        subs = [_Sublattice("r", "resonator", (0.0,), params.onsite)]
        return _UnitCell(bravais, subs, [("r", "r", (1,), params.J)])
    f = _per_ancilla_couplings(params, 2)
    subs = [
        _Sublattice("r", "resonator", (0.0,), params.omega_r - 0.5 * params.omega_a),
        _Sublattice("q", "ancilla", (0.5,), 0.5 * params.omega_a),
    ]
    templates = [("q", "r", (0,), -f[0]), ("q", "r", (1,), -f[1])]
    return _UnitCell(bravais, subs, templates)


def _kagome_cell(flavor, params):
    a1, a2 = np.array([1.0, 0.0]), np.array([0.5, SQRT3 / 2])
    bravais = np.array([a1, a2])
    pos = {"c": np.zeros(2), "b": a1 / 2, "a": a2 / 2}
    if flavor == "effective":
        subs = [_Sublattice(s, "resonator", tuple(pos[s]), params.onsite) for s in "abc"]
        J = params.J
        templates = [
            ("a", "b", (0, 0), J), ("b", "c", (0, 0), J), ("c", "a", (0, 0), J),
            ("b", "a", (1, -1), J), ("b", "c", (1, 0), J), ("a", "c", (0, 1), J),
        ]
        return _UnitCell(bravais, subs, templates)
    f = _per_ancilla_couplings(params, 3)
    res = params.omega_r - 0.5 * params.omega_a
    up = (pos["a"] + pos["b"] + pos["c"]) / 3
    down = (pos["b"] + (pos["a"] + a1 - a2) + (pos["c"] + a1)) / 3
    subs = [_Sublattice(s, "resonator", tuple(pos[s]), res) for s in "abc"]
    subs += [
        _Sublattice("u", "ancilla", tuple(up), 0.5 * params.omega_a),
        _Sublattice("d", "ancilla", tuple(down), 0.5 * params.omega_a),
    ]
    templates = [
        ("u", "a", (0, 0), -f[0]), ("u", "b", (0, 0), -f[1]), ("u", "c", (0, 0), -f[2]),
        ("d", "a", (1, -1), -f[0]), ("d", "b", (0, 0), -f[1]), ("d", "c", (1, 0), -f[2]),
    ]
    return _UnitCell(bravais, subs, templates)


def _per_ancilla_couplings(params, n_star):
    if not isinstance(params, StarParams):
        raise TypeError("full models take StarParams")
    if params.n != n_star:
        raise ValueError(f"full model needs StarParams with n = {n_star}, got n = {params.n}")
    return params.couplings


# -- assembly ---------------------------------------------------------------

def _assemble(spec, flavor, params, cell):
    extents = spec.extents
    cells = list(itertools.product(*(range(e) for e in extents)))

    def wrap(c):
        if spec.periodic:
            return tuple(x % e for x, e in zip(c, extents))
        return c if all(0 <= x < e for x, e in zip(c, extents)) else None

    raw_bonds = []
    for c in cells:
        for src, dst, d, amp in cell.templates:
            target = wrap(tuple(x + dx for x, dx in zip(c, d)))
            if target is not None:
                raw_bonds.append(((c, src), (target, dst), amp))

    keep = {(c, s.name) for c in cells for s in cell.sublattices}
    if flavor == "full" and not spec.periodic:
        # an ancilla touching fewer than two resonators mediates nothing
        touch = {}
        for p, q, _ in raw_bonds:
            for key in (p, q):
                touch[key] = touch.get(key, 0) + 1
        roles = {s.name: s.role for s in cell.sublattices}
        keep = {k for k in keep if roles[k[1]] != "ancilla" or touch.get(k, 0) >= 2}

    sites, index = [], {}
    for c in cells:
        for s in cell.sublattices:
            if (c, s.name) not in keep:
                continue
            index[(c, s.name)] = len(sites)
            pos = np.asarray(c, dtype=float) @ cell.bravais + np.asarray(s.offset)
            sites.append(Site(s.role, c, s.name, tuple(float(x) for x in pos)))

    onsite = {s.name: s.onsite for s in cell.sublattices}
    h = np.zeros((len(sites), len(sites)))
    for i, site in enumerate(sites):
        h[i, i] = onsite[site.sublattice]

    bonds, seen = [], set()
    for p, q, amp in raw_bonds:
        if p not in index or q not in index:
            continue
        i, j = index[p], index[q]
        pair = (min(i, j), max(i, j))
        if i == j or pair in seen:
            raise ValueError(f"lattice too small: degenerate bond between sites {i} and {j}")
        seen.add(pair)
        bonds.append((i, j, amp))
        h[i, j] += amp
        h[j, i] += amp
    return LatticeModel(spec, flavor, sites, bonds, h, params, cell)


def _check_flavor(flavor):
    if flavor not in ("full", "effective"):
        raise ValueError(f"unknown flavor {flavor!r}")


def build_chain(spec, flavor, params):
    if spec.kind != "chain":
        raise ValueError("build_chain needs a chain LatticeSpec")
    _check_flavor(flavor)
    return _assemble(spec, flavor, params, _chain_cell(flavor, params))


def build_kagome(spec, flavor, params):
    if spec.kind != "kagome":
        raise ValueError("build_kagome needs a kagome LatticeSpec")
    _check_flavor(flavor)
    return _assemble(spec, flavor, params, _kagome_cell(flavor, params))


def build_lattice(spec, flavor, params):
    builder = build_chain if spec.kind == "chain" else build_kagome
    return builder(spec, flavor, params)


def effective_from_full(full):
    """Resonator-only model with the star's hopping and dressed resonator energy."""
    if full.flavor != "full":
        raise ValueError("effective_from_full needs a full-flavor model")
    params = full.params
    if not params.is_uniform:
        raise ValueError("effective model needs uniform couplings")
    n_star = full.spec.n_star
    J = effective_coupling(n_star, params.f, params.delta)
    _, dressed = dress_star(StarParams.uniform(n_star, params.omega_r, params.omega_a, params.f))
    return build_lattice(full.spec, "effective", EffectiveParams(J, dressed.eps_r))


# -- momentum space ---------------------------------------------------------

def bloch_model(model):
    if not model.spec.periodic:
        raise ValueError("Bloch Hamiltonian needs a periodic model")
    cell = model.cell
    dim = len(cell.sublattices)
    zero = (0,) * cell.bravais.shape[0]
    blocks = {zero: np.diag([s.onsite for s in cell.sublattices]).astype(complex)}
    for src, dst, d, amp in cell.templates:
        i, j = cell.index(src), cell.index(dst)
        neg = tuple(-x for x in d)
        blocks.setdefault(d, np.zeros((dim, dim), dtype=complex))[i, j] += amp
        blocks.setdefault(neg, np.zeros((dim, dim), dtype=complex))[j, i] += np.conj(amp)
    reciprocal = 2 * np.pi * np.linalg.inv(cell.bravais).T
    return BlochModel(blocks, dim, cell.bravais, reciprocal)


def bloch_hamiltonian(model, k):
    return bloch_model(model).hamiltonian(k)


def uniform_k_grid(model, counts=None):
    """Cartesian k-points m_i / counts_i along each reciprocal vector.

    The default counts equal the lattice extents, so the grid is commensurate
    with the finite periodic lattice.
    """
    if not model.spec.periodic:
        raise ValueError("k-grid needs a periodic model")
    counts = model.spec.extents if counts is None else tuple(np.atleast_1d(counts))
    recip = bloch_model(model).reciprocal
    frac = np.array(list(itertools.product(*(np.arange(c) / c for c in counts))))
    return frac @ recip


@dataclass
class BandTable:
    ks: np.ndarray  # (K, dim_k)
    energies: np.ndarray  # (K, bands), ascending per row

    def rows(self):
        for k, row in zip(self.ks, self.energies):
            for band, e in enumerate(row):
                yield tuple(k), band, float(e)

    def spreads(self):
        return self.energies.max(axis=0) - self.energies.min(axis=0)


def band_structure(model, k_grid):
    k_grid = np.asarray(k_grid, dtype=float)
    if k_grid.size == 0:
        raise ValueError("empty k-grid")
    if k_grid.ndim == 1:
        k_grid = k_grid[:, None]
    bloch = bloch_model(model)
    energies = np.array([eig_hermitian(bloch.hamiltonian(k)).eigenvalues for k in k_grid])
    return BandTable(k_grid, energies)


def flat_bands(table, rtol, scale):
    """Indices of bands whose spread is below ``rtol * scale``."""
    return [b for b, s in enumerate(table.spreads()) if s < rtol * abs(scale)]


def resonator_band_deviation(full, effective, k_grid):
    """Largest mismatch between the full model's resonator-dominated bands and
    the effective bands, after removing the mean offset, in units of |J|.

    The offset absorbs the constant dressing shift the effective model leaves
    out (each lattice resonator belongs to two stars, the effective diagonal
    counts one).
    """
    bf, be = bloch_model(full), bloch_model(effective)
    res = [i for i, s in enumerate(full.cell.sublattices) if s.role == "resonator"]
    diffs = []
    for k in np.atleast_2d(k_grid).reshape(len(k_grid), -1):
        w, v = eig_hermitian(bf.hamiltonian(k))
        weight = np.sum(np.abs(v[res, :]) ** 2, axis=0)
        picked = np.sort(w[np.argsort(-weight, kind="stable")[: len(res)]])
        diffs.append(picked - eig_hermitian(be.hamiltonian(k)).eigenvalues)
    diffs = np.array(diffs)
    return float(np.max(np.abs(diffs - diffs.mean())) / abs(effective.params.J))
