"""Lattice spin models with finite-range multi-body interactions.

Sites are integer coordinate tuples. A bond is a sorted tuple of distinct
sites together with a local operator acting on them: a real table of
length q^k for classical models (the diagonal of the interaction in the
product basis), or a Hermitian q^k x q^k matrix for quantum models.

Tensor index convention: local state spaces are ordered by sorting the
sites lexicographically, and flattened row-major, so the largest site is
the fastest-varying index. `embed_table` and `embed_matrix` lift a local
operator onto a larger site set under this convention; they are the only
places the convention is spelled out, everything else goes through them.

A `Hamiltonian` is the result of assembling an interaction on a finite
region under one of three boundary conditions:

- free: keep bonds contained in the region;
- periodic: wrap bonds around a box, merging operators whose wrapped
  supports collide;
- product: contract bonds sticking out of the region against a product
  state, one single-site factor per outside site.

The assembled object is independent of the inverse temperature.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, WrapError

Site = tuple[int, ...]
Bond = tuple[Site, ...]

CLASSICAL = "classical"
QUANTUM = "quantum"

__all__ = [
    "Site",
    "Bond",
    "CLASSICAL",
    "QUANTUM",
    "as_site",
    "as_bond",
    "operator_norm",
    "embed_table",
    "embed_matrix",
    "Interaction",
    "LatticeModel",
    "Region",
    "Hamiltonian",
    "assemble_hamiltonian",
    "alpha_norm",
    "ising_model",
    "potts_model",
    "heisenberg_model",
    "xy_model",
]


def as_site(coords) -> Site:
    """Coerce an int or an iterable of ints to a site tuple."""
    if isinstance(coords, int):
        return (coords,)
    return tuple(int(c) for c in coords)


def as_bond(sites) -> Bond:
    """Coerce an iterable of sites to a canonical (sorted) bond."""
    out = tuple(sorted(as_site(s) for s in sites))
    if len(set(out)) != len(out):
        raise ConfigError(f"bond has repeated sites: {out}")
    if not out:
        raise ConfigError("bond must contain at least one site")
    dims = {len(s) for s in out}
    if len(dims) != 1:
        raise ConfigError(f"bond mixes site dimensions: {out}")
    return out


def operator_norm(data: np.ndarray) -> float:
    """Operator norm of a local term.

    Largest singular value for a matrix, max absolute entry for a
    diagonal table.
    """
    data = np.asarray(data)
    if data.ndim == 1:
        return float(np.max(np.abs(data))) if data.size else 0.0
    return float(np.linalg.norm(data, 2))


def _local_dim(q: int, nsites: int) -> int:
    return q**nsites


def embed_table(table: np.ndarray, support: Bond, sites: Bond, q: int) -> np.ndarray:
    """Embed a diagonal table living on `support` into `sites`.

    Returns a vector of length q^len(sites). `support` must be a
    subsequence of `sites` (both sorted).
    """
    k, n = len(support), len(sites)
    t = np.asarray(table).reshape((q,) * k)
    shape = tuple(q if s in set(support) else 1 for s in sites)
    # support and sites are both sorted, so no axis permutation is needed
    return np.broadcast_to(t.reshape(shape), (q,) * n).ravel()


def embed_matrix(mat: np.ndarray, support: Bond, sites: Bond, q: int) -> np.ndarray:
    """Embed a matrix living on `support` into `sites` (tensor with identities)."""
    k, n = len(support), len(sites)
    if k == n:
        return np.asarray(mat)
    t = np.asarray(mat).reshape((q,) * (2 * k))
    extra = [s for s in sites if s not in set(support)]
    eye = np.eye(q)
    for _ in extra:
        t = np.tensordot(t, eye, axes=0)
    # current axis layout: support rows, support cols, then (row, col) pairs
    # for each extra site in order
    row_axis: dict[Site, int] = {}
    col_axis: dict[Site, int] = {}
    for i, s in enumerate(support):
        row_axis[s] = i
        col_axis[s] = k + i
    for j, s in enumerate(extra):
        row_axis[s] = 2 * k + 2 * j
        col_axis[s] = 2 * k + 2 * j + 1
    perm = [row_axis[s] for s in sites] + [col_axis[s] for s in sites]
    dim = _local_dim(q, n)
    return t.transpose(perm).reshape(dim, dim)


def _permute_table(table: np.ndarray, old: Bond, site_map: Mapping[Site, Site], q: int):
    """Relabel the sites of a diagonal table; returns (new_bond, new_table)."""
    new = tuple(sorted(site_map[s] for s in old))
    perm = [old.index(next(s for s in old if site_map[s] == t)) for t in new]
    out = np.asarray(table).reshape((q,) * len(old)).transpose(perm).ravel()
    return new, out


def _permute_matrix(mat: np.ndarray, old: Bond, site_map: Mapping[Site, Site], q: int):
    """Relabel the sites of a matrix; returns (new_bond, new_matrix)."""
    k = len(old)
    new = tuple(sorted(site_map[s] for s in old))
    perm = [old.index(next(s for s in old if site_map[s] == t)) for t in new]
    full = perm + [k + p for p in perm]
    dim = _local_dim(q, k)
    out = np.asarray(mat).reshape((q,) * (2 * k)).transpose(full).reshape(dim, dim)
    return new, out


def _validate_term(bond: Bond, data: np.ndarray, q: int, kind: str) -> np.ndarray:
    dim = _local_dim(q, len(bond))
    arr = np.asarray(data)
    if kind == CLASSICAL:
        arr = arr.reshape(-1)
        if arr.size != dim:
            raise ConfigError(
                f"table on {bond} has {arr.size} entries, expected {dim}"
            )
        if np.iscomplexobj(arr) and np.max(np.abs(arr.imag)) > 1e-12:
            raise ConfigError(f"classical table on {bond} must be real")
        arr = np.real(arr).astype(float)
    elif kind == QUANTUM:
        if arr.shape != (dim, dim):
            raise ConfigError(
                f"matrix on {bond} has shape {arr.shape}, expected {(dim, dim)}"
            )
        arr = arr.astype(complex)
        scale = max(1.0, float(np.max(np.abs(arr))))
        if np.max(np.abs(arr - arr.conj().T)) > 1e-12 * scale:
            raise ConfigError(f"matrix on {bond} is not Hermitian")
    else:
        raise ConfigError(f"unknown kind {kind!r}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Interaction:
    """A finite collection of bonds with local operators.

    `terms` maps canonical bonds to validated arrays. Bonds may involve
    any sites; assembly against a region decides what is interior and
    what sticks out.
    """

    q: int
    kind: str
    terms: Mapping[Bond, np.ndarray]

    @classmethod
    def from_terms(cls, q: int, kind: str, terms) -> "Interaction":
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        out: dict[Bond, np.ndarray] = {}
        for sites, data in items:
            b = as_bond(sites)
            if b in out:
                raise ConfigError(f"duplicate term on bond {b}")
            out[b] = _validate_term(b, data, q, kind)
        return cls(q=q, kind=kind, terms=out)

    def bonds(self) -> tuple[Bond, ...]:
        return tuple(sorted(self.terms, key=lambda b: (len(b), b)))

    def norm(self, bond: Bond) -> float:
        return operator_norm(self.terms[bond])


@dataclass(frozen=True)
class LatticeModel:
    """A translation-invariant interaction on Z^d.

    Each template is a pair (offsets, data) where offsets is a canonical
    bond whose minimum is the origin. Translating a template by every
    lattice vector generates the interaction.
    """

    dimension: int
    q: int
    kind: str
    templates: tuple[tuple[Bond, np.ndarray], ...]

    @classmethod
    def from_templates(cls, dimension: int, q: int, kind: str, templates):
        canon = []
        for offsets, data in templates:
            b = as_bond(offsets)
            base = b[0]
            b = tuple(tuple(c - base[i] for i, c in enumerate(s)) for s in b)
            if any(len(s) != dimension for s in b):
                raise ConfigError(
                    f"template {b} does not match dimension {dimension}"
                )
            canon.append((b, _validate_term(b, data, q, kind)))
        return cls(dimension=dimension, q=q, kind=kind, templates=tuple(canon))

    def range(self) -> int:
        """Max coordinate spread of any template."""
        r = 0
        for offsets, _ in self.templates:
            for axis in range(self.dimension):
                r = max(r, max(s[axis] for s in offsets) - min(s[axis] for s in offsets))
        return r

    def bonds_at(self, anchor: Site):
        """Translates of each template anchored (minimum site) at `anchor`."""
        for offsets, data in self.templates:
            bond = tuple(tuple(a + o for a, o in zip(anchor, off)) for off in offsets)
            yield bond, data


@dataclass(frozen=True)
class Region:
    """A finite set of sites, optionally a box with a declared extent."""

    sites: tuple[Site, ...]
    extent: tuple[int, ...] | None = None

    @classmethod
    def box(cls, extent) -> "Region":
        extent = tuple(int(x) for x in extent)
        if any(x < 1 for x in extent):
            raise ConfigError(f"box extent must be positive: {extent}")
        sites = tuple(itertools.product(*(range(x) for x in extent)))
        return cls(sites=sites, extent=extent)

    @classmethod
    def from_sites(cls, sites) -> "Region":
        out = tuple(sorted({as_site(s) for s in sites}))
        if not out:
            raise ConfigError("region must contain at least one site")
        return cls(sites=out)

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(sorted(self.sites)))

    def __contains__(self, s: Site) -> bool:
        return s in set(self.sites)

    def __len__(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class Hamiltonian:
    """An assembled, temperature-independent interaction on a finite region.

    Bonds are in canonical order (by size, then lexicographic), with the
    effective operator and its norm aligned by index. `meta` records how
    many bonds were interior, wrapped, contracted against the boundary
    state, merged on colliding supports, or dropped as numerically zero.
    """

    q: int
    kind: str
    sites: tuple[Site, ...]
    bonds: tuple[Bond, ...]
    ops: tuple[np.ndarray, ...]
    norms: tuple[float, ...]
    boundary: str = "free"
    meta: Mapping[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.bonds)

    def bond_index(self, bond) -> int:
        return self.bonds.index(as_bond(bond))

    def support(self, bond_ids: Iterable[int]) -> tuple[Site, ...]:
        out: set[Site] = set()
        for i in bond_ids:
            out.update(self.bonds[i])
        return tuple(sorted(out))

    def restricted_away(self, x0) -> "Hamiltonian":
        """Drop every bond whose support meets the site set `x0`.

        The sites stay; under the normalized trace, free sites do not
        change any partition function.
        """
        x0 = frozenset(as_site(s) for s in x0)
        keep = [i for i, b in enumerate(self.bonds) if x0.isdisjoint(b)]
        return replace(
            self,
            bonds=tuple(self.bonds[i] for i in keep),
            ops=tuple(self.ops[i] for i in keep),
            norms=tuple(self.norms[i] for i in keep),
        )


def _theta_default(q: int, kind: str) -> np.ndarray:
    if kind == CLASSICAL:
        return np.full(q, 1.0 / q)
    return np.eye(q, dtype=complex) / q


def _validate_theta(theta, q: int, kind: str) -> np.ndarray:
    if theta is None:
        return _theta_default(q, kind)
    arr = np.asarray(theta)
    if kind == CLASSICAL:
        arr = arr.reshape(-1).astype(float)
        if arr.size != q:
            raise ConfigError(f"boundary state must have {q} entries")
        if np.any(arr < -1e-12):
            raise ConfigError("boundary state has negative probabilities")
        if abs(arr.sum() - 1.0) > 1e-10:
            raise ConfigError("boundary state probabilities must sum to 1")
        return arr
    arr = arr.astype(complex)
    if arr.shape != (q, q):
        raise ConfigError(f"boundary state must be a {q}x{q} density matrix")
    if np.max(np.abs(arr - arr.conj().T)) > 1e-12:
        raise ConfigError("boundary state must be Hermitian")
    if abs(np.trace(arr) - 1.0) > 1e-10:
        raise ConfigError("boundary state must have trace 1")
    if np.min(np.linalg.eigvalsh(arr)) < -1e-10:
        raise ConfigError("boundary state must be positive semidefinite")
    return arr


def _contract_outside(data, bond: Bond, inside: set, theta: np.ndarray, q: int, kind: str):
    """Contract the sites of `bond` outside `inside` against the product state.

    Returns (inner_bond, array on the inner sites).
    """
    keep = tuple(s for s in bond if s in inside)
    out_positions = [i for i, s in enumerate(bond) if s not in inside]
    if kind == CLASSICAL:
        t = np.asarray(data).reshape((q,) * len(bond))
        for pos in sorted(out_positions, reverse=True):
            t = np.tensordot(t, theta, axes=([pos], [0]))
        return keep, t.ravel()
    k = len(bond)
    t = np.asarray(data).reshape((q,) * (2 * k))
    support = list(bond)
    for s in [bond[i] for i in out_positions]:
        pos = support.index(s)
        kk = len(support)
        # rows first, then columns: contract row axis with theta's second
        # index and column axis with the first (trace of (1 (x) theta) op)
        t = np.tensordot(t, theta, axes=([pos, kk + pos], [1, 0]))
        support.pop(pos)
    dim = _local_dim(q, len(keep))
    return keep, t.reshape(dim, dim)


def _iter_source_bonds(source, region: Region, margin: int):
    """Yield (bond, data) candidates whose support can meet the region."""
    if isinstance(source, Interaction):
        for bond, data in source.terms.items():
            yield bond, data
        return
    if not isinstance(source, LatticeModel):
        raise ConfigError(f"cannot assemble from {type(source).__name__}")
    if not region.sites:
        return
    dim = len(region.sites[0])
    if dim != source.dimension:
        raise ConfigError(
            f"region sites have dimension {dim}, model has {source.dimension}"
        )
    lo = [min(s[i] for s in region.sites) - margin for i in range(dim)]
    hi = [max(s[i] for s in region.sites) + 1 for i in range(dim)]
    for anchor in itertools.product(*(range(a, b) for a, b in zip(lo, hi))):
        yield from source.bonds_at(anchor)


def assemble_hamiltonian(source, region: Region, boundary: str = "free", theta=None) -> Hamiltonian:
    """Build the effective Hamiltonian of `source` on `region`.

    source : Interaction or LatticeModel
    boundary : "free", "periodic", or "product"
    theta : product-state factor for the "product" boundary; defaults to
        the uniform distribution (classical) or the maximally mixed state
        (quantum). Ignored otherwise.

    Periodic assembly needs a LatticeModel and a box region; bonds are
    wrapped modulo the extent, one representative per translation class.
    A wrap that folds a bond onto itself raises WrapError. Effective
    operators landing on the same support are summed, and bonds whose
    operator is numerically zero are dropped.
    """
    if boundary not in ("free", "periodic", "product"):
        raise ConfigError(f"unknown boundary condition {boundary!r}")
    q, kind = source.q, source.kind
    inside = set(region.sites)
    acc: dict[Bond, np.ndarray] = {}
    meta = {"interior": 0, "wrapped": 0, "contracted": 0, "merged": 0, "dropped": 0}

    def add(bond: Bond, arr: np.ndarray):
        if bond in acc:
            acc[bond] = acc[bond] + arr
            meta["merged"] += 1
        else:
            acc[bond] = np.array(arr)

    if boundary == "periodic":
        if not isinstance(source, LatticeModel):
            raise ConfigError("periodic boundary requires a translation-invariant model")
        if region.extent is None or len(region.sites) != math.prod(region.extent):
            raise ConfigError("periodic boundary requires a full box region")
        extent = region.extent
        for anchor in itertools.product(*(range(x) for x in extent)):
            for bond, data in source.bonds_at(anchor):
                wrap = {s: tuple(c % x for c, x in zip(s, extent)) for s in bond}
                image = set(wrap.values())
                if len(image) != len(bond):
                    raise WrapError(
                        f"bond {bond} wraps onto itself on extent {extent}"
                    )
                if all(s in inside for s in bond):
                    meta["interior"] += 1
                    add(bond, np.asarray(data))
                else:
                    meta["wrapped"] += 1
                    if kind == CLASSICAL:
                        nb, arr = _permute_table(data, bond, wrap, q)
                    else:
                        nb, arr = _permute_matrix(data, bond, wrap, q)
                    add(nb, arr)
    else:
        margin = source.range() if isinstance(source, LatticeModel) else 0
        want_outside = boundary == "product"
        th = _validate_theta(theta, q, kind) if want_outside else None
        for bond, data in _iter_source_bonds(source, region, margin if want_outside else 0):
            if all(s in inside for s in bond):
                meta["interior"] += 1
                add(bond, np.asarray(data))
            elif want_outside and any(s in inside for s in bond):
                keep, arr = _contract_outside(data, bond, inside, th, q, kind)
                meta["contracted"] += 1
                add(keep, arr)

    bonds, ops, norms = [], [], []
    peak = max((operator_norm(a) for a in acc.values()), default=0.0)
    for bond in sorted(acc, key=lambda b: (len(b), b)):
        arr = acc[bond]
        w = operator_norm(arr)
        if w <= 1e-14 * max(1.0, peak):
            meta["dropped"] += 1
            continue
        arr.setflags(write=False)
        bonds.append(bond)
        ops.append(arr)
        norms.append(w)
    return Hamiltonian(
        q=q,
        kind=kind,
        sites=region.sites,
        bonds=tuple(bonds),
        ops=tuple(ops),
        norms=tuple(norms),
        boundary=boundary,
        meta=meta,
    )


def alpha_norm(source, alpha: float = 0.0) -> float:
    """sup over sites x of sum over bonds X containing x of ||Phi(X)|| e^{alpha |X|}.

    For a LatticeModel the supremum is exact by translation invariance:
    each template of m sites is counted m times per site.
    """
    if isinstance(source, LatticeModel):
        return float(
            sum(
                len(off) * operator_norm(data) * math.exp(alpha * len(off))
                for off, data in source.templates
            )
        )
    if isinstance(source, Interaction):
        items = list(source.terms.items())
    elif isinstance(source, Hamiltonian):
        items = list(zip(source.bonds, source.ops))
    else:
        raise ConfigError(f"cannot compute a norm for {type(source).__name__}")
    per_site: dict[Site, float] = {}
    for bond, data in items:
        w = operator_norm(data) * math.exp(alpha * len(bond))
        for s in bond:
            per_site[s] = per_site.get(s, 0.0) + w
    return max(per_site.values(), default=0.0)


# ---------------------------------------------------------------------------
# standard models

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _nn_templates(dimension: int, table_or_matrix) -> list:
    origin = (0,) * dimension
    out = []
    for axis in range(dimension):
        step = tuple(1 if i == axis else 0 for i in range(dimension))
        out.append(((origin, step), table_or_matrix))
    return out


def ising_model(dimension: int, coupling: float = 1.0, field_h: float = 0.0) -> LatticeModel:
    """Classical nearest-neighbor Ising model, Phi({x,y}) = -J s_x s_y.

    Spins take values +1, -1 (state 0 maps to +1). With field_h nonzero a
    single-site term -h s_x is added.
    """
    s = np.array([1.0, -1.0])
    table = -coupling * np.outer(s, s).ravel()
    templates = _nn_templates(dimension, table)
    if field_h:
        templates.append((((0,) * dimension,), -field_h * s))
    return LatticeModel.from_templates(dimension, 2, CLASSICAL, templates)


def potts_model(q: int, dimension: int, coupling: float = 1.0) -> LatticeModel:
    """Classical q-state Potts model, Phi({x,y}) = -J delta(s_x, s_y)."""
    table = -coupling * np.eye(q).ravel()
    return LatticeModel.from_templates(dimension, q, CLASSICAL, _nn_templates(dimension, table))


def heisenberg_model(dimension: int, coupling: float = 1.0) -> LatticeModel:
    """Quantum spin-1/2 Heisenberg model, Phi({x,y}) = J sigma_x . sigma_y.

    Antiferromagnetic for J > 0. The pair operator has eigenvalues J on
    the triplet and -3J on the singlet, so its norm is 3|J|.
    """
    mat = coupling * (
        np.kron(_PAULI_X, _PAULI_X)
        + np.kron(_PAULI_Y, _PAULI_Y)
        + np.kron(_PAULI_Z, _PAULI_Z)
    )
    return LatticeModel.from_templates(dimension, 2, QUANTUM, _nn_templates(dimension, mat))


def xy_model(dimension: int, coupling: float = 1.0) -> LatticeModel:
    """Quantum spin-1/2 XY model, Phi({x,y}) = J (sx sx + sy sy)."""
    mat = coupling * (np.kron(_PAULI_X, _PAULI_X) + np.kron(_PAULI_Y, _PAULI_Y))
    return LatticeModel.from_templates(dimension, 2, QUANTUM, _nn_templates(dimension, mat))
