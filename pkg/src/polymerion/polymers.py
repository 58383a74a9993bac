"""Polymers: connected families of bonds.

Two bonds are linked when their supports share a site; a polymer is a
family of bonds whose link graph is connected. Two polymers are
compatible when their supports are disjoint. The activity of a polymer
is the normalized trace of its inclusion-exclusion fugacity, computed
through the oracle's shared partition-function memo, together with the
product bound prod_X (e^{|beta| ||Phi(X)||} - 1) that controls it for
complex beta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Hamiltonian, Site
from .oracle import Oracle

__all__ = [
    "Polymer",
    "PolymerWeight",
    "bond_adjacency",
    "enumerate_polymers",
    "polymer_weights",
    "rho_fugacity",
    "compatible",
    "incompatibility_graph",
    "mobius_transform",
    "zeta_transform",
]


@dataclass(frozen=True)
class Polymer:
    """A connected bond family, stored as sorted indices into a Hamiltonian."""

    bonds: tuple[int, ...]
    support: frozenset[Site]

    def __len__(self) -> int:
        return len(self.bonds)


def bond_adjacency(ham: Hamiltonian) -> list[int]:
    """Bitmask adjacency of the bond link graph: bit j of mask[i] means overlap."""
    supports = [set(b) for b in ham.bonds]
    m = len(supports)
    masks = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if supports[i] & supports[j]:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _connected_subsets(adj: list[int], max_size: int):
    """Every connected subset of the link graph, as a bitmask, exactly once."""
    m = len(adj)

    def rec(sett: int, size: int, cand: int, banned: int):
        yield sett
        if size >= max_size:
            return
        processed = 0
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            nb = banned | processed
            newcand = (cand | (adj[v] & ~nb)) & ~sett & ~low
            yield from rec(sett | low, size + 1, newcand, nb)
            processed |= low

    for root in range(m):
        below = (1 << (root + 1)) - 1
        yield from rec(1 << root, 1, adj[root] & ~below, below)


def enumerate_polymers(ham: Hamiltonian, max_bonds: int, anchor=None) -> tuple[Polymer, ...]:
    """All polymers of at most `max_bonds` bonds, in canonical order.

    With `anchor` (a site or iterable of sites) only polymers whose
    support meets the anchor set are kept.
    """
    from .oracle import site_set

    adj = bond_adjacency(ham)
    anchor_set = site_set(anchor) if anchor is not None else None
    out = []
    for mask in _connected_subsets(adj, max_bonds):
        ids = tuple(_bits(mask))
        support = frozenset(s for i in ids for s in ham.bonds[i])
        if anchor_set is not None and anchor_set.isdisjoint(support):
            continue
        out.append(Polymer(bonds=ids, support=support))
    out.sort(key=lambda p: (len(p.bonds), p.bonds))
    return tuple(out)


@dataclass(frozen=True)
class PolymerWeight:
    """A polymer with its activity and the complex-temperature bound on it."""

    polymer: Polymer
    rho: complex
    bound: float


def polymer_weights(
    ham: Hamiltonian,
    beta: complex,
    max_bonds: int,
    polymers=None,
    oracle: Oracle | None = None,
    anchor=None,
) -> tuple[PolymerWeight, ...]:
    """Activities and bounds for every polymer up to the given size."""
    if polymers is None:
        polymers = enumerate_polymers(ham, max_bonds, anchor=anchor)
    if oracle is None:
        oracle = Oracle(ham, beta)
    ab = abs(beta)
    out = []
    for p in polymers:
        rho = oracle.rho(p.bonds)
        bound = 1.0
        for i in p.bonds:
            bound *= np.expm1(ab * ham.norms[i])
        out.append(PolymerWeight(polymer=p, rho=rho, bound=float(bound)))
    return tuple(out)


def rho_fugacity(ham: Hamiltonian, beta: complex, bond_ids) -> complex:
    """Activity of one bond family (normalized trace of its fugacity)."""
    return Oracle(ham, beta).rho(bond_ids)


def compatible(p: Polymer, q: Polymer) -> bool:
    """Polymers are compatible when their supports are disjoint."""
    return p.support.isdisjoint(q.support)


def incompatibility_graph(polymers) -> list[int]:
    """Bitmask adjacency: bit j of mask[i] set when polymers i, j overlap (i != j)."""
    supports = [p.support for p in polymers]
    m = len(supports)
    masks = [0] * m
    for i in range(m):
        for j in range(i + 1, m):
            if not supports[i].isdisjoint(supports[j]):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def mobius_transform(values) -> np.ndarray:
    """Subset Möbius transform of an array indexed by bitmask.

    Input F over subsets (length 2^m, bit i of the index means element i
    is present); output G with G(B) = sum over A subset of B of
    (-1)^{|B minus A|} F(A). Inverse of `zeta_transform`.
    """
    a = np.array(values, dtype=complex)
    n = a.size.bit_length() - 1
    if a.size != 1 << n:
        raise ValueError("length must be a power of two")
    a = a.reshape((2,) * n) if n else a
    for axis in range(n):
        idx1 = [slice(None)] * n
        idx0 = [slice(None)] * n
        idx1[axis] = 1
        idx0[axis] = 0
        a[tuple(idx1)] -= a[tuple(idx0)]
    return a.reshape(-1)


def zeta_transform(values) -> np.ndarray:
    """Subset sums: G(B) = sum over A subset of B of F(A)."""
    a = np.array(values, dtype=complex)
    n = a.size.bit_length() - 1
    if a.size != 1 << n:
        raise ValueError("length must be a power of two")
    a = a.reshape((2,) * n) if n else a
    for axis in range(n):
        idx1 = [slice(None)] * n
        idx0 = [slice(None)] * n
        idx1[axis] = 1
        idx0[axis] = 0
        a[tuple(idx1)] += a[tuple(idx0)]
    return a.reshape(-1)
