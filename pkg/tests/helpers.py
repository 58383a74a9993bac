"""Builders for randomized small instances shared across test modules.

Instances stay at <= 6 sites and <= 6 bonds so the dense oracle is
instant, and couplings are scaled inversely with |beta| so polymer
activities stay around a few percent: truncated cluster series then
reach rounding level at modest orders and the whole randomized suite
runs in seconds.
"""

from __future__ import annotations

import numpy as np

from polymerion import (
    Interaction,
    LatticeModel,
    Observable,
    Region,
    assemble_hamiltonian,
)


def random_table(rng, q: int, nsites: int, scale: float) -> np.ndarray:
    """Real interaction table with entries uniform in [-scale, scale]."""
    return scale * (2.0 * rng.random((q,) * nsites) - 1.0)


def random_hermitian(rng, q: int, nsites: int, scale: float) -> np.ndarray:
    """Hermitian matrix rescaled to operator norm `scale`."""
    d = q**nsites
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = (m + m.conj().T) / 2.0
    top = float(np.linalg.norm(m, 2))
    return m * (scale / top)


def random_term(rng, q: int, kind: str, nsites: int, scale: float) -> np.ndarray:
    if kind == "classical":
        return random_table(rng, q, nsites, scale)
    return random_hermitian(rng, q, nsites, scale)


def random_beta(rng, allow_complex: bool = True) -> complex:
    mag = float(rng.uniform(0.05, 0.5))
    if allow_complex and rng.random() < 0.5:
        phase = float(rng.uniform(0.0, 2.0 * np.pi))
        return mag * complex(np.cos(phase), np.sin(phase))
    return complex(mag) if rng.random() < 0.5 else complex(-mag)


def chain_interaction(rng, q: int, kind: str, n_sites: int, scale: float,
                      with_fields: bool = False) -> Interaction:
    """Open chain of pair bonds on sites (0,) .. (n_sites-1,)."""
    terms = []
    for i in range(n_sites - 1):
        terms.append((((i,), (i + 1,)), random_term(rng, q, kind, 2, scale)))
    if with_fields:
        for i in range(0, n_sites, 2):
            terms.append((((i,),), random_term(rng, q, kind, 1, scale)))
    return Interaction.from_terms(q=q, kind=kind, terms=terms)


def scattered_interaction(rng, q: int, kind: str, scale: float) -> Interaction:
    """Pairs, one triple, and a field on a 2D cluster of 5 sites, 6 bonds."""
    a, b, c, d, e = (0, 0), (1, 0), (0, 1), (1, 1), (2, 0)
    terms = [
        ((a, b), random_term(rng, q, kind, 2, scale)),
        ((a, c), random_term(rng, q, kind, 2, scale)),
        ((b, d), random_term(rng, q, kind, 2, scale)),
        ((b, e), random_term(rng, q, kind, 2, scale)),
        ((a, b, d), random_term(rng, q, kind, 3, scale)),
        ((c,), random_term(rng, q, kind, 1, scale)),
    ]
    return Interaction.from_terms(q=q, kind=kind, terms=terms)


def ring_model(rng, q: int, kind: str, scale: float) -> LatticeModel:
    """1D translation-invariant pair interaction (wraps to a ring)."""
    data = random_term(rng, q, kind, 2, scale)
    return LatticeModel.from_templates(
        dimension=1, q=q, kind=kind, templates=[(((0,), (1,)), data)]
    )


def random_instance(rng, index: int):
    """One randomized Hamiltonian cycling through kinds and boundaries.

    Returns (label, ham, beta). Coupling scale shrinks as |beta| grows
    so that expm1(|beta| * norm) stays near 0.02.
    """
    kind = "classical" if index % 2 == 0 else "quantum"
    q = 2 if kind == "quantum" or rng.random() < 0.7 else 3
    beta = random_beta(rng)
    scale = 0.04 / max(0.1, abs(beta))
    style = index % 3
    if style == 0:
        n = int(rng.integers(4, 7))
        inter = chain_interaction(rng, q, kind, n, scale,
                                  with_fields=bool(rng.random() < 0.5 and n <= 4))
        region = Region.from_sites((i,) for i in range(n))
        ham = assemble_hamiltonian(inter, region, boundary="free")
        label = f"free-{kind}-{n}"
    elif style == 1:
        inter = scattered_interaction(rng, q, kind, scale)
        # Clip the region so the bonds touching (2, 0) stick out and are
        # contracted against the product state.
        region = Region.from_sites([(0, 0), (1, 0), (0, 1), (1, 1)])
        ham = assemble_hamiltonian(inter, region, boundary="product")
        label = f"product-{kind}"
    else:
        n = int(rng.integers(4, 7))
        model = ring_model(rng, q, kind, scale)
        ham = assemble_hamiltonian(model, Region.box([n]), boundary="periodic")
        label = f"periodic-{kind}-{n}"
    return label, ham, beta


def random_observable(rng, ham) -> Observable:
    """Observable on one or two sites of the instance."""
    sites = sorted(ham.sites)
    if len(sites) >= 2 and rng.random() < 0.5:
        pick = [sites[0], sites[1]]
    else:
        pick = [sites[int(rng.integers(0, len(sites)))]]
    q = ham.q
    if ham.kind == "classical":
        data = random_table(rng, q, len(pick), 1.0)
    else:
        data = random_hermitian(rng, q, len(pick), 1.0)
    return Observable.make(pick, data)


def random_connected_adjacency(rng, n: int) -> list[int]:
    """Adjacency bitmasks of a random connected graph on n vertices.

    A random spanning tree (each vertex hooks to an earlier one) plus
    each extra edge independently with probability 1/2.
    """
    adj = [0] * n
    for v in range(1, n):
        u = int(rng.integers(0, v))
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    for i in range(n):
        for j in range(i + 1, n):
            if not ((adj[i] >> j) & 1) and rng.random() < 0.5:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj
