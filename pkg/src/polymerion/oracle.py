"""Exact reference values on small volumes.

Everything here is brute force on the full product space: partition
functions through eigenvalues or vectorized exponentials, Gibbs
expectations through dense matrices, operator fugacities through subset
inclusion-exclusion. The point is to be unarguably correct on volumes
small enough to afford it; the series machinery is tested against this
module, never the other way around.

Traces are normalized: tr = Tr / dim for quantum models, the uniform
product average for classical ones. With this normalization the
partition function of a bond subset only depends on the sites its bonds
touch, which is what makes the subset memo in `Oracle` shareable across
polymers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .model import (
    CLASSICAL,
    Bond,
    Hamiltonian,
    Site,
    as_bond,
    as_site,
    embed_matrix,
    embed_table,
)

MAX_DENSE_DIM = 2**20

__all__ = [
    "Oracle",
    "Observable",
    "site_set",
    "partition_function",
    "xi_fugacity_exact",
    "gibbs_expectation",
    "reduced_correlation_exact",
]


@dataclass(frozen=True)
class Observable:
    """A local observable: a table (classical) or matrix (quantum) on a bond."""

    support: Bond
    data: np.ndarray

    @classmethod
    def make(cls, sites, data) -> "Observable":
        b = as_bond(sites)
        return cls(support=b, data=np.asarray(data))

    def norm(self) -> float:
        if self.data.ndim == 1:
            return float(np.max(np.abs(self.data)))
        return float(np.linalg.norm(self.data, 2))


def _check_dim(q: int, nsites: int):
    if q**nsites > MAX_DENSE_DIM:
        raise NumericalError(
            f"exact oracle refused: q^{nsites} states exceeds {MAX_DENSE_DIM}"
        )


def site_set(x0) -> frozenset[Site]:
    """Coerce a site or an iterable of sites to a frozenset of sites."""
    if isinstance(x0, tuple) and x0 and all(isinstance(c, (int, np.integer)) for c in x0):
        return frozenset([x0])
    return frozenset(as_site(s) for s in x0)


class Oracle:
    """Exact quantities for one assembled Hamiltonian at one temperature.

    Partition functions of bond subsets are memoized by the subset of
    bond indices, computed on the union of their supports.
    """

    def __init__(self, ham: Hamiltonian, beta: complex):
        self.ham = ham
        self.beta = complex(beta)
        self._z: dict[frozenset[int], complex] = {}
        self._all = frozenset(range(len(ham.bonds)))

    # -- building blocks ----------------------------------------------------

    def _support(self, bond_ids: frozenset[int]) -> tuple[Site, ...]:
        out: set[Site] = set()
        for i in bond_ids:
            out.update(self.ham.bonds[i])
        return tuple(sorted(out))

    def hamiltonian_on(self, bond_ids, support=None) -> tuple[tuple[Site, ...], np.ndarray]:
        """Total operator of the given bonds embedded on `support`."""
        ids = frozenset(bond_ids)
        if support is None:
            support = self._support(ids)
        q, ham = self.ham.q, self.ham
        _check_dim(q, len(support))
        if ham.kind == CLASSICAL:
            total = np.zeros(q ** len(support))
            for i in ids:
                total = total + embed_table(ham.ops[i], ham.bonds[i], support, q)
        else:
            dim = q ** len(support)
            total = np.zeros((dim, dim), dtype=complex)
            for i in ids:
                total = total + embed_matrix(ham.ops[i], ham.bonds[i], support, q)
        return support, total

    def boltzmann(self, bond_ids, support=None) -> tuple[tuple[Site, ...], np.ndarray]:
        """exp(-beta H_B) on `support` (table for classical, matrix for quantum)."""
        support, total = self.hamiltonian_on(bond_ids, support)
        if self.ham.kind == CLASSICAL:
            return support, np.exp(-self.beta * total)
        w, v = np.linalg.eigh(total)
        return support, (v * np.exp(-self.beta * w)) @ v.conj().T

    # -- partition functions ------------------------------------------------

    def z(self, bond_ids=None) -> complex:
        """Normalized-trace partition function of a bond subset."""
        ids = self._all if bond_ids is None else frozenset(bond_ids)
        hit = self._z.get(ids)
        if hit is not None:
            return hit
        if not ids:
            self._z[ids] = 1.0 + 0.0j
            return self._z[ids]
        support, total = self.hamiltonian_on(ids)
        if self.ham.kind == CLASSICAL:
            val = complex(np.mean(np.exp(-self.beta * total)))
        else:
            w = np.linalg.eigvalsh(total)
            val = complex(np.mean(np.exp(-self.beta * w)))
        self._z[ids] = val
        return val

    def z_avoiding(self, x0) -> complex:
        """Partition function with every bond meeting the site set x0 removed."""
        x0 = site_set(x0)
        ids = frozenset(
            i for i, b in enumerate(self.ham.bonds) if x0.isdisjoint(b)
        )
        return self.z(ids)

    def reduced_correlation(self, x0) -> complex:
        """g(X0) = Z with bonds meeting X0 removed, over the full Z."""
        denom = self.z()
        if denom == 0:
            raise NumericalError("partition function vanished; correlation undefined")
        return self.z_avoiding(x0) / denom

    # -- fugacities and expectations ----------------------------------------

    def xi(self, bond_ids) -> tuple[tuple[Site, ...], np.ndarray]:
        """Inclusion-exclusion fugacity operator of a bond family.

        sum over subfamilies B' of B of (-1)^{|B| - |B'|} exp(-beta H_{B'}),
        on the union support of B. Vanishes identically when the family is
        not connected.
        """
        ids = tuple(sorted(frozenset(bond_ids)))
        if len(ids) > 20:
            raise NumericalError("inclusion-exclusion over more than 2^20 subfamilies")
        support = self._support(frozenset(ids))
        q = self.ham.q
        _check_dim(q, len(support))
        if self.ham.kind == CLASSICAL:
            acc = np.zeros(q ** len(support), dtype=complex)
        else:
            dim = q ** len(support)
            acc = np.zeros((dim, dim), dtype=complex)
        n = len(ids)
        for r in range(n + 1):
            sign = (-1) ** (n - r)
            for sub in itertools.combinations(ids, r):
                _, bf = self.boltzmann(sub, support)
                acc = acc + sign * bf
        return support, acc

    def rho(self, bond_ids) -> complex:
        """Normalized trace of the fugacity operator, via the Z memo."""
        ids = tuple(sorted(frozenset(bond_ids)))
        n = len(ids)
        if n > 20:
            raise NumericalError("inclusion-exclusion over more than 2^20 subfamilies")
        total = 0.0 + 0.0j
        for r in range(n + 1):
            sign = (-1) ** (n - r)
            for sub in itertools.combinations(ids, r):
                total += sign * self.z(sub)
        return total

    def expectation(self, obs: Observable) -> complex:
        """Gibbs expectation tr(A exp(-beta H)) / Z on the full region."""
        ham = self.ham
        if not set(obs.support) <= set(ham.sites):
            raise ConfigError("observable support must lie inside the region")
        z = self.z()
        if z == 0:
            raise NumericalError("partition function vanished; expectation undefined")
        support, total = self.hamiltonian_on(self._all, support=ham.sites)
        q = ham.q
        if ham.kind == CLASSICAL:
            if obs.data.size != q ** len(obs.support):
                raise ConfigError("classical observables need one entry per state")
            a = embed_table(obs.data.astype(complex), obs.support, support, q)
            val = np.mean(a * np.exp(-self.beta * total))
        else:
            if obs.data.ndim != 2:
                raise ConfigError("quantum observables must be matrices")
            a = embed_matrix(obs.data.astype(complex), obs.support, support, q)
            w, v = np.linalg.eigh(total)
            bf = (v * np.exp(-self.beta * w)) @ v.conj().T
            val = np.trace(a @ bf) / bf.shape[0]
        return complex(val) / z

    def weighted_trace(self, obs: Observable, bond_ids, support) -> complex:
        """tr(A exp(-beta H_B)) on a fixed support (not divided by Z)."""
        support = tuple(sorted(set(support) | set(obs.support)))
        _, bf = self.boltzmann(bond_ids, support)
        q = self.ham.q
        if self.ham.kind == CLASSICAL:
            a = embed_table(obs.data.astype(complex), obs.support, support, q)
            return complex(np.mean(a * bf))
        a = embed_matrix(obs.data.astype(complex), obs.support, support, q)
        return complex(np.trace(a @ bf) / bf.shape[0])


# -- one-shot wrappers (tests and small scripts; heavy callers hold an Oracle)


def partition_function(ham: Hamiltonian, beta: complex, bond_ids=None) -> complex:
    return Oracle(ham, beta).z(bond_ids)


def xi_fugacity_exact(ham: Hamiltonian, beta: complex, bond_ids):
    return Oracle(ham, beta).xi(bond_ids)


def gibbs_expectation(ham: Hamiltonian, beta: complex, obs: Observable) -> complex:
    return Oracle(ham, beta).expectation(obs)


def reduced_correlation_exact(ham: Hamiltonian, beta: complex, x0) -> complex:
    return Oracle(ham, beta).reduced_correlation(x0)
