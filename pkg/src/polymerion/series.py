"""Cluster series: free energies, reduced correlations, local expectations.

A cluster is a multiset of polymers whose incompatibility graph (supports
overlap; a polymer always overlaps itself) is connected. Its weight is

    omega(G) * prod_B rho_B^{m_B} / prod_B m_B!

with omega the Ursell function of the multiset graph. Series are
truncated by total bond count: a cluster with multiplicities m_B of
polymers of |B| bonds has order sum m_B |B|, and `max_total_bonds` keeps
every cluster of order up to the cut.

Enumeration walks connected subsets of the distinct-polymer graph (a
multiset is connected exactly when its set of distinct polymers is) and
then distributes multiplicities within the order budget. Pinned variants
root the walk: at an extra polymer vertex for derivative-style pinned
sums, or at a single site for clusters whose support must contain it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .model import Hamiltonian, LatticeModel, Region, Site, assemble_hamiltonian
from .oracle import Observable, Oracle, site_set
from .polymers import Polymer, bond_adjacency, enumerate_polymers
from .ursell import expand_multiset, ursell

__all__ = [
    "TruncatedSeries",
    "CorrelationSeries",
    "ExpectationResult",
    "free_energy_series",
    "adaptive_free_energy_series",
    "free_energy_by_site",
    "pinned_series",
    "site_pinned_series",
    "correlation_series",
    "expectation_series",
    "expectation_families",
    "free_energy_density",
]


@dataclass(frozen=True)
class TruncatedSeries:
    """A cluster series cut at a total bond order.

    by_order[k] is the sum of all cluster weights of order k, so value ==
    sum(by_order). `converged` is set by the adaptive driver when the
    last increments fell below its tolerance, and is None otherwise.
    """

    value: complex
    by_order: tuple[complex, ...]
    truncation: int
    n_clusters: int
    converged: bool | None = None

    def partial(self, order: int) -> complex:
        return sum(self.by_order[: order + 1])


class _LazyValues:
    """Polymer activities computed on first use, sharing one oracle memo."""

    def __init__(self, oracle: Oracle, polymers):
        self._oracle = oracle
        self._polymers = polymers
        self._cache: dict[int, complex] = {}

    def __getitem__(self, i: int) -> complex:
        hit = self._cache.get(i)
        if hit is None:
            hit = self._oracle.rho(self._polymers[i].bonds)
            self._cache[i] = hit
        return hit

    def __len__(self) -> int:
        return len(self._polymers)


class _LazyAdjacency:
    """Incompatibility masks computed per vertex on first use."""

    def __init__(self, supports):
        self._supports = supports
        self._cache: dict[int, int] = {}

    def __getitem__(self, i: int) -> int:
        hit = self._cache.get(i)
        if hit is None:
            si = self._supports[i]
            mask = 0
            for j, sj in enumerate(self._supports):
                if j != i and not si.isdisjoint(sj):
                    mask |= 1 << j
            self._cache[i] = hit = mask
        return hit

    def __len__(self) -> int:
        return len(self._supports)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _connected_families(adj, sizes, max_total: int, rooted: bool):
    """Connected subsets as (sorted id list, total size), each exactly once.

    With `rooted` only subsets containing vertex 0 are produced (vertex 0
    is then the pin and contributes size 0).
    """

    def rec(sett: int, total: int, cand: int, banned: int):
        yield sett, total
        processed = 0
        while cand:
            low = cand & -cand
            cand ^= low
            v = low.bit_length() - 1
            nt = total + sizes[v]
            if nt <= max_total:
                nb = banned | processed
                newcand = (cand | (adj[v] & ~nb)) & ~sett & ~low
                yield from rec(sett | low, nt, newcand, nb)
            processed |= low

    if rooted:
        yield from rec(1, sizes[0], adj[0] & ~1, 1)
        return
    for root in range(len(sizes)):
        if sizes[root] > max_total:
            continue
        below = (1 << (root + 1)) - 1
        yield from rec(1 << root, sizes[root], adj[root] & ~below, below)


def _extra_multiplicities(sizes: list[int], slack: int):
    """All vectors of extra copies (>= 0) with sum extra_i * size_i <= slack."""
    k = len(sizes)
    extra = [0] * k

    def rec(i: int, left: int):
        if i == k:
            yield tuple(extra)
            return
        e = 0
        while e * sizes[i] <= left:
            extra[i] = e
            yield from rec(i + 1, left - e * sizes[i])
            e += 1
        extra[i] = 0

    yield from rec(0, slack)


def _run_series(
    polymers,
    values,
    adjacency,
    max_total: int,
    *,
    absolute: bool = False,
    pin_adj: int | None = None,
    pin_in_graph: bool = False,
    site_filter=None,
    per_cluster=None,
) -> tuple[list[complex], int]:
    """Shared accumulation loop; returns (sums by order, cluster count)."""
    m = len(polymers)
    sizes = [len(p.bonds) for p in polymers]
    supports = [p.support for p in polymers]
    by_order = [0j] * (max_total + 1)
    count = 0

    if pin_adj is not None:
        eadj = _PinShift(adjacency, pin_adj, m)
        esizes = [0] + sizes
        gen = _connected_families(eadj, esizes, max_total, rooted=True)
    else:
        gen = _connected_families(adjacency, sizes, max_total, rooted=False)

    for sett, base in gen:
        if pin_adj is not None:
            ids = [v - 1 for v in _bits(sett >> 1 << 1)]
            if not ids:
                if pin_in_graph:
                    by_order[0] += 1
                    count += 1
                continue
        else:
            ids = list(_bits(sett))
        support = frozenset().union(*(supports[i] for i in ids))
        if site_filter is not None and site_filter.isdisjoint(support):
            continue
        weight = 1.0 if per_cluster is None else per_cluster(support)
        k = len(ids)
        local = [0] * k
        for a in range(k):
            for b in range(a + 1, k):
                if (adjacency[ids[a]] >> ids[b]) & 1:
                    local[a] |= 1 << b
                    local[b] |= 1 << a
        if pin_in_graph:
            pin_bits = 0
            for a in range(k):
                if (pin_adj >> ids[a]) & 1:
                    pin_bits |= 1 << a
            glocal = [pin_bits << 1] + [
                (local[a] << 1) | ((pin_bits >> a) & 1) for a in range(k)
            ]
        id_sizes = [sizes[i] for i in ids]
        for extra in _extra_multiplicities(id_sizes, max_total - base):
            mult = [1 + e for e in extra]
            order = base + sum(e * s for e, s in zip(extra, id_sizes))
            if pin_in_graph:
                w = ursell(expand_multiset(glocal, [1] + mult))
            else:
                w = ursell(expand_multiset(local, mult))
            if w == 0:
                continue
            term = abs(w) if absolute else w
            for i, mm in zip(ids, mult):
                v = values[i]
                if absolute:
                    v = abs(v)
                term *= v**mm / math.factorial(mm)
            term *= weight
            by_order[order] += term
            count += 1
    return by_order, count


class _PinShift:
    """Adjacency view with the pin inserted at index 0."""

    def __init__(self, adjacency, pin_adj: int, m: int):
        self._adj = adjacency
        self._pin = pin_adj
        self._m = m

    def __getitem__(self, v: int) -> int:
        if v == 0:
            return self._pin << 1
        i = v - 1
        return (self._adj[i] << 1) | ((self._pin >> i) & 1)

    def __len__(self) -> int:
        return self._m + 1


def _prepare(ham: Hamiltonian, beta: complex, max_total: int, weights):
    if weights is not None:
        polymers = [w.polymer for w in weights]
        values = [w.rho for w in weights]
        return polymers, values
    oracle = Oracle(ham, beta)
    polymers = list(enumerate_polymers(ham, max_total))
    return polymers, _LazyValues(oracle, polymers)


def free_energy_series(
    ham: Hamiltonian,
    beta: complex,
    max_total_bonds: int,
    weights=None,
) -> TruncatedSeries:
    """log Z as a cluster series, truncated by total bond count.

    The series is infinite even on a finite bond set (polymers repeat),
    so exponentiating the value approximates Z with an error set by the
    first omitted order; at small activities a modest truncation already
    reaches rounding level.
    """
    polymers, values = _prepare(ham, beta, max_total_bonds, weights)
    adjacency = _LazyAdjacency([p.support for p in polymers])
    by_order, count = _run_series(polymers, values, adjacency, max_total_bonds)
    return TruncatedSeries(
        value=sum(by_order),
        by_order=tuple(by_order),
        truncation=max_total_bonds,
        n_clusters=count,
    )


def adaptive_free_energy_series(
    ham: Hamiltonian,
    beta: complex,
    tol: float = 1e-13,
    start: int = 4,
    step: int = 2,
    cap: int = 14,
) -> TruncatedSeries:
    """Raise the truncation until the last two order increments are tiny."""
    k = min(start, cap)
    while True:
        s = free_energy_series(ham, beta, k)
        scale = max(1.0, abs(s.value))
        tail = [abs(t) for t in s.by_order[-2:]]
        if all(t <= tol * scale for t in tail):
            return TruncatedSeries(
                value=s.value,
                by_order=s.by_order,
                truncation=s.truncation,
                n_clusters=s.n_clusters,
                converged=True,
            )
        if k >= cap:
            return TruncatedSeries(
                value=s.value,
                by_order=s.by_order,
                truncation=s.truncation,
                n_clusters=s.n_clusters,
                converged=False,
            )
        k = min(k + step, cap)


def free_energy_by_site(
    ham: Hamiltonian,
    beta: complex,
    max_total_bonds: int,
    weights=None,
) -> dict[Site, complex]:
    """Split the free-energy series by the smallest site of each cluster.

    The shares sum to the full series value, giving a volume-order
    decomposition log Z = sum over sites of h(x).
    """
    polymers, values = _prepare(ham, beta, max_total_bonds, weights)
    adjacency = _LazyAdjacency([p.support for p in polymers])
    shares: dict[Site, complex] = {s: 0j for s in ham.sites}

    sups = [p.support for p in polymers]
    sizes = [len(p.bonds) for p in polymers]
    for sett, base in _connected_families(adjacency, sizes, max_total_bonds, rooted=False):
        ids = list(_bits(sett))
        support = frozenset().union(*(sups[i] for i in ids))
        anchor = min(support)
        k = len(ids)
        local = [0] * k
        for a in range(k):
            for b in range(a + 1, k):
                if (adjacency[ids[a]] >> ids[b]) & 1:
                    local[a] |= 1 << b
                    local[b] |= 1 << a
        id_sizes = [sizes[i] for i in ids]
        for extra in _extra_multiplicities(id_sizes, max_total_bonds - base):
            mult = [1 + e for e in extra]
            w = ursell(expand_multiset(local, mult))
            if w == 0:
                continue
            term = complex(w)
            for i, mm in zip(ids, mult):
                term *= values[i] ** mm / math.factorial(mm)
            shares[anchor] += term
    return shares


def pinned_series(
    ham: Hamiltonian,
    beta: complex,
    pin: Polymer,
    max_total_bonds: int,
    absolute: bool = False,
    weights=None,
    values=None,
) -> TruncatedSeries:
    """Clusters rooted at an external polymer vertex.

    Sums omega(G(pin, B_1 .. B_n)) prod rho^m / m! over multisets of
    polymers (the pin itself may repeat among them); the order-0 term is
    1. With `absolute` the Ursell signs and activities are replaced by
    absolute values, giving the majorant used in convergence
    certificates. `values` overrides the activity vector (for evaluating
    the same combinatorial sum at bound values).
    """
    polymers, rho = _prepare(ham, beta, max_total_bonds, weights)
    if values is None:
        values = rho
    adjacency = _LazyAdjacency([p.support for p in polymers])
    pin_adj = 0
    for i, p in enumerate(polymers):
        if not pin.support.isdisjoint(p.support):
            pin_adj |= 1 << i
    by_order, count = _run_series(
        polymers,
        values,
        adjacency,
        max_total_bonds,
        absolute=absolute,
        pin_adj=pin_adj,
        pin_in_graph=True,
    )
    return TruncatedSeries(
        value=sum(by_order),
        by_order=tuple(by_order),
        truncation=max_total_bonds,
        n_clusters=count,
    )


def site_pinned_series(
    ham: Hamiltonian,
    beta: complex,
    site,
    max_total_bonds: int,
    absolute: bool = False,
    weights=None,
    values=None,
    per_cluster=None,
) -> TruncatedSeries:
    """Clusters whose support contains one given site.

    The site acts as a selector only; Ursell weights are those of the
    clusters themselves.
    """
    (x0,) = site_set(site)
    polymers, rho = _prepare(ham, beta, max_total_bonds, weights)
    if values is None:
        values = rho
    adjacency = _LazyAdjacency([p.support for p in polymers])
    pin_adj = 0
    for i, p in enumerate(polymers):
        if x0 in p.support:
            pin_adj |= 1 << i
    by_order, count = _run_series(
        polymers,
        values,
        adjacency,
        max_total_bonds,
        absolute=absolute,
        pin_adj=pin_adj,
        pin_in_graph=False,
        per_cluster=per_cluster,
    )
    return TruncatedSeries(
        value=sum(by_order),
        by_order=tuple(by_order),
        truncation=max_total_bonds,
        n_clusters=count,
    )


@dataclass(frozen=True)
class CorrelationSeries:
    """Reduced correlation estimate g(X0) = exp(-pinned cluster sum)."""

    pinned_sum: TruncatedSeries
    value: complex


def correlation_series(
    ham: Hamiltonian,
    beta: complex,
    x0,
    max_total_bonds: int,
    weights=None,
) -> CorrelationSeries:
    """Series for g(X0), the ratio of the X0-depleted partition function to Z.

    Sums the clusters whose support meets X0 and exponentiates the
    negative: removing X0 removes exactly those clusters from log Z.
    """
    x0 = site_set(x0)
    polymers, values = _prepare(ham, beta, max_total_bonds, weights)
    adjacency = _LazyAdjacency([p.support for p in polymers])
    by_order, count = _run_series(
        polymers,
        values,
        adjacency,
        max_total_bonds,
        site_filter=x0,
    )
    s = TruncatedSeries(
        value=sum(by_order),
        by_order=tuple(by_order),
        truncation=max_total_bonds,
        n_clusters=count,
    )
    return CorrelationSeries(pinned_sum=s, value=np.exp(-s.value))


def expectation_families(ham: Hamiltonian, x0, max_family_bonds: int):
    """Bond families whose every connected component meets X0.

    Yields tuples of bond indices (the empty family first). These index
    the inclusion-exclusion terms of the local-expectation identity.
    """
    x0 = site_set(x0)
    m = len(ham.bonds)
    work = sum(math.comb(m, r) for r in range(min(max_family_bonds, m) + 1))
    if work > 4_000_000:
        raise NumericalError(
            f"family enumeration needs {work} subsets; lower max_family_bonds"
        )
    adj = bond_adjacency(ham)
    meets = [not x0.isdisjoint(b) for b in ham.bonds]

    def components_ok(ids) -> bool:
        remaining = set(ids)
        while remaining:
            seed = remaining.pop()
            comp = {seed}
            todo = [seed]
            while todo:
                v = todo.pop()
                for w in list(remaining):
                    if (adj[v] >> w) & 1:
                        remaining.discard(w)
                        comp.add(w)
                        todo.append(w)
            if not any(meets[i] for i in comp):
                return False
        return True

    yield ()
    for r in range(1, min(max_family_bonds, m) + 1):
        for ids in itertools.combinations(range(m), r):
            if components_ok(ids):
                yield ids


@dataclass(frozen=True)
class ExpectationResult:
    value: complex
    n_families: int
    g_mode: str


def expectation_series(
    ham: Hamiltonian,
    beta: complex,
    obs: Observable,
    max_family_bonds: int | None = None,
    g_mode: str = "oracle",
    correlation_truncation: int | None = None,
    oracle: Oracle | None = None,
) -> ExpectationResult:
    """Local expectation through the inclusion-exclusion identity.

    <A> = sum over bond families B (components meeting supp A) of
    K(A, B) g(supp A union supp B), with K the Möbius transform of the
    A-weighted Boltzmann traces. At max_family_bonds == len(ham.bonds)
    and g_mode == "oracle" the sum is a finite identity, exact up to
    rounding; g_mode == "series" replaces each ratio g by its cluster
    series at `correlation_truncation`.
    """
    if g_mode not in ("oracle", "series"):
        raise ConfigError(f"unknown g_mode {g_mode!r}")
    if max_family_bonds is None:
        max_family_bonds = len(ham.bonds)
    if oracle is None:
        oracle = Oracle(ham, beta)
    x0 = frozenset(obs.support)
    trace_memo: dict[frozenset[int], complex] = {}

    def weighted(ids: frozenset[int]) -> complex:
        hit = trace_memo.get(ids)
        if hit is None:
            support = tuple(sorted(set(obs.support) | set(ham.support(ids))))
            hit = oracle.weighted_trace(obs, ids, support)
            trace_memo[ids] = hit
        return hit

    g_memo: dict[frozenset[Site], complex] = {}

    def g_of(sites: frozenset[Site]) -> complex:
        hit = g_memo.get(sites)
        if hit is None:
            if g_mode == "oracle":
                hit = oracle.reduced_correlation(sites)
            else:
                k = correlation_truncation
                if k is None:
                    k = len(ham.bonds)
                hit = correlation_series(ham, beta, sites, k).value
            g_memo[sites] = hit
        return hit

    total = 0j
    count = 0
    for ids in expectation_families(ham, x0, max_family_bonds):
        fam = frozenset(ids)
        k_val = 0j
        n = len(ids)
        for r in range(n + 1):
            sign = (-1) ** (n - r)
            for sub in itertools.combinations(ids, r):
                k_val += sign * weighted(frozenset(sub))
        if k_val == 0:
            continue
        sites = x0 | set(ham.support(fam))
        total += k_val * g_of(frozenset(sites))
        count += 1
    return ExpectationResult(value=total, n_families=count, g_mode=g_mode)


def free_energy_density(
    model: LatticeModel,
    beta: complex,
    max_total_bonds: int,
) -> TruncatedSeries:
    """Free-energy density of a translation-invariant model.

    Sums Ursell weights of the clusters whose support contains the
    origin, each divided by its support size; this is the infinite-volume
    limit of log Z over the volume. The window used is large enough to
    hold every cluster within the order budget.
    """
    r = max(1, model.range())
    radius = max_total_bonds * r
    sites = itertools.product(
        *(range(-radius, radius + 1) for _ in range(model.dimension))
    )
    region = Region.from_sites(sites)
    ham = assemble_hamiltonian(model, region, boundary="free")
    origin = (0,) * model.dimension
    return site_pinned_series(
        ham,
        beta,
        origin,
        max_total_bonds,
        per_cluster=lambda support: 1.0 / len(support),
    )
