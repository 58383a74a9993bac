"""Convergence criteria with explicit numeric radii.

Four roads to a certificate, all sharing one currency: a per-bond weight
W(X) = e^{|beta| ||Phi(X)||} - 1 dominating every polymer activity
factor, and bookkeeping functions zeta(X) > 0.

- The tree criterion, in four nested forms, certifies that the anchored
  weighted polymer sum T_a = sup_x sum_{polymers B, x in supp B}
  prod_{X in B} W(X) e^{a|X|} stays below e^a - 1, with
  e^a = 1 + sup_x sum_{X ni x} zeta(X).
- The fixed-point criterion iterates mu -> lambda * phi(mu) on pinned
  compatible families; convergence from below identifies the maximal
  fixed point, and any mu with lambda * phi(mu) <= mu is a certificate.
- The nearest-neighbor closed form specializes the tree criterion to
  two-site bonds on Z^d and maximizes over a scalar zeta.
- The universal radius uses zeta(X) proportional to e^{-kappa |X|} and
  certifies any interaction with finite alpha-norm.

A comparison scan against an older quantum-criterion root equation
(`park_compare`) and geometric-grid radius scans round the module out.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .model import (
    Hamiltonian,
    Interaction,
    LatticeModel,
    Region,
    alpha_norm,
    assemble_hamiltonian,
    operator_norm,
)
from .numeric import bisect_root, geometric_grid, golden_max
from .polymers import Polymer, enumerate_polymers, incompatibility_graph

__all__ = [
    "TreeReport",
    "CriterionReport",
    "tree_bound",
    "gk_criterion",
    "anchored_polymer_sum",
    "FPResult",
    "FPReport",
    "fp_phi",
    "fp_iterate",
    "fp_criterion",
    "NNRadius",
    "nn_radius",
    "UniversalRadius",
    "universal_radius",
    "ParkRow",
    "ParkScan",
    "park_compare",
    "park_table_value",
    "RadiusScan",
    "beta_radius",
]

TREE_FORMS = ("direct", "bracketed", "per_site_product", "exponential")


# ---------------------------------------------------------------------------
# bond structure shared by the tree forms


class _Structure:
    """Per-bond-class sizes, norms, and overlap counts.

    For a finite Hamiltonian every bond is its own class. For a
    translation-invariant model the classes are the templates, with
    exact per-site and neighborhood counts.
    """

    def __init__(self, sizes, norms, neighbor_counts, site_counts):
        self.sizes = list(sizes)
        self.norms = list(norms)
        # neighbor_counts[i] = list of (class j, multiplicity) over bonds
        # overlapping a representative of class i, excluding itself
        self.neighbor_counts = neighbor_counts
        # site_counts = list of dicts {class: multiplicity} per sampled site
        self.site_counts = site_counts

    def site_sum(self, zetas) -> float:
        return max(
            (sum(zetas[i] * c for i, c in counts.items()) for counts in self.site_counts),
            default=0.0,
        )

    def site_product(self, zetas) -> float:
        best = 1.0
        for counts in self.site_counts:
            p = 1.0
            for i, c in counts.items():
                p *= (1.0 + zetas[i]) ** c
            best = max(best, p)
        return best

    def neighbor_product(self, idx: int, zetas) -> float:
        p = 1.0
        for j, c in self.neighbor_counts[idx]:
            p *= (1.0 + zetas[j]) ** c
        return p


def _finite_structure(bonds, norms) -> _Structure:
    supports = [set(b) for b in bonds]
    m = len(bonds)
    neighbor_counts = []
    for i in range(m):
        row: dict[int, int] = {}
        for j in range(m):
            if j != i and supports[i] & supports[j]:
                row[j] = row.get(j, 0) + 1
        neighbor_counts.append(sorted(row.items()))
    sites = sorted({s for b in bonds for s in b})
    site_counts = []
    for s in sites:
        row = {}
        for i in range(m):
            if s in supports[i]:
                row[i] = row.get(i, 0) + 1
        site_counts.append(row)
    return _Structure([len(b) for b in bonds], norms, neighbor_counts, site_counts)


def _lattice_structure(model: LatticeModel) -> _Structure:
    d = model.dimension
    r = max(1, model.range())
    sizes = [len(off) for off, _ in model.templates]
    norms = [operator_norm(data) for off, data in model.templates]
    reps = [set(off) for off, _ in model.templates]
    neighbor_counts = []
    for t, rep in enumerate(reps):
        row: dict[int, int] = {}
        for t2, (off2, _) in enumerate(model.templates):
            for anchor in itertools.product(*(range(-r, r + 1) for _ in range(d))):
                bond2 = {tuple(a + o for a, o in zip(anchor, s)) for s in off2}
                if t2 == t and all(c == 0 for c in anchor):
                    continue
                if rep & bond2:
                    row[t2] = row.get(t2, 0) + 1
        neighbor_counts.append(sorted(row.items()))
    # every site is equivalent: template t covers a site in len(off) ways
    site_counts = [{t: len(off) for t, (off, _) in enumerate(model.templates)}]
    return _Structure(sizes, norms, neighbor_counts, site_counts)


def _structure_of(source) -> _Structure:
    if isinstance(source, LatticeModel):
        return _lattice_structure(source)
    if isinstance(source, Hamiltonian):
        return _finite_structure(source.bonds, source.norms)
    if isinstance(source, Interaction):
        bonds = source.bonds()
        return _finite_structure(bonds, [source.norm(b) for b in bonds])
    raise ConfigError(f"no bond structure for {type(source).__name__}")


def _resolve_zeta(zeta, structure: _Structure) -> list[float]:
    if zeta is None:
        raise ConfigError("zeta must be resolved before this point")
    if np.isscalar(zeta):
        return [float(zeta)] * len(structure.sizes)
    if callable(zeta):
        return [float(zeta(s, w)) for s, w in zip(structure.sizes, structure.norms)]
    out = [float(z) for z in zeta]
    if len(out) != len(structure.sizes):
        raise ConfigError("zeta sequence length does not match bond classes")
    return out


# ---------------------------------------------------------------------------
# tree criterion


@dataclass(frozen=True)
class TreeReport:
    """Result of one tree-form check at fixed weights and zeta."""

    holds: bool
    form: str
    a: float
    e_a: float
    site_sum: float
    margins: tuple[float, ...]
    zeta: tuple[float, ...]


def _tree_lhs(form: str, w: float, size: int, neigh_prod: float, s: float, q: float) -> float:
    if form == "direct":
        return w * neigh_prod
    if form == "bracketed":
        return w * (1.0 + s) ** size * neigh_prod
    if form == "per_site_product":
        return w * q ** (2 * size)
    if form == "exponential":
        return w * math.exp(2 * size * s)
    raise ConfigError(f"unknown tree form {form!r}; choose one of {TREE_FORMS}")


def tree_bound(weights, structure_source, zeta, form: str = "bracketed") -> TreeReport:
    """Check one tree form: per bond class, lhs(form) <= zeta.

    `weights` is a per-class sequence of polymer weight factors. The
    certificate, when it holds for the bracketed or a stronger form,
    bounds the anchored weighted polymer sum by site_sum = e^a - 1.
    """
    structure = (
        structure_source
        if isinstance(structure_source, _Structure)
        else _structure_of(structure_source)
    )
    zetas = _resolve_zeta(zeta, structure)
    w = [float(x) for x in weights]
    if len(w) != len(structure.sizes):
        raise ConfigError("weights length does not match bond classes")
    s = structure.site_sum(zetas)
    q = structure.site_product(zetas)
    margins = []
    for i in range(len(w)):
        lhs = _tree_lhs(
            form, w[i], structure.sizes[i], structure.neighbor_product(i, zetas), s, q
        )
        margins.append(zetas[i] - lhs)
    holds = all(m >= 0.0 for m in margins) and bool(w)
    return TreeReport(
        holds=holds,
        form=form,
        a=math.log1p(s),
        e_a=1.0 + s,
        site_sum=s,
        margins=tuple(margins),
        zeta=tuple(zetas),
    )


def _default_scalar_zeta(weights, structure: _Structure, form: str) -> float:
    """Scalar zeta maximizing the worst margin (coarse grid plus golden)."""

    def worst(z: float) -> float:
        zetas = [z] * len(structure.sizes)
        s = structure.site_sum(zetas)
        q = structure.site_product(zetas)
        return min(
            zetas[i]
            - _tree_lhs(
                form, weights[i], structure.sizes[i],
                structure.neighbor_product(i, zetas), s, q,
            )
            for i in range(len(weights))
        )

    zs = np.geomspace(1e-6, 2.0, 160)
    vals = [worst(z) for z in zs]
    k = int(np.argmax(vals))
    lo = zs[max(0, k - 1)]
    hi = zs[min(len(zs) - 1, k + 1)]
    z, _ = golden_max(worst, lo, hi, tol=1e-13)
    return float(z)


@dataclass(frozen=True)
class CriterionReport:
    """Convergence certificate for an interaction at one inverse temperature."""

    holds: bool
    beta: complex
    form: str
    a: float
    e_a: float
    site_sum: float
    tree: TreeReport
    anchored_lower: float
    anchored_truncation: int
    guarantees: dict

    def ratio_bound(self, n_sites: int) -> float:
        """Certified bound on |Z without a bond family| / |Z| by support size."""
        return self.e_a**n_sites


def _zeta_for_a(structure: _Structure, a: float) -> float:
    """Scalar zeta whose per-site sum meets e^a - 1 exactly."""
    count = max(
        (sum(c for c in counts.values()) for counts in structure.site_counts),
        default=0,
    )
    if count == 0:
        raise NumericalError("no bonds: the weight a fixes no zeta")
    return math.expm1(a) / count


def gk_criterion(
    source,
    beta: complex,
    a: float | None = None,
    zeta=None,
    form: str = "bracketed",
    anchored_truncation: int = 4,
) -> CriterionReport:
    """Tree-majorant certificate at inverse temperature beta.

    Weights are W(X) = e^{|beta| ||Phi(X)||} - 1 per bond class. The
    anchored weighted polymer sum T_a is evaluated two ways: enumerated
    up to `anchored_truncation` bonds (a lower bound, diagnostic only)
    and through the chosen tree form (an upper bound); only the upper
    bound certifies, by capping T_a at e^a - 1.

    With `a` given, the scalar zeta is fixed so the per-site zeta sum
    meets e^a - 1; with `zeta` given, a follows from it; with neither,
    a scalar zeta maximizing the worst margin is searched.
    """
    if form not in TREE_FORMS:
        raise ConfigError(f"unknown tree form {form!r}; choose one of {TREE_FORMS}")
    structure = _structure_of(source)
    ab = abs(beta)
    weights = [math.expm1(ab * w) for w in structure.norms]
    if zeta is None:
        if a is not None:
            zeta = _zeta_for_a(structure, a)
        else:
            zeta = _default_scalar_zeta(weights, structure, form)
    tree = tree_bound(weights, structure, zeta, form=form)
    anchored = anchored_polymer_sum(source, beta, tree.a, anchored_truncation)
    guarantees = {}
    if tree.holds and form != "direct":
        guarantees = {
            "anchored_polymer_sum": tree.site_sum,
            "pinned_cluster_majorant": tree.site_sum,
            "log_ratio_per_site": tree.a,
        }
    return CriterionReport(
        holds=tree.holds,
        beta=complex(beta),
        form=form,
        a=tree.a,
        e_a=tree.e_a,
        site_sum=tree.site_sum,
        tree=tree,
        anchored_lower=anchored,
        anchored_truncation=anchored_truncation,
        guarantees=guarantees,
    )


def anchored_polymer_sum(source, beta: complex, a: float, truncation: int) -> float:
    """sup_x sum over polymers through x of prod W(X) e^{a|X|}, enumerated.

    A lower bound on the anchored sum the tree criterion caps (it is cut
    at `truncation` bonds per polymer), monotone in the truncation.
    """
    if isinstance(source, LatticeModel):
        r = max(1, source.range())
        radius = truncation * r
        sites = itertools.product(
            *(range(-radius, radius + 1) for _ in range(source.dimension))
        )
        ham = assemble_hamiltonian(source, Region.from_sites(sites), boundary="free")
        anchor = (0,) * source.dimension
        polymers = enumerate_polymers(ham, truncation, anchor=anchor)
        per_site = {anchor: 0.0}
    elif isinstance(source, Hamiltonian):
        ham = source
        polymers = enumerate_polymers(ham, truncation)
        per_site = {s: 0.0 for s in ham.sites}
    else:
        raise ConfigError("anchored sums need a Hamiltonian or a LatticeModel")
    ab = abs(beta)
    for p in polymers:
        w = 1.0
        for i in p.bonds:
            w *= math.expm1(ab * ham.norms[i]) * math.exp(a * len(ham.bonds[i]))
        for s in p.support:
            if s in per_site:
                per_site[s] += w
    return max(per_site.values(), default=0.0)


# ---------------------------------------------------------------------------
# fixed-point criterion on pinned compatible families


@dataclass(frozen=True)
class FPResult:
    """Outcome of the fixed-point iteration mu -> lam * phi(mu).

    `chain` records the sup norm of every iterate; started from zero it
    is nondecreasing (monotone approach from below), started from a
    certificate it is nonincreasing.
    """

    converged: bool
    diverged: bool
    mu: tuple[float, ...]
    iterations: int
    chain: tuple[float, ...]


@dataclass(frozen=True)
class FPReport:
    holds: bool
    margins: tuple[float, ...]
    phi: tuple[float, ...]


def _phi_single(cand_ids, adj, mu_vals) -> float:
    """Sum of prod mu over pairwise-compatible subsets of the candidates."""
    index_of = {c: k for k, c in enumerate(cand_ids)}
    local = []
    for c in cand_ids:
        mask = 0
        for d_ in cand_ids:
            if d_ != c and ((adj[c] >> d_) & 1):
                mask |= 1 << index_of[d_]
        local.append(mask)
    memo: dict[int, float] = {}

    def g(avail: int) -> float:
        if avail == 0:
            return 1.0
        hit = memo.get(avail)
        if hit is not None:
            return hit
        low = avail & -avail
        i = low.bit_length() - 1
        rest = avail ^ low
        val = g(rest) + mu_vals[i] * g(rest & ~local[i])
        memo[avail] = val
        return val

    return g((1 << len(cand_ids)) - 1)


def fp_phi(polymers, index: int, mu, adjacency=None) -> float:
    """phi_B0(mu): sum over compatible families, every member overlapping B0.

    The family may contain B0 itself; the empty family contributes 1.
    """
    if adjacency is None:
        adjacency = incompatibility_graph(polymers)
    cand_mask = adjacency[index] | (1 << index)
    cand_ids = [i for i in range(len(polymers)) if (cand_mask >> i) & 1]
    if len(cand_ids) > 24:
        raise NumericalError("fixed-point sum over more than 2^24 families refused")
    mu_vals = [float(mu[c]) for c in cand_ids]
    return _phi_single(cand_ids, adjacency, mu_vals)


def fp_iterate(
    polymers,
    lam,
    mu0=None,
    tol: float = 1e-14,
    max_iter: int = 10000,
    divergence: float = 1e9,
    adjacency=None,
) -> FPResult:
    """Iterate mu -> lam * phi(mu).

    Started from zero the iterates increase toward the minimal fixed
    point when one exists; crossing the divergence cap flags that none
    does. Starting from a certificate mu the iterates decrease.
    """
    if adjacency is None:
        adjacency = incompatibility_graph(polymers)
    m = len(polymers)
    lam = [float(x) for x in lam]
    mu = [0.0] * m if mu0 is None else [float(x) for x in mu0]
    chain = [max(mu, default=0.0)]
    for it in range(1, max_iter + 1):
        nxt = [lam[i] * fp_phi(polymers, i, mu, adjacency) for i in range(m)]
        delta = max(abs(a - b) for a, b in zip(nxt, mu))
        mu = nxt
        chain.append(max(mu, default=0.0))
        if max(mu) > divergence:
            return FPResult(
                converged=False, diverged=True, mu=tuple(mu),
                iterations=it, chain=tuple(chain),
            )
        if delta <= tol * (1.0 + max(mu)):
            return FPResult(
                converged=True, diverged=False, mu=tuple(mu),
                iterations=it, chain=tuple(chain),
            )
    return FPResult(
        converged=False, diverged=False, mu=tuple(mu),
        iterations=max_iter, chain=tuple(chain),
    )


def fp_criterion(polymers, lam, mu, adjacency=None) -> FPReport:
    """Does lam * phi(mu) <= mu hold componentwise?"""
    if adjacency is None:
        adjacency = incompatibility_graph(polymers)
    phis = [fp_phi(polymers, i, mu, adjacency) for i in range(len(polymers))]
    margins = [float(m_) - float(l_) * p for m_, l_, p in zip(mu, lam, phis)]
    return FPReport(
        holds=all(x >= 0 for x in margins),
        margins=tuple(margins),
        phi=tuple(phis),
    )


# ---------------------------------------------------------------------------
# nearest-neighbor closed form


@dataclass(frozen=True)
class NNRadius:
    """Best scalar-zeta certificate for two-site bonds on Z^d.

    `bound` caps W = e^{|beta| ||Phi|| } - 1 per bond; for unit-norm
    bonds the certified inverse-temperature radius is log(1 + bound).
    """

    dimension: int
    zeta: float
    bound: float
    beta_star: float
    quadratic_zeta: float


def _nn_log_objective(d: int):
    # The raw power (1+z)^{4d-2} over- or underflows a double for large d
    # well inside the search interval; the log form stays well scaled and
    # keeps the search strictly unimodal.
    def lg(z: float) -> float:
        return math.log(z) - 2.0 * math.log1p(2 * d * z) - (4 * d - 2) * math.log1p(z)

    return lg


def nn_radius(dimension: int) -> NNRadius:
    """Maximize zeta / ((1+2 d zeta)^2 (1+zeta)^{4d-2}) over zeta > 0.

    The stationarity condition is the quadratic
    (8 d^2 - 2 d) z^2 + (6 d - 3) z - 1 = 0, solved independently as a
    cross-check on the golden-section maximizer.
    """
    d = int(dimension)
    if d < 1:
        raise ConfigError("dimension must be at least 1")
    lg = _nn_log_objective(d)
    z, _ = golden_max(lg, 1e-9, 1.0, tol=1e-14)
    # Golden section localizes the argument only to ~sqrt(eps) at a flat
    # maximum; polish with Newton on the stationarity condition
    # 1/z - 4d/(1+2dz) - (4d-2)/(1+z) = 0.
    z = float(z)
    for _ in range(8):
        h = 1.0 / z - 4 * d / (1.0 + 2 * d * z) - (4 * d - 2) / (1.0 + z)
        hp = (
            -1.0 / (z * z)
            + 8 * d * d / (1.0 + 2 * d * z) ** 2
            + (4 * d - 2) / (1.0 + z) ** 2
        )
        step = h / hp
        z -= step
        if abs(step) <= 1e-15 * z:
            break
    best = math.exp(lg(z))
    aa = 8 * d * d - 2 * d
    bb = 6 * d - 3
    zq = (-bb + math.sqrt(bb * bb + 4 * aa)) / (2 * aa)
    return NNRadius(
        dimension=d,
        zeta=float(z),
        bound=float(best),
        beta_star=math.log1p(best),
        quadratic_zeta=float(zq),
    )


# ---------------------------------------------------------------------------
# universal exponential-weight radius


@dataclass(frozen=True)
class UniversalRadius:
    """Radius from zeta(X) = amplitude * e^{-kappa |X|} bookkeeping weights."""

    alpha: float
    gamma: float
    kappa: float
    c_kappa: float
    m_alpha: float
    amplitude: float
    t_star: float
    beta_star: float
    a: float


def _c_kappa(source, kappa: float) -> float:
    """sup over sites of sum over bonds through it of e^{-kappa |X|}."""
    if isinstance(source, LatticeModel):
        return float(
            sum(len(off) * math.exp(-kappa * len(off)) for off, _ in source.templates)
        )
    structure = _structure_of(source)
    best = 0.0
    for counts in structure.site_counts:
        best = max(
            best,
            sum(math.exp(-kappa * structure.sizes[i]) * c for i, c in counts.items()),
        )
    return best


def universal_radius(source, alpha: float = 1.0, gamma: float = 0.5) -> UniversalRadius:
    """Certified radius for any interaction with finite alpha-norm.

    Solves t e^t = amplitude for t = beta * m_alpha by bisection, where
    amplitude = (1-gamma) alpha / (2 C_kappa) and m_alpha is the
    alpha-weighted interaction norm.
    """
    if not 0 < gamma < 1:
        raise ConfigError("gamma must lie strictly between 0 and 1")
    if alpha <= 0:
        raise ConfigError("alpha must be positive")
    kappa = (1.0 - gamma) * alpha
    c = _c_kappa(source, kappa)
    m = alpha_norm(source, alpha)
    if m <= 0 or c <= 0:
        raise NumericalError("degenerate interaction: empty norms")
    amplitude = kappa / (2.0 * c)
    t_star = bisect_root(lambda t: t * math.exp(t) - amplitude, 0.0, amplitude, tol=1e-14)
    return UniversalRadius(
        alpha=alpha,
        gamma=gamma,
        kappa=kappa,
        c_kappa=c,
        m_alpha=m,
        amplitude=amplitude,
        t_star=t_star,
        beta_star=t_star / m,
        a=math.log1p(kappa / 2.0),
    )


# ---------------------------------------------------------------------------
# comparison against the older quantum root equation


@dataclass(frozen=True)
class ParkRow:
    alpha: float
    y_star: float | None
    beta_star: float | None


@dataclass(frozen=True)
class ParkScan:
    dimension: int
    rows: tuple[ParkRow, ...]
    sup_y: float
    sup_alpha: float


def park_table_value(dimension: int) -> float:
    """Closed-form radius 0.03/d (1 + 0.03/d) used in the comparison table."""
    x = 0.03 / dimension
    return x * (1.0 + x)


def park_compare(dimension: int, alphas=None) -> ParkScan:
    """Root scan of the comparison criterion over the free parameter alpha.

    The root equation, in y = 2 d beta, reads
        e^alpha y e^y = (e^{alpha/4 - y} - 1)(e^{alpha/4} - e^y)
    on 0 < y < alpha/8. Rows without a bracketed root keep None.
    """
    d = int(dimension)
    if alphas is None:
        alphas = geometric_grid(0.1, 20.0, per_decade=28)
    rows = []
    sup_y = 0.0
    sup_alpha = math.nan
    for alpha in alphas:
        hi = alpha / 8.0

        def f(y: float, _a=alpha) -> float:
            return math.exp(_a) * y * math.exp(y) - (
                math.expm1(_a / 4.0 - y) * (math.exp(_a / 4.0) - math.exp(y))
            )

        ys = np.linspace(hi * 1e-9, hi * (1 - 1e-9), 257)
        root = None
        prev_y, prev_f = ys[0], f(ys[0])
        for y in ys[1:]:
            fy = f(y)
            if (prev_f < 0) != (fy < 0):
                root = bisect_root(f, prev_y, y, tol=1e-12)
                break
            prev_y, prev_f = y, fy
        if root is None:
            rows.append(ParkRow(alpha=float(alpha), y_star=None, beta_star=None))
        else:
            rows.append(
                ParkRow(alpha=float(alpha), y_star=float(root), beta_star=float(root) / (2 * d))
            )
            if root > sup_y:
                sup_y = float(root)
                sup_alpha = float(alpha)
    return ParkScan(dimension=d, rows=tuple(rows), sup_y=sup_y, sup_alpha=sup_alpha)


# ---------------------------------------------------------------------------
# radius scans


@dataclass(frozen=True)
class RadiusScan:
    criterion: str
    points: tuple[tuple[float, bool], ...]
    beta_radius: float | None


def beta_radius(
    source,
    criterion: str = "tree",
    lo: float = 1e-4,
    hi: float = 2.0,
    per_decade: int = 64,
    **kw,
) -> RadiusScan:
    """Largest inverse temperature on a geometric grid that still certifies.

    criterion: "tree" (gk_criterion), "fp" (fixed-point
    iteration on the complex-temperature polymer bounds; finite systems
    only), or "universal" (closed form; the grid is then only sampled
    for reporting).
    """
    grid = geometric_grid(lo, hi, per_decade)
    points: list[tuple[float, bool]] = []
    if criterion == "tree":
        for b in grid:
            points.append((float(b), gk_criterion(source, b, **kw).holds))
    elif criterion == "universal":
        rad = universal_radius(source, **kw).beta_star
        for b in grid:
            points.append((float(b), bool(b <= rad)))
    elif criterion == "fp":
        if not isinstance(source, Hamiltonian):
            raise ConfigError("the fixed-point scan needs a finite Hamiltonian")
        polymers = enumerate_polymers(source, kw.pop("max_bonds", 4))
        adjacency = incompatibility_graph(polymers)
        for b in grid:
            ab = abs(b)
            lam = [
                math.prod(math.expm1(ab * source.norms[i]) for i in p.bonds)
                for p in polymers
            ]
            res = fp_iterate(polymers, lam, adjacency=adjacency, max_iter=2000)
            points.append((float(b), res.converged))
    else:
        raise ConfigError(f"unknown radius criterion {criterion!r}")
    radius = None
    for b, ok in points:
        if ok:
            radius = b
        else:
            break
    return RadiusScan(criterion=criterion, points=tuple(points), beta_radius=radius)
