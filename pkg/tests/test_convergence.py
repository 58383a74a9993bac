import math

import numpy as np
import pytest
import scipy.special

from polymerion import (
    ConfigError,
    Oracle,
    Polymer,
    PolymerWeight,
    Region,
    anchored_polymer_sum,
    assemble_hamiltonian,
    beta_radius,
    enumerate_polymers,
    fp_criterion,
    fp_iterate,
    fp_phi,
    gk_criterion,
    incompatibility_graph,
    ising_model,
    nn_radius,
    park_compare,
    park_table_value,
    pinned_series,
    polymer_weights,
    tree_bound,
    universal_radius,
)
from polymerion.convergence import TREE_FORMS

TABLE = {
    2: (0.0873651, 0.0290245),
    3: (0.0538890, 0.0182059),
    4: (0.0389499, 0.0132611),
}


def test_nn_radius_reproduces_table_values():
    for d, (zeta, bound) in TABLE.items():
        r = nn_radius(d)
        assert abs(r.zeta - zeta) < 1e-6
        assert abs(r.bound - bound) < 1e-6
        assert abs(r.beta_star - math.log1p(r.bound)) < 1e-15


def test_nn_radius_routes_agree():
    for d in range(1, 11):
        r = nn_radius(d)
        assert abs(r.zeta - r.quadratic_zeta) <= 1e-10


def test_nn_radius_maximizer_is_stationary():
    for d in (1, 2, 5):
        r = nn_radius(d)
        h = (
            1.0 / r.zeta
            - 4 * d / (1.0 + 2 * d * r.zeta)
            - (4 * d - 2) / (1.0 + r.zeta)
        )
        assert abs(h) < 1e-9


def test_nn_radius_large_dimension_trend():
    # d * zeta approaches (sqrt(68) - 6) / 16 = 0.14039...
    limit = (math.sqrt(68.0) - 6.0) / 16.0
    assert abs(64 * nn_radius(64).zeta - 0.14127) < 1e-4
    assert abs(4096 * nn_radius(4096).zeta - limit) < 1e-3
    vals = [d * nn_radius(d).zeta for d in (2, 8, 32, 128)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_nn_radius_rejects_bad_dimension():
    with pytest.raises(ConfigError):
        nn_radius(0)


def test_tree_forms_get_monotonically_stronger():
    # At equal weights and zeta the four left-hand sides are ordered, so
    # each form implies every weaker one; margins shrink along the chain.
    model = ising_model(2)
    w = [math.expm1(0.02)] * len(model.templates)
    reports = [tree_bound(w, model, 0.08, form=f) for f in TREE_FORMS]
    worst = [min(r.margins) for r in reports]
    assert all(b <= a + 1e-15 for a, b in zip(worst, worst[1:]))
    for stronger, weaker in zip(reports[::-1], reports[::-1][1:]):
        if stronger.holds:
            assert weaker.holds


def test_tree_form_implications_across_betas():
    model = ising_model(2)
    for beta in np.linspace(0.001, 0.05, 12):
        rep = {
            f: gk_criterion(model, float(beta), zeta=0.0874, form=f)
            for f in TREE_FORMS
        }
        if rep["exponential"].holds:
            assert rep["per_site_product"].holds
        if rep["per_site_product"].holds:
            assert rep["bracketed"].holds
        if rep["bracketed"].holds:
            assert rep["direct"].holds


def test_gk_criterion_matches_table_radius_at_default_zeta():
    # The bracketed form at the optimal zeta certifies right up to the
    # Table 1 radius beta* = log(1 + bound) and fails just beyond it.
    for d in (2, 3):
        star = nn_radius(d).beta_star
        assert gk_criterion(ising_model(d), 0.999 * star).holds
        assert not gk_criterion(ising_model(d), 1.001 * star).holds


def test_gk_anchored_lower_bound_stays_below_certificate():
    model = ising_model(2)
    rep = gk_criterion(model, 0.02)
    assert rep.holds
    assert rep.anchored_lower <= rep.site_sum + 1e-12
    assert rep.guarantees["log_ratio_per_site"] == rep.a
    assert abs(rep.ratio_bound(3) - rep.e_a**3) < 1e-15


def test_gk_criterion_with_given_weight_exponent():
    # Fixing a near log(1 + 4 zeta^) reproduces the optimal-zeta regime.
    model = ising_model(2)
    a_star = math.log1p(4 * 0.0873651)
    rep = gk_criterion(model, 0.028, a=a_star)
    assert rep.holds
    assert abs(rep.e_a - math.exp(a_star)) < 1e-9
    assert not gk_criterion(model, 0.030, a=a_star).holds


def test_gk_criterion_on_finite_hamiltonian():
    ham = assemble_hamiltonian(ising_model(1), Region.box([5]), boundary="free")
    rep = gk_criterion(ham, 0.05)
    assert rep.holds
    direct = anchored_polymer_sum(ham, 0.05, rep.a, 4)
    assert direct <= rep.site_sum + 1e-12


def chain_polymers(n_overlapping):
    """Single-bond polymers that pairwise share one site."""
    shared = (0,)
    polys = []
    for i in range(n_overlapping):
        sup = frozenset([shared, (i + 1,)])
        polys.append(Polymer(bonds=(i,), support=sup))
    return polys


def test_fp_scalar_fixed_point_and_divergence():
    (p,) = chain_polymers(1)
    res = fp_iterate([p], [0.2])
    assert res.converged and not res.diverged
    assert abs(res.mu[0] - 0.25) < 1e-12  # lambda / (1 - lambda)
    bad = fp_iterate([p], [2.0], max_iter=500)
    assert bad.diverged and not bad.converged


def test_fp_two_overlapping_polymers_closed_form():
    polys = chain_polymers(2)
    lam = 0.2
    res = fp_iterate(polys, [lam, lam])
    assert res.converged
    assert abs(res.mu[0] - lam / (1 - 2 * lam)) < 1e-12
    # phi at the fixed point: independent sets within the neighborhood.
    assert abs(fp_phi(polys, 0, res.mu) - (1 + res.mu[0] + res.mu[1])) < 1e-12


def test_fp_chain_is_monotone_both_ways():
    polys = chain_polymers(2)
    lam = [0.15, 0.15]
    up = fp_iterate(polys, lam)
    assert all(b >= a - 1e-15 for a, b in zip(up.chain, up.chain[1:]))
    start = [1.0, 1.0]
    rep = fp_criterion(polys, lam, start)
    assert rep.holds
    down = fp_iterate(polys, lam, mu0=start)
    assert all(b <= a + 1e-15 for a, b in zip(down.chain, down.chain[1:]))
    assert abs(down.mu[0] - up.mu[0]) < 1e-10


def test_fp_sandwich_on_scalar_and_two_polymer_instances():
    # lambda |Sigma|(lambda) <= lambda* <= T^inf <= T^{n+1} <= T^n <= mu,
    # with the pinned absolute series supplying the left end.
    ham = assemble_hamiltonian(ising_model(1), Region.box([3]), boundary="free")
    beta = 0.4
    polys = list(enumerate_polymers(ham, 1))
    lam_val = float(abs(Oracle(ham, beta).rho((0,))))
    lam = [lam_val] * len(polys)

    for keep in (1, 2):
        sub = polys[:keep]
        lams = lam[:keep]
        up = fp_iterate(sub, lams)
        assert up.converged
        lam_star = max(up.mu)
        # Left end: the pinned absolute series at the bound activities.
        ws = tuple(
            PolymerWeight(polymer=p, rho=lam_val, bound=lam_val) for p in sub
        )
        sigma = pinned_series(ham, beta, sub[0], 16, absolute=True, weights=ws)
        left = lam_val * float(abs(sigma.value))
        assert left <= lam_star + 1e-9
        # Right end: a certified start descends through the sandwich.
        mu0 = [2.0 * lam_star + 0.1] * keep
        rep = fp_criterion(sub, lams, mu0)
        assert rep.holds
        down = fp_iterate(sub, lams, mu0=mu0)
        chain = down.chain
        assert all(b <= a + 1e-15 for a, b in zip(chain, chain[1:]))
        assert lam_star <= chain[-1] + 1e-9
        assert chain[0] <= max(mu0) + 1e-15


def test_fp_criterion_reports_margins():
    polys = chain_polymers(1)
    good = fp_criterion(polys, [0.2], [0.5])
    assert good.holds and good.margins[0] >= 0
    bad = fp_criterion(polys, [0.2], [0.1])
    assert not bad.holds


def test_universal_radius_frozen_values():
    u = universal_radius(ising_model(2), alpha=1.0, gamma=0.5)
    assert abs(u.kappa - 0.5) < 1e-15
    assert abs(u.c_kappa - 1.4715178) < 1e-6
    # Each site meets 2d = 4 unit-norm pair bonds, each weighted e^{2 alpha}.
    assert abs(u.m_alpha - 4 * math.exp(2.0)) < 1e-9
    assert abs(u.amplitude - 0.1698926) < 1e-6
    assert abs(u.t_star - 0.1467098) < 1e-6
    assert abs(u.beta_star - 0.0049638) < 1e-6


def test_universal_radius_root_against_lambertw():
    for gamma in (0.3, 0.5, 0.7):
        u = universal_radius(ising_model(2), alpha=1.0, gamma=gamma)
        w = float(scipy.special.lambertw(u.amplitude).real)
        assert abs(u.t_star - w) < 1e-9


def test_universal_radius_monotonicity():
    # Larger gamma shrinks kappa, grows the polymer entropy constant, and
    # shrinks the certified radius; higher dimension also shrinks it.
    betas = [
        universal_radius(ising_model(2), alpha=1.0, gamma=g).beta_star
        for g in (0.2, 0.4, 0.6, 0.8)
    ]
    assert all(b < a for a, b in zip(betas, betas[1:]))
    dims = [universal_radius(ising_model(d), alpha=1.0).beta_star for d in (1, 2, 3)]
    assert all(b < a for a, b in zip(dims, dims[1:]))


def test_park_scan_window_and_tail():
    scan = park_compare(2)
    assert 0.03 < scan.sup_y < 0.06
    rooted = [r for r in scan.rows if r.y_star is not None]
    assert len(rooted) == len(scan.rows)
    tail = [r.y_star for r in scan.rows[-6:]]
    assert all(b < a for a, b in zip(tail, tail[1:]))


def test_park_roots_satisfy_the_root_equation():
    d = 2
    scan = park_compare(d, alphas=[0.5, 1.0, 3.0, 8.0])

    def f(y, alpha):
        lhs = math.exp(alpha) * y * math.exp(y)
        rhs = (math.exp(alpha / 4 - y) - 1.0) * (math.exp(alpha / 4) - math.exp(y))
        return lhs - rhs

    for row in scan.rows:
        y, alpha = row.y_star, row.alpha
        # Residual scales with the slope of F near the root; the bisection
        # is 1e-12 in y, so certify by sign change in a tight bracket.
        assert abs(f(y, alpha)) < 1e-8 * max(1.0, math.exp(alpha) * y)
        assert f(y - 1e-9, alpha) < 0.0 < f(y + 1e-9, alpha)
        assert abs(row.beta_star - y / (2 * d)) < 1e-15


def test_park_closed_form_column():
    for d, ref in ((2, 0.015), (3, 0.010), (4, 0.008)):
        assert math.isclose(park_table_value(d), ref, rel_tol=0.10)


def test_beta_radius_prefix_and_reevaluation():
    model = ising_model(2)
    scan = beta_radius(model, criterion="tree", lo=1e-3, hi=0.2, per_decade=24)
    assert scan.beta_radius is not None
    # Monotone certification: every grid point below the radius certifies
    # on re-evaluation (spec'd as the defining property of the radius).
    for b, ok in scan.points:
        if b <= scan.beta_radius:
            assert ok
            assert gk_criterion(model, b).holds
    certified = [ok for _, ok in scan.points]
    first_bad = certified.index(False) if False in certified else len(certified)
    assert all(certified[:first_bad])


def test_beta_radius_fp_on_finite_instance():
    ham = assemble_hamiltonian(ising_model(1), Region.box([5]), boundary="free")
    scan = beta_radius(ham, criterion="fp", lo=1e-3, hi=0.5, per_decade=12)
    assert scan.beta_radius is not None
    assert scan.beta_radius > 0.05
    with pytest.raises(ConfigError):
        beta_radius(ising_model(1), criterion="fp")


def test_beta_radius_unknown_criterion():
    with pytest.raises(ConfigError):
        beta_radius(ising_model(2), criterion="bogus")
