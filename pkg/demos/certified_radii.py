# Convergence radii: where each criterion certifies the expansion.
#
# Every criterion turns a weighted polymer sum into a sufficient
# condition for absolute convergence. The nearest-neighbor closed form
# gives the radius table; the generic tree certificate scans beta; the
# universal bound needs only the per-site interaction strength; the
# comparison root-scan gives an older reference point.

import math

from polymerion import (
    Region,
    assemble_hamiltonian,
    beta_radius,
    gk_criterion,
    ising_model,
    nn_radius,
    park_compare,
    park_table_value,
    universal_radius,
)

print("== nearest-neighbor radius table ==")
print(f"{'d':>2} {'zeta_hat':>12} {'bound on e^(b|J|)-1':>20} {'beta*':>12} {'comparison':>11}")
for d in (2, 3, 4):
    r = nn_radius(d)
    print(f"{d:>2} {r.zeta:>12.6f} {r.bound:>20.6f} {r.beta_star:>12.6f} "
          f"{park_table_value(d):>11.6f}")

print("\n== certified beta scan, square-lattice Ising ==")
model = ising_model(2, 1.0)
scan = beta_radius(model, criterion="tree", lo=1e-3, hi=0.2, per_decade=32)
print(f" tree: certified up to beta = {scan.beta_radius:.6f} "
      f"({sum(ok for _, ok in scan.points)} of {len(scan.points)} grid points)")

# The fixed-point criterion iterates on an explicit polymer list, so it
# wants a finite volume; subset sums over each polymer's incompatibility
# neighborhood keep it a small-volume diagnostic.
chain = assemble_hamiltonian(ising_model(1, 1.0), Region.box([5]), boundary="free")
scan = beta_radius(chain, criterion="fp", lo=1e-3, hi=0.2, per_decade=32,
                   max_bonds=4)
print(f"   fp: certified up to beta = {scan.beta_radius:.6f} on a 5-site chain")

# The same tree certificate, evaluated at one beta with the weight
# exponent fixed, reports its margins instead of a radius. The exponent
# matching the d=2 table row certifies right up to the table's beta*;
# a larger exponent tightens the budget and fails at the same beta.
a_star = math.log1p(4 * nn_radius(2).zeta)
for beta, a in ((0.02, a_star), (0.02, math.log(2.0))):
    rep = gk_criterion(model, beta, a=a)
    print(f"\ntree certificate at beta={beta}, a={a:.4f}: holds={rep.holds}, "
          f"worst margin {min(rep.tree.margins):+.4f}")

u = universal_radius(model, alpha=1.0, gamma=0.5)
print(f"\nuniversal bound: per-site strength M = {u.m_alpha:.4f}, "
      f"t* = {u.t_star:.6f}, beta* = {u.beta_star:.6f}")

scan = park_compare(2)
print(f"\ncomparison scan (d=2): sup 2d beta* = {scan.sup_y:.4f} "
      f"at alpha = {scan.sup_alpha:.2f} over {len(scan.rows)} alphas")
