# How fast a truncated series converges depends on the volume's loops.
#
# Cutting the free-energy series at total bond order k drops every
# cluster of k+1 or more bonds. On a ring of k+1 bonds the single
# polymer that wraps the whole ring carries weight ~ beta^(k+1), so the
# truncation error vanishes at order exactly k+1. On an open chain no
# such wrap exists and the first omitted clusters are repeated-polymer
# multisets of order 2k+2.

import math

import numpy as np

from polymerion import (
    Region,
    assemble_hamiltonian,
    free_energy_density,
    free_energy_series,
    ising_model,
)

model = ising_model(1, 1.0)


def slope(ham, k, betas, exact):
    errs = [abs(free_energy_series(ham, b, k).value - exact(b)) for b in betas]
    return float(np.polyfit(np.log(betas), np.log(errs), 1)[0])


print(f"{'k':>3} {'ring n=k+1 slope':>17} {'open chain slope':>17}")
for k in (2, 3, 4):
    n = k + 1
    ring = assemble_hamiltonian(model, Region.box([n]), boundary="periodic")

    def ring_exact(b, n=n):
        return n * math.log(math.cosh(b)) + math.log1p(math.tanh(b) ** n)

    lo = 3e-3 if k >= 4 else 1e-3
    s_ring = slope(ring, k, np.geomspace(lo, 0.1, 6), ring_exact)

    if k <= 3:
        # Past k=3 the chain error beta^(2k+2) sinks under the rounding
        # noise of the exact value, so the fit stops meaning anything.
        chain = assemble_hamiltonian(model, Region.box([n + 1]), boundary="free")
        s_chain = slope(
            chain, k, np.geomspace(0.02, 0.1, 5),
            lambda b, n=n: n * math.log(math.cosh(b)),
        )
        chain_cell = f"{s_chain:>17.3f}"
    else:
        chain_cell = f"{'(below noise)':>17}"
    print(f"{k:>3} {s_ring:>17.3f} {chain_cell}")

print("\nThe ring slopes sit at k+1 (the winding polymer), the chain")
print("slopes at 2k+2 (first multiset cluster above the cut).")

d = free_energy_density(model, 0.1, 8)
print(f"\nthermodynamic density at beta=0.1, order 8: {d.value.real:.12f}")
print(f"log cosh(0.1)                              : {math.log(math.cosh(0.1)):.12f}")
