"""Grids of window homology and the comparison of the two double limits."""

from morselimits import build_grid, canonical_kappa, lazy_family, tameness_maps, theorem_a_harness
from morselimits.bidirect_system import canonical_grids, kappa_kernel_evidence
from morselimits.exact_linalg import GF, QQ, ZZ

intro = lazy_family("intro_lines", GF(2))
g = build_grid(intro, [-3, -2, -1], [1, 2, 3])
for (a, b), d in sorted(g.dims().items()):
    print(f"dim H[{a}, {b}] = {d}")

# kappa is determined by the corner of the grid and is unique
k = canonical_kappa(g)
print("kappa ok:", k.ok, "surjective:", k.kappa.is_surjective())

tm = tameness_maps(g)
print("rho iso:", tm.rho.is_isomorphism())

# the part of kappa's source that eventually dies grows with the grid
print("kernel evidence:", [kappa_kernel_evidence(build_grid(intro, *canonical_grids("intro_lines", d)))
                           for d in (1, 2, 3, 4)])

# the harness certifies over fields and withholds over Z with a diagnostic
for ring in (GF(2), QQ, ZZ):
    r = theorem_a_harness(lazy_family("appendix_z", ring), schedule=[2, 4])
    print(f"{ring}: certified = {r.certified}")
    if not r.certified:
        print("  diagnostics:", r.diagnostics)
