"""Window complexes, their homology and the projection/inclusion maps."""

from morselimits import build_complex, chain_projection, homology, induced_hom_map, lazy_family
from morselimits.exact_linalg import GF
from morselimits.novikov import gamma

app = lazy_family("appendix_z")

# over Z the window [-7/2, 0] has free homology of rank 2
H = homology(build_complex(app, "-7/2", 0))
print("H[-7/2, 0] =", H.module.describe())

# the classes gamma_2 and gamma_3 are a basis
for n in (2, 3):
    print(f"gamma_{n} coordinates:", H.coordinates(H.complex.vector(gamma(n))))

# projecting from [-3, 0] to [-1, 0] multiplies by powers of 2
p = chain_projection(app, -3, -1, 0)
Hs, Ht = homology(p.source), homology(p.target)
f = induced_hom_map(p, Hs, Ht)
print("Hp matrix:", f.matrix.to_lists())
print("Hp[gamma_3] =", f(Hs.coordinates(Hs.complex.vector(gamma(3)))),
      " [gamma_1] =", Ht.coordinates(Ht.complex.vector(gamma(1))))

# intro example: dimensions of a few windows over F2
intro = lazy_family("intro_lines", GF(2))
for a, b in [(-3, 1), ("-5/2", "3/2"), (-1, 4)]:
    print(f"dim H[{a}, {b}] =", homology(build_complex(intro, a, b)).module.dimension)

# torsion appears when the window cuts a flow in half
print("H[-4, -1] =", homology(build_complex(app, -4, -1)).module.describe())
