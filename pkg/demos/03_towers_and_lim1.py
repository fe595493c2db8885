"""Towers of window homology, Mittag-Leffler certificates and lim^1."""

from morselimits import build_tower, eventual_images, lazy_family, lim1, mittag_leffler
from morselimits.exact_linalg import GF, QQ, ZZ

# let a go down to -8 with b = 0 fixed
for ring in (ZZ, QQ, GF(2)):
    t = build_tower(lazy_family("appendix_z", ring), 0, range(-8, 0))
    ml = mittag_leffler(t)
    print(f"{ring}: certificate {ml.kind}, stable from {ml.stable_from}")

# over Z the images at level a = -1 keep shrinking: 2^(N-2) times a generator
rep = eventual_images(build_tower(lazy_family("appendix_z"), 0, range(-10, 0)))
print("image sizes at a = -1:", rep.chain(-1).sizes())

# lim^1 of a finite truncation is always 0; the full tower only with a certificate
for ring in (ZZ, GF(2)):
    r = lim1(build_tower(lazy_family("appendix_z", ring), 0, range(-6, 0)))
    print(f"{ring}: truncated lim^1 zero = {r.module.is_zero()}, full tower vanishes = {r.full_tower_vanishes}")
