import random

import pytest
from hypothesis import given, strategies as st

from morselimits.exact_linalg import GF, QQ, ZZ, Matrix, ModuleMap, PresentedModule, present_quotient, reduce
from morselimits.floer_triple import lazy_family
from morselimits.novikov import gamma
from morselimits.tower_limits import (
    DIRECT, INVERSE, Tower, build_tower, direct_limit_quotient, eventual_images, grid_direct_limit,
    grid_inverse_limit, lim1, lim1_preimage, mittag_leffler,
)
from oracles import random_cyclic_tower, random_field_tower


def app(ring=ZZ):
    return lazy_family("appendix_z", ring)


def intro(ring=GF(2)):
    return lazy_family("intro_lines", ring)


def test_intro_inverse_tower_dims():
    t = build_tower(intro(), 0, range(-6, 1))
    assert [m.dimension for m in t.modules] == [6, 5, 4, 3, 2, 1, 0]
    assert t.check_composition()


def test_appendix_tower_is_rank_two():
    t = build_tower(app(), 0, range(-6, 0))
    assert all(m.free_rank == 2 and m.invariant_factors == () for m in t.modules)


def test_single_index_tower():
    t = build_tower(app(), 0, [-2])
    assert len(t) == 1 and t.transitions == ()
    L = grid_inverse_limit(t)
    assert L.maps[0].equals(t.modules[0].identity())


def test_build_tower_rejects_inconsistent_grid():
    with pytest.raises(ValueError):
        build_tower(app(), -1, [-2, 0])
    with pytest.raises(ValueError):
        build_tower(app(), -1, [-2, 0], direction=DIRECT)


def test_chain_level_tower():
    t = build_tower(app(), 0, [-3, -2, -1], level="chain")
    assert [m.ngens for m in t.modules] == [6, 4, 2]
    assert t.check_composition()


def test_appendix_f2_grid_limit_and_images():
    t = build_tower(app(GF(2)), 0, range(-6, 0))
    L = grid_inverse_limit(t)
    assert L.module.dimension == 2
    assert eventual_images(t).top.images[-1].dimension == 0


def test_intro_grid_limit_surjective():
    t = build_tower(intro(), 0, range(-6, 1))
    L = grid_inverse_limit(t)
    assert L.module.dimension == 6 and all(m.is_surjective() for m in L.maps)


def test_wrong_direction():
    t = build_tower(intro(), 0, range(-3, 1))
    with pytest.raises(ValueError):
        grid_direct_limit(t)
    d = build_tower(intro(), 0, range(0, 3), direction=DIRECT)
    with pytest.raises(ValueError):
        grid_inverse_limit(d)
    with pytest.raises(ValueError):
        lim1(d)


def test_constant_direct_tower():
    V = PresentedModule.free(QQ, ["u", "v"])
    t = Tower(range(4), [V] * 4, [V.identity()] * 3, DIRECT)
    L = grid_direct_limit(t)
    assert L.oracle_checked and all(m.equals(V.identity()) for m in L.maps)
    Li = grid_inverse_limit(Tower(range(4), [V] * 4, [V.identity()] * 3, INVERSE))
    assert all(m.equals(V.identity()) for m in Li.maps)


def test_intro_direct_tower():
    d = build_tower(intro(), "-5/2", [1, 2, 3, 4, 5], direction=DIRECT)
    assert [m.dimension for m in d.modules] == [1, 0, 1, 2, 3]
    L = grid_direct_limit(d)
    assert L.module.dimension == 3 and L.oracle_checked
    # [cund2] lives at b = 1 and dies at b = 2
    assert d.transitions[0].is_zero()


def test_oracle_on_random_f3_towers():
    rng = random.Random(3)
    for _ in range(30):
        t = random_field_tower(rng, GF(3), rng.randint(1, 4), DIRECT)
        assert direct_limit_quotient(t).is_isomorphic(t.modules[-1])


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_oracle_on_random_integer_towers(seed, steps):
    t = random_cyclic_tower(random.Random(seed), steps, DIRECT)
    assert direct_limit_quotient(t).is_isomorphic(t.modules[-1])
    assert grid_direct_limit(t, oracle=True).oracle_checked


def test_intro_images_surjective_certificate():
    rep = eventual_images(build_tower(intro(), 0, range(-6, 1)))
    assert rep.certificate == "surjective_criterion"
    for ch in rep.chains:
        assert all(im == ch.images[0] for im in ch.images)


def test_appendix_integer_images_shrink():
    rep = eventual_images(build_tower(app(), 0, range(-12, 0)))
    sizes = rep.chain(-1).sizes()
    assert sizes[0] == (2, (1, 1))
    assert sizes[1:] == [(1, (2 ** (N - 2),)) for N in range(2, 13)]
    assert not rep.stabilized and rep.certificate == "indeterminate"


def test_appendix_integer_image_is_multiple_of_gamma1():
    t = build_tower(app(), 0, range(-6, 0))
    H = t.groups[-1]
    g1 = H.coordinates(H.complex.vector(gamma(1)))
    for N in range(2, 7):
        im = t.map(t.position(-N), t.position(-1)).image()
        assert im.contains(tuple(2 ** (N - 2) * x for x in g1))
        if N > 2:
            assert not im.contains(tuple(2 ** (N - 3) * x for x in g1))


def test_appendix_rational_images_stabilize():
    rep = eventual_images(build_tower(app(QQ), 0, range(-8, 0)))
    assert rep.chain(-1).sizes() == [2] + [1] * 7
    assert rep.stabilized and rep.top.stable_from == -2


def test_window_must_be_at_least_two():
    with pytest.raises(ValueError):
        eventual_images(build_tower(app(QQ), 0, range(-3, 0)), window=1)


def test_ml_certificates():
    assert mittag_leffler(build_tower(intro(), 0, range(-6, 1))).kind == "surjective_criterion"
    f2 = mittag_leffler(build_tower(app(GF(2)), 0, range(-8, 0)))
    assert f2.kind == "finite_dim_criterion" and f2.stable_from == -3 and f2.holds
    z = mittag_leffler(build_tower(app(), 0, range(-8, 0)))
    assert z.kind == "indeterminate" and not z.holds


def test_ml_empirical_over_integers():
    # Z -> Z -> Z -> Z/4, last map x -> 2x: images stabilize at 2Z/4 without surjectivity
    Z = PresentedModule.free(ZZ, ["g"])
    Z4 = present_quotient(["g"], Matrix.from_rows(ZZ, [[4]]))
    mods = [Z, Z, Z, Z4]
    maps = [ModuleMap(Z, Z, Matrix.from_rows(ZZ, [[1]]))] * 2 + [ModuleMap(Z, Z4, Matrix.from_rows(ZZ, [[2]]))]
    t = Tower(range(4), mods, maps, INVERSE)
    assert mittag_leffler(t).kind == "empirical_at_depth"


def test_lim1_finite_and_full_tower():
    t = build_tower(intro(), 0, range(-6, 1))
    r = lim1(t)
    assert r.module.is_zero() and r.certificate == "finite_truncation" and r.full_tower_vanishes
    z = lim1(build_tower(app(), 0, range(-8, 0)))
    assert z.module.is_zero() and not z.full_tower_vanishes


def test_lim1_delta_rank_over_q():
    t = build_tower(app(QQ), 0, [-3, -2, -1])
    r = lim1(t)
    total = sum(m.ngens for m in t.modules)
    assert reduce(r.delta.matrix).rank == total
    assert r.module.dimension == total - reduce(r.delta.matrix).rank == 0


@given(st.integers(0, 10 ** 6))
def test_lim1_preimages(seed):
    rng = random.Random(seed)
    ring = rng.choice([ZZ, QQ, GF(2)])
    t = build_tower(app(ring), 0, range(-rng.randint(1, 5), 0))
    r = lim1(t)
    y = [rng.randint(-9, 9) for _ in range(r.delta.source.ngens)]
    x = lim1_preimage(r, t, y)
    assert r.delta(x) == tuple(ring(v) for v in y)
