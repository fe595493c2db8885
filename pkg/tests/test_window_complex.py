from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from morselimits.exact_linalg import GF, QQ, ZZ, Matrix, PresentedModule, reduce
from morselimits.floer_triple import CriticalPoint, FloerTriple, lazy_family, random_triple
from morselimits.window_complex import (
    ChainMap, ChainMapError, Window, build_complex, check_d_squared, check_identities,
    chain_inclusion, chain_projection, classify_square, homology, induced_hom_map,
)
from morselimits.novikov import gamma

APP = lazy_family("appendix_z")
INTRO2 = lazy_family("intro_lines", GF(2))
rings = st.sampled_from([QQ, GF(2), GF(3), ZZ])


def square(triple, a1, a2, b1, b2):
    A = build_complex(triple, a1, b1)
    B = build_complex(triple, a2, b1)
    C = build_complex(triple, a1, b2)
    D = build_complex(triple, a2, b2)
    return (chain_projection(triple, a1, a2, b1, A, B), chain_inclusion(triple, a1, b1, b2, A, C),
            chain_inclusion(triple, a2, b1, b2, B, D), chain_projection(triple, a1, a2, b2, C, D))


@st.composite
def triple_and_params(draw, count=4):
    seed = draw(st.integers(0, 10 ** 6))
    n = draw(st.integers(1, 10))
    ring = draw(rings)
    t = random_triple(seed, n, action_spread=4, ring=ring)
    grid = [Fraction(k, 2) for k in range(-9, 10)]
    params = sorted(draw(st.lists(st.sampled_from(grid), min_size=count, max_size=count)))
    return t, params


def test_appendix_boundary():
    cx = build_complex(APP, -3, 0)
    assert cx.dim == 6
    assert cx.names == ("cbar3", "cund2", "cbar2", "cund1", "cbar1", "cbar0")
    assert cx.chain(cx.d(cx.vector({"cbar1": 1}))) == {"cund1": -2, "cund2": 1}
    assert cx.chain(cx.d(cx.vector({"cbar0": 1}))) == {"cund1": 1}
    for j in (1, 2):
        assert cx.chain(cx.d(cx.vector({f"cund{j}": 1}))) == {}


def test_intro_boundary():
    cx = build_complex(INTRO2, "-5/2", "3/2")
    assert cx.chain(cx.d(cx.vector({"cbar1": 1}))) == {"cund1": 1}
    assert cx.chain(cx.d(cx.vector({"cund1": 1, "cund2": 1}))) == {}


def test_empty_window():
    cx = build_complex(APP, "1/3", "1/2")
    assert cx.dim == 0
    assert homology(cx).module.is_zero()


def test_window_rejects_bad_order():
    with pytest.raises(ValueError):
        Window(1, 0)


def test_d_squared():
    assert check_d_squared(build_complex(APP, -6, 0)) == (True, None)
    t = FloerTriple(ZZ, [CriticalPoint(0, "z"), CriticalPoint(1, "y"), CriticalPoint(2, "x")],
                    {("y", "x"): 1, ("z", "y"): 1})
    assert check_d_squared(build_complex(t, 0, 2)) == (False, "x")
    t0 = FloerTriple(ZZ, [CriticalPoint(0, "a"), CriticalPoint(1, "b")])
    assert check_d_squared(build_complex(t0, 0, 1)) == (True, None)


def test_appendix_homology_generated_by_gammas():
    cx = build_complex(APP, "-7/2", 0)
    H = homology(cx)
    assert H.module.free_rank == 2 and H.module.invariant_factors == ()
    assert H.verify()
    cols = [H.coordinates(cx.vector(gamma(n))) for n in (2, 3)]
    assert abs(Matrix.from_columns(ZZ, cols, 2).det()) == 1


def test_intro_homology():
    cx = build_complex(INTRO2, "-5/2", "3/2")
    H = homology(cx)
    assert H.module.dimension == 1
    assert not H.class_is_zero(cx.vector({"cund2": 1}))
    assert H.class_is_zero(cx.vector({"cund1": 1}))


def test_zero_boundary_homology_is_free():
    t = random_triple(1, 3, pairs=0, ring=ZZ)
    H = homology(build_complex(t, -20, 20))
    assert H.module.free_rank == 3


def test_coordinates_reject_non_cycles():
    cx = build_complex(APP, -3, 0)
    with pytest.raises(ValueError):
        homology(cx).coordinates(cx.vector({"cbar0": 1}))


def test_chain_projection_of_gamma3():
    p = chain_projection(APP, -3, -1, 0)
    out = p.target.chain(p(p.source.vector(gamma(3))))
    assert out == {k: 4 * v for k, v in gamma(1).items()}


def test_projection_identity_and_order():
    p = chain_projection(APP, -2, -2, 0)
    assert p.matrix == Matrix.identity(ZZ, p.source.dim)
    assert chain_inclusion(APP, -2, 0, 0).matrix == Matrix.identity(ZZ, p.source.dim)
    with pytest.raises(ChainMapError):
        chain_projection(APP, -1, -2, 0)
    with pytest.raises(ChainMapError):
        chain_inclusion(APP, -1, 0, -1)


def test_non_chain_map_rejected():
    cx = build_complex(APP, -2, 0)
    M = Matrix.identity(ZZ, cx.dim)
    k = cx.index["cbar0"]
    # keeps cbar0 but kills its boundary cund1
    bad = Matrix.from_rows(ZZ, [[int(i == j == k) for j in range(cx.dim)] for i in range(cx.dim)])
    ChainMap(cx, cx, M)
    with pytest.raises(ChainMapError):
        ChainMap(cx, cx, bad)


def test_induced_projection_on_gammas():
    p = chain_projection(APP, -3, -1, 0)
    Hs, Ht = homology(p.source), homology(p.target)
    f = induced_hom_map(p, Hs, Ht)
    g1 = Ht.coordinates(p.target.vector(gamma(1)))
    for n, scale in ((3, 4), (2, 2)):
        image = f(Hs.coordinates(p.source.vector(gamma(n))))
        assert Ht.module.reduce_coordinates(image) == Ht.module.reduce_coordinates(tuple(scale * x for x in g1))


def test_intro_inclusion_kills_lower_class():
    i = chain_inclusion(INTRO2, "-5/2", "3/2", "5/2")
    assert i.target.chain(i(i.source.vector({"cund2": 1}))) == {"cund2": 1}
    Hs, Ht = homology(i.source), homology(i.target)
    f = induced_hom_map(i, Hs, Ht)
    assert f.is_zero()
    assert Ht.module.dimension == 0


def test_identity_chain_map_induces_identity():
    cx = build_complex(APP, -4, 0)
    H = homology(cx)
    f = induced_hom_map(ChainMap(cx, cx, Matrix.identity(ZZ, cx.dim)), H, H)
    assert f.equals(H.module.identity())


def test_appendix_square_bicartesian():
    assert classify_square(*square(APP, -3, -1, -1, 0)).bicartesian


def test_zero_square_not_cartesian():
    V = PresentedModule.free(QQ, ["v"])
    z = V.zero_map(V)
    cls = classify_square(z, z, z, z)
    assert cls.commutative and not cls.cartesian and not cls.bicartesian


def test_identity_square_bicartesian():
    V = PresentedModule.free(ZZ, ["u", "v"])
    I = V.identity()
    assert classify_square(I, I, I, I).bicartesian


def test_square_shape_mismatch():
    V, W = PresentedModule.free(QQ, ["v"]), PresentedModule.free(QQ, ["a", "b"])
    with pytest.raises(ValueError):
        classify_square(V.identity(), V.identity(), W.identity(), V.identity())


def test_identities_appendix():
    rep = check_identities(APP, [-4, -2, -1], [-1, 0])
    assert rep.ok
    assert {"proj1", "proj2", "proj3", "in1", "in2", "in3", "ip1", "ip2"} <= set(rep.counts())


def test_identities_degenerate():
    assert check_identities(APP, [-1], [-1]).ok


@given(triple_and_params())
def test_chain_squares_are_bicartesian(tp):
    t, (a1, a2, b1, b2) = tp
    cls = classify_square(*square(t, a1, a2, b1, b2))
    assert cls.bicartesian and cls.cartesian and cls.cocartesian and cls.exact and cls.commutative


@given(triple_and_params(count=3))
def test_identities_on_random_triples(tp):
    t, (x, y, z) = tp
    assert check_identities(t, [x, y], [y, z]).ok


@given(st.integers(0, 10 ** 6), st.integers(1, 12), st.sampled_from([QQ, GF(2), GF(5)]))
def test_euler_count_over_fields(seed, n, ring):
    t = random_triple(seed, n, ring=ring)
    cx = build_complex(t, -20, 20)
    r = reduce(cx.boundary).rank
    H = homology(cx)
    assert H.module.dimension == cx.dim - 2 * r
    assert check_d_squared(cx)[0]
    assert H.verify()


@given(st.integers(0, 10 ** 6), st.integers(1, 10))
def test_integer_homology_verifies(seed, n):
    H = homology(build_complex(random_triple(seed, n, ring=ZZ), -20, 20))
    assert H.verify()
