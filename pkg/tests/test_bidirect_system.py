from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from morselimits.bidirect_system import (
    build_grid, canonical_grids, canonical_kappa, kappa_kernel_evidence, solve_for_map, tameness_maps,
    theorem_a_harness,
)
from morselimits.exact_linalg import GF, QQ, ZZ, Matrix, ModuleMap, PresentedModule
from morselimits.floer_triple import CriticalPoint, FloerTriple, lazy_family, random_triple
from morselimits.tower_limits import lim1


def intro(ring=GF(2)):
    return lazy_family("intro_lines", ring)


def app(ring=ZZ):
    return lazy_family("appendix_z", ring)


@st.composite
def field_grids(draw):
    seed = draw(st.integers(0, 10 ** 6))
    ring = draw(st.sampled_from([QQ, GF(2), GF(3)]))
    t = random_triple(seed, draw(st.integers(1, 8)), action_spread=4, ring=ring)
    halves = [Fraction(k, 2) for k in range(-9, 10)]
    pts = sorted(draw(st.lists(st.sampled_from(halves), min_size=2, max_size=4, unique=True)))
    cut = draw(st.integers(1, len(pts) - 1))
    return t, pts[:cut], pts[cut:]


def test_intro_three_by_three():
    g = build_grid(intro(), [-3, -2, -1], [1, 2, 3])
    dims = g.dims()
    assert len(dims) == 9
    for (a, b), d in dims.items():
        # dim = #{b < n <= -a} + #{-a < n <= b}
        assert d == abs(-a - b)
    assert g.check_squares() and g.check_laws()


def test_appendix_grid_groups():
    g = build_grid(app(), [-4, -2], [-1, 0])
    for a in (-4, -2):
        assert g.group(a, 0).module.describe() == "Z^2"
    # without cbar0 the chain cund1 is no longer a boundary: torsion Z/2^(-a-1)
    assert g.group(-4, -1).module.describe() == "Z^1 + Z/8"
    assert g.group(-2, -1).module.describe() == "Z^1 + Z/2"


def test_one_by_one_grid():
    g = build_grid(app(), [-2], [0])
    assert g.shape == (1, 1)
    k = canonical_kappa(g)
    assert k.ok and k.kappa.equals(g.group(-2, 0).module.identity())


def test_grid_needs_ordered_parameters():
    with pytest.raises(ValueError):
        build_grid(app(), [-2, 1], [0])


def test_kappa_intro_and_appendix():
    for g in (build_grid(intro(), [-4, -3], [1, 2]), build_grid(app(), [-4, -3, -2], [-1, 0])):
        k = canonical_kappa(g)
        assert k.diagram_ok and k.identity_ok and k.kappa_ok and k.corner_path_ok and k.unique


def test_constant_grid_kappa_is_identity():
    t = FloerTriple(QQ, [CriticalPoint(0, "x"), CriticalPoint(0, "y")])
    g = build_grid(t, [-2, -1], [1, 2])
    k = canonical_kappa(g)
    assert k.ok and k.kappa.equals(g.group(-2, 2).module.identity())
    for b in (1, 2):
        assert g.Hi(-2, 2, b).equals(g.group(-2, b).module.identity())


def test_solve_for_map_detects_non_uniqueness():
    V = PresentedModule.free(QQ, ["u", "v"])
    proj = ModuleMap(V, PresentedModule.free(QQ, ["u"]), Matrix.from_rows(QQ, [[1, 0]]))
    X, unique = solve_for_map(V, V, [(proj, None, proj)])
    assert X is not None and not unique
    X, unique = solve_for_map(V, V, [(None, None, V.identity())])
    assert unique and X.equals(V.identity())


def test_solve_for_map_respects_relations():
    Z2 = PresentedModule(ZZ, ("g",), Matrix.from_rows(ZZ, [[2]]))
    X, unique = solve_for_map(Z2, Z2, [(None, None, ModuleMap(Z2, Z2, Matrix.from_rows(ZZ, [[3]])))])
    assert unique and X.equals(Z2.identity())


@given(field_grids())
def test_kappa_unique_on_random_grids(tg):
    t, A, B = tg
    assert canonical_kappa(build_grid(t, A, B)).ok


@given(field_grids())
def test_field_grids_are_tame(tg):
    t, A, B = tg
    g = build_grid(t, A, B)
    tm = tameness_maps(g)
    assert all(tm.checks.values())
    assert tm.tame_at_grid and tm.tame
    assert tm.rho.is_isomorphism()
    assert tm.nu.is_surjective()


def test_intro_rho_iso():
    tm = tameness_maps(build_grid(intro(), [-3, -2, -1], [1, 2, 3]))
    assert tm.tame and tm.rho.is_isomorphism() and tm.sigma.is_isomorphism()


def test_appendix_integer_tameness_withheld():
    for d in (3, 4, 5):
        tm = tameness_maps(build_grid(app(), *canonical_grids("appendix_z", d)))
        assert all(s["surjective"] for k, s in tm.status.items() if k.startswith("nu_b"))
        assert tm.tame_at_grid and not tm.tame
        assert "Mittag-Leffler" in tm.diagnostic


def test_canonical_grids():
    assert canonical_grids("intro_lines", 3) == ([-6, -5, -4], [1, 2, 3])
    assert canonical_grids("appendix_z", 3) == ([-3, -2, -1], [-1, 0, 1])
    with pytest.raises(ValueError):
        canonical_grids("intro_lines", 0)
    with pytest.raises(ValueError):
        canonical_grids("other", 2)


def test_kappa_kernel_evidence_grows_for_intro():
    ev = [kappa_kernel_evidence(build_grid(intro(), *canonical_grids("intro_lines", d))) for d in (1, 2, 3, 4)]
    assert ev == [0, 1, 2, 3]


def test_harness_intro_f2():
    r = theorem_a_harness(intro(), schedule=[1, 2, 3])
    assert r.certified and r.diagram_commutes and r.rho_iso and r.kappa_surjective
    assert r.trends()["kappa_kernel_evidence"] == [0, 1, 2]
    assert r.as_dict()["certified"] is True


def test_harness_appendix_q():
    r = theorem_a_harness(app(QQ), schedule=[2, 4])
    assert r.certified
    assert all(d.lim1_vanishes for d in r.depths)


def test_harness_integer_diagnostics():
    r = theorem_a_harness(app(), schedule=[2, 4])
    assert not r.certified
    assert r.diagram_commutes and r.rho_iso
    diag = r.diagnostics
    assert diag["ml_certificate"] == "indeterminate"
    assert diag["two_adic_valuations"] == [[0, 0], [0], [1], [2]]
    assert diag["mod2_image_zero_from"] == "-3"


def test_harness_explicit_grids_and_errors():
    t = random_triple(5, 6, action_spread=3, ring=QQ)
    r = theorem_a_harness(t, schedule=[([-3, -1], [1, 3])])
    assert r.certified and r.family is None
    with pytest.raises(ValueError):
        theorem_a_harness(t, schedule=[2])


def test_kernel_of_kappa_matches_lim1_on_field_runs():
    for t, d in ((intro(), 3), (app(QQ), 4), (app(GF(2)), 4)):
        g = build_grid(t, *canonical_grids(t.name, d))
        k = canonical_kappa(g)
        L = lim1(g.b_tower(g.b_max))
        assert L.ml.holds
        assert k.kappa.is_injective() == L.full_tower_vanishes
