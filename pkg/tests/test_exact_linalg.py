import doctest
import random
from fractions import Fraction
from functools import reduce as fold
from math import gcd

import pytest
from hypothesis import given, strategies as st

from morselimits import exact_linalg
from morselimits.exact_linalg import (
    GF, QQ, ZZ, Matrix, ModuleMap, NotWellDefined, PresentedModule, Submodule, kernel_basis,
    parse_ring, present_quotient, reduce, smith_normal_form, solve,
)
from oracles import minors_invariant_factors, random_int_matrix

int_matrices = st.integers(1, 4).flatmap(lambda m: st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-12, 12), min_size=n, max_size=n), min_size=m, max_size=m)))


def test_module_doctests():
    assert doctest.testmod(exact_linalg).failed == 0


def test_ring_coercion():
    assert QQ("3/6") == Fraction(1, 2)
    assert GF(5)(Fraction(1, 2)) == 3
    assert ZZ(Fraction(4, 1)) == 4
    with pytest.raises(ValueError):
        ZZ(Fraction(1, 2))
    with pytest.raises(ValueError):
        GF(3)(Fraction(1, 3))
    with pytest.raises(ValueError):
        GF(4)


@pytest.mark.parametrize("text,expected", [("Q", QQ), ("Z", ZZ), ("F2", GF(2)), ("F 3", GF(3)), ("GF5", GF(5))])
def test_parse_ring(text, expected):
    assert parse_ring(text) == expected


def test_parse_ring_rejects_garbage():
    with pytest.raises(ValueError):
        parse_ring("R")


def test_snf_example():
    snf = smith_normal_form(Matrix.from_rows(ZZ, [[2, 4], [6, 8]]))
    assert snf.invariant_factors == (2, 4)
    assert snf.U @ Matrix.from_rows(ZZ, [[2, 4], [6, 8]]) @ snf.V == snf.D


def test_snf_matches_minors_on_random_matrices():
    rng = random.Random(7)
    for _ in range(100):
        M = random_int_matrix(rng)
        assert smith_normal_form(M).invariant_factors == minors_invariant_factors(M)


@given(int_matrices)
def test_snf_transforms_are_unimodular(rows):
    M = Matrix.from_rows(ZZ, rows)
    s = smith_normal_form(M)
    assert s.U @ M @ s.V == s.D
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    assert s.U @ s.Uinv == Matrix.identity(ZZ, M.rows)
    assert s.V @ s.Vinv == Matrix.identity(ZZ, M.cols)
    d = s.invariant_factors
    assert all(x > 0 for x in d)
    assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
    off = [(i, j) for i in range(M.rows) for j in range(M.cols) if i != j]
    assert all(s.D[i, j] == 0 for i, j in off)


@given(int_matrices, st.sampled_from([QQ, GF(2), GF(3), GF(7)]))
def test_rank_nullity_over_fields(rows, ring):
    M = Matrix.from_rows(ring, rows)
    r = reduce(M)
    assert r.rank + r.kernel_basis.cols == M.cols
    assert (M @ r.kernel_basis).is_zero()
    assert r.image_basis.cols == r.rank


@given(int_matrices)
def test_integer_kernel_is_saturated(rows):
    M = Matrix.from_rows(ZZ, rows)
    K = kernel_basis(M)
    assert (M @ K).is_zero()
    # a rational kernel vector scaled to be integral lies in the lattice
    KQ = reduce(Matrix.from_rows(QQ, rows)).kernel_basis
    assert K.cols == KQ.cols
    for v in KQ.columns():
        den = fold(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
        w = [int(x * den) for x in v]
        assert solve(K, w) is not None


def test_solve_over_z_and_q():
    assert solve(Matrix.from_rows(ZZ, [[2]]), [3]) is None
    assert solve(Matrix.from_rows(QQ, [[2]]), [3]) == (Fraction(3, 2),)
    x = solve(Matrix.from_rows(ZZ, [[2, 3]]), [1])
    assert 2 * x[0] + 3 * x[1] == 1


def test_det_over_fields():
    assert Matrix.from_rows(QQ, [[1, 2], [3, 4]]).det() == -2
    assert Matrix.from_rows(GF(5), [[1, 2], [3, 4]]).det() == 3


def test_presented_module_invariants():
    M = present_quotient(["x", "y"], Matrix.from_rows(ZZ, [[2, 0], [0, 0]]))
    assert M.free_rank == 1 and M.invariant_factors == (2,)
    assert M.describe() == "Z^1 + Z/2"
    assert M.is_isomorphic(present_quotient(["u", "v"], Matrix.from_rows(ZZ, [[0], [2]])))
    assert M.contains_relation((4, 0)) and not M.contains_relation((1, 0))


def test_module_map_well_definedness():
    Z = PresentedModule.free(ZZ, ["e"])
    Z2 = present_quotient(["e"], Matrix.from_rows(ZZ, [[2]]))
    f = ModuleMap(Z, Z2, Matrix.from_rows(ZZ, [[1]]))
    assert f.is_surjective() and not f.is_injective()
    with pytest.raises(NotWellDefined) as err:
        ModuleMap(Z2, Z, Matrix.from_rows(ZZ, [[1]]))
    assert err.value.relation_index == 0


def test_module_map_inverse():
    Z2 = PresentedModule.free(ZZ, ["a", "b"])
    f = ModuleMap(Z2, Z2, Matrix.from_rows(ZZ, [[2, 1], [1, 1]]))
    assert (f @ f.inverse()).equals(Z2.identity())
    with pytest.raises(ValueError):
        ModuleMap(Z2, Z2, Matrix.from_rows(ZZ, [[2, 0], [0, 1]])).inverse()


def test_submodule_order_and_divisors():
    F = PresentedModule.free(ZZ, ["a", "b"])
    big = Submodule(F, Matrix.from_columns(ZZ, [(2, 0)], 2))
    small = Submodule(F, Matrix.from_columns(ZZ, [(8, 0)], 2))
    assert small <= big and not big <= small
    assert small.elementary_divisors() == (8,)
    assert Submodule(F, Matrix.from_columns(ZZ, [(8, 0), (4, 0)], 2)) == Submodule(F, Matrix.from_columns(ZZ, [(4, 0)], 2))


@given(st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3), min_size=3, max_size=3))
def test_kernel_quotient_matches_rank_over_f3(rows):
    F = PresentedModule.free(GF(3), ["a", "b", "c"])
    f = ModuleMap(F, F, Matrix.from_rows(GF(3), rows))
    assert f.kernel_quotient().dimension == f.rank()
    assert f.kernel().dimension + f.rank() == 3
