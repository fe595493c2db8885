from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from morselimits.exact_linalg import GF, ZZ, Matrix
from morselimits.floer_triple import builtin_family, lazy_family
from morselimits.novikov import (
    NovikovChain, SequenceRejected, WitnessSequence, boundary_obstruction, candidate_boundary,
    check_gamma_boundaries, cycle_check, gamma, gamma_change_matrix, novikov_projection,
    truncated_novikov_homology, validate_sequence, witness_cycle, witness_sequence,
)
from morselimits.window_complex import build_complex

APP = lazy_family("appendix_z")


@pytest.mark.parametrize("N", [2, 3, 6, 10])
def test_appendix_novikov_homology_rank_two(N):
    H = truncated_novikov_homology(APP, -N)
    assert H.module.describe() == "Z^2"
    cx = H.complex
    cols = [H.coordinates(cx.vector(gamma(n))) for n in (N - 1, N)]
    assert abs(Matrix.from_columns(ZZ, cols, 2).det()) == 1


def test_f2_projections_vanish_two_steps_down():
    for N in range(3, 8):
        assert truncated_novikov_homology(APP, -N, GF(2)).module.dimension == 2
        for M in range(1, N - 1):
            assert novikov_projection(APP, -N, -M, GF(2)).is_zero()
        assert not novikov_projection(APP, -N, -(N - 1), GF(2)).is_zero()


def test_intro_truncation_is_acyclic():
    for N in (1, 3, 5):
        H = truncated_novikov_homology(builtin_family("intro_lines", N, GF(2)), -N - 1)
        assert H.module.dimension == 0


def test_unbounded_triple_rejected():
    with pytest.raises(ValueError):
        truncated_novikov_homology(lazy_family("intro_lines"), -3)


def test_alternating_closed_form():
    s = witness_sequence("alternating", 30)
    for m in range(15):
        assert s.S(2 * m + 1) == (4 ** (m + 1) - 1) // 3
    assert all(Fraction(1, 4) <= r < Fraction(3, 4) for r in s.ratios())
    assert all(0 < r < Fraction(3, 4) for r in s.ratios())


def test_rejections():
    with pytest.raises(SequenceRejected) as err:
        witness_sequence("ones", 30)
    assert err.value.condition == "ratio" and err.value.k == 2
    with pytest.raises(SequenceRejected) as err:
        witness_sequence("zeros", 30)
    assert err.value.condition == "ratio" and err.value.k == 1
    with pytest.raises(SequenceRejected) as err:
        witness_sequence("custom", 3, values=[1, 0, 2])
    assert err.value.condition == "ratio" and err.value.k == 3
    with pytest.raises(ValueError):
        witness_sequence("alternating", 0)
    with pytest.raises(ValueError):
        witness_sequence("bogus", 3)


def test_growth_condition():
    validate_sequence(WitnessSequence((1, 0, 1, 0)))
    # S_k stays 1: every ratio is in (0, 3/4) but S never grows
    with pytest.raises(SequenceRejected) as err:
        validate_sequence(WitnessSequence((1, 0, 0, 0, 0, 0)))
    assert (err.value.condition, err.value.k) == ("growth", 6)


def test_cycle_checks():
    s = witness_sequence("alternating", 30)
    xi = witness_cycle(s)
    assert xi.floor == -30 and cycle_check(xi)
    assert not cycle_check(NovikovChain(APP, {"cbar1": 1}, -5))
    assert cycle_check(NovikovChain(APP, {}, -5))


def test_truncation_is_prefix_stable():
    s = witness_sequence("alternating", 30)
    assert witness_cycle(s, floor=-12) == witness_cycle(s).truncate(-12)


def test_alternating_obstruction():
    rep = boundary_obstruction(witness_sequence("alternating", 30), 1000, 40)
    assert rep.success and not rep.inconclusive
    assert rep.max_depth == 12
    e = next(e for e in rep.entries if e.b0 == 1)
    assert (e.depth, e.b_k, e.mode) == (3, Fraction(-1, 2), "interval")
    assert len(rep.as_dict()["entries"]) == 2001


def test_all_ones_is_a_boundary():
    ones = witness_sequence("ones", 30, validate=False)
    rep = boundary_obstruction(ones, 5, 40)
    assert rep.inconclusive == [-1]
    for floor in (-5, -12, -30):
        eta = candidate_boundary(ones, -1, floor=floor)
        xi = witness_cycle(ones, floor=floor)
        assert all(v == -1 for v in eta.coefficients.values())
        assert eta.boundary() == xi


def test_candidate_boundary_none_when_obstructed():
    assert candidate_boundary(witness_sequence("alternating", 10), 1) is None


@given(st.integers(-10 ** 6, 10 ** 6))
def test_every_b0_obstructed(b0):
    # the obstruction depth grows like log2 |b0|
    s = witness_sequence("alternating", 60)
    k = next(k for k in range(1, 61) if s.b(b0, k).denominator != 1)
    assert k <= 2 * abs(b0).bit_length() + 4


def test_gamma_basis_change():
    for k in range(8):
        M = gamma_change_matrix(k)
        assert M.det() == 1
        assert all(M[i, j] == 0 for i in range(k + 1) for j in range(i))
        assert all(M[i, i] == 1 for i in range(k + 1))
    assert check_gamma_boundaries(12)


def test_gamma_boundary_in_complex():
    cx = build_complex(APP, -6, 0)
    assert cx.chain(cx.d(cx.vector(gamma(2)))) == {"cund3": 1}
    assert truncated_novikov_homology(APP, -6, ZZ).rank == 2
