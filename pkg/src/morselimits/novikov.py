"""Truncated Novikov chains and the integer-coefficient witness.

On the appendix family a Novikov sum is determined by its coefficients on
the points above a truncation floor.  The witness cycle is
xi = sum_j a_j cund_j; a boundary eta = sum_j b_j cbar_j with d(eta) = xi
would force b_k = (b_0 - S_k) / 2^k with S_k = sum_{j<=k} 2^(j-1) a_j, and
the obstruction search shows no integer b_0 in a range survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact_linalg import ZZ, Matrix
from .floer_triple import FloerTriple, format_fraction, lazy_family, to_fraction
from .window_complex import build_complex, chain_projection, homology, induced_hom_map

__all__ = [
    "NovikovChain", "truncated_novikov_homology", "novikov_projection", "WitnessSequence",
    "SequenceRejected", "witness_sequence", "validate_sequence", "witness_cycle", "cycle_check",
    "candidate_boundary", "ObstructionEntry", "ObstructionReport", "boundary_obstruction",
    "gamma", "gamma_change_matrix", "check_gamma_boundaries",
]


def _top(triple: FloerTriple):
    top = triple.max_action
    if top is None:
        raise ValueError("the triple's actions are not bounded above")
    return top


@dataclass
class NovikovChain:
    """Coefficients on the points of action >= ``floor``."""

    triple: FloerTriple
    coefficients: dict
    floor: Fraction

    def __post_init__(self):
        self.floor = to_fraction(self.floor)
        ring = self.triple.ring
        clean = {}
        for name, x in self.coefficients.items():
            x = ring(x)
            if x != 0:
                clean[name] = x
        self.coefficients = clean

    def complex(self):
        return build_complex(self.triple, self.floor, _top(self.triple))

    def vector(self):
        return self.complex().vector(self.coefficients)

    def boundary(self) -> "NovikovChain":
        """Boundary in the truncation: terms below the floor are dropped."""
        cx = self.complex()
        return NovikovChain(self.triple, cx.chain(cx.d(cx.vector(self.coefficients))), self.floor)

    def truncate(self, floor) -> "NovikovChain":
        floor = to_fraction(floor)
        if floor < self.floor:
            raise ValueError("cannot truncate below the current floor")
        keep = {c.name for c in self.triple.window_points(floor, _top(self.triple))}
        return NovikovChain(self.triple, {n: x for n, x in self.coefficients.items() if n in keep}, floor)

    def __eq__(self, other):
        return (isinstance(other, NovikovChain) and self.floor == other.floor
                and self.coefficients == other.coefficients)

    def is_zero(self):
        return not self.coefficients


def truncated_novikov_homology(triple: FloerTriple, floor, ring=None):
    if ring is not None:
        triple = triple.with_ring(ring)
    return homology(build_complex(triple, floor, _top(triple)))


def novikov_projection(triple: FloerTriple, floor_from, floor_to, ring=None):
    """Homology map from the deeper truncation to the shallower one."""
    if ring is not None:
        triple = triple.with_ring(ring)
    top = _top(triple)
    cm = chain_projection(triple, floor_from, floor_to, top)
    return induced_hom_map(cm, homology(cm.source), homology(cm.target))


# ---------------------------------------------------------------------------
# witness sequences

class SequenceRejected(ValueError):
    def __init__(self, condition, k, message):
        super().__init__(message)
        self.condition = condition
        self.k = k


@dataclass(frozen=True)
class WitnessSequence:
    """a_1, ..., a_K (stored 0-based as ``a[j - 1]``)."""

    a: tuple
    kind: str = "custom"

    @property
    def depth(self) -> int:
        return len(self.a)

    def S(self, k: int) -> int:
        return sum(2 ** (j - 1) * self.a[j - 1] for j in range(1, k + 1))

    def partial_sums(self) -> list:
        out, s = [], 0
        for j, x in enumerate(self.a, 1):
            s += 2 ** (j - 1) * x
            out.append(s)
        return out

    def ratios(self) -> list:
        return [Fraction(s, 2 ** k) for k, s in enumerate(self.partial_sums(), 1)]

    def b(self, b0: int, k: int) -> Fraction:
        return Fraction(b0 - self.S(k), 2 ** k)


def validate_sequence(seq: WitnessSequence) -> None:
    """Raise SequenceRejected at the first violation.

    The ratio condition 0 < S_k / 2^k < 3/4 is checked for every k.  The
    growth condition S_k -> infinity is checked on the prefix as: some
    k in the second half of the prefix sets a new record for S.
    """
    if seq.depth < 1:
        raise SequenceRejected("depth", 0, "sequence must have at least one term")
    if any(not isinstance(x, int) for x in seq.a):
        raise SequenceRejected("integer", 0, "entries must be integers")
    for k, r in enumerate(seq.ratios(), 1):
        if not 0 < r < Fraction(3, 4):
            raise SequenceRejected("ratio", k, f"S_{k}/2^{k} = {r} is outside (0, 3/4)")
    sums = seq.partial_sums()
    K = seq.depth
    best = max(sums[: K // 2]) if K // 2 else None
    grows = False
    for k in range(K // 2 + 1, K + 1):
        if best is None or sums[k - 1] > best:
            grows = True
        best = sums[k - 1] if best is None else max(best, sums[k - 1])
    if not grows:
        raise SequenceRejected("growth", K, "S_k sets no new record in the second half of the prefix")


def witness_sequence(kind: str = "alternating", depth: int = 30, values: Sequence[int] | None = None,
                     validate: bool = True) -> WitnessSequence:
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if kind == "alternating":
        a = tuple(1 if j % 2 else 0 for j in range(1, depth + 1))
    elif kind == "ones":
        a = (1,) * depth
    elif kind == "zeros":
        a = (0,) * depth
    elif kind == "custom":
        if values is None:
            raise ValueError("custom sequences need values")
        a = tuple(values)[:depth]
    else:
        raise ValueError(f"unknown sequence kind {kind!r}")
    seq = WitnessSequence(a, kind)
    if validate:
        validate_sequence(seq)
    return seq


# ---------------------------------------------------------------------------
# cycles and boundaries on the appendix family

def _appendix(ring=ZZ):
    return lazy_family("appendix_z", ring)


def witness_cycle(seq: WitnessSequence, floor=None, triple=None) -> NovikovChain:
    """xi = sum a_j cund_j truncated at ``floor`` (default -K)."""
    triple = triple or _appendix()
    floor = to_fraction(floor if floor is not None else -seq.depth)
    names = {c.name for c in triple.window_points(floor, _top(triple))}
    coeffs = {f"cund{j}": x for j, x in enumerate(seq.a, 1) if f"cund{j}" in names}
    return NovikovChain(triple, coeffs, floor)


def cycle_check(xi: NovikovChain) -> bool:
    return xi.boundary().is_zero()


def candidate_boundary(seq: WitnessSequence, b0: int, floor=None, triple=None):
    """eta = sum b_j cbar_j from the recurrence, or None if some b_j is not integral."""
    triple = triple or _appendix()
    floor = to_fraction(floor if floor is not None else -seq.depth)
    coeffs = {"cbar0": b0}
    for k in range(1, seq.depth + 1):
        bk = seq.b(b0, k)
        if bk.denominator != 1:
            return None
        coeffs[f"cbar{k}"] = int(bk)
    names = {c.name for c in triple.window_points(floor, _top(triple))}
    return NovikovChain(triple, {n: x for n, x in coeffs.items() if n in names}, floor)


@dataclass
class ObstructionEntry:
    b0: int
    depth: int | None            # least k with b_k not an integer
    b_k: Fraction | None
    mode: str | None             # "non_integral" or "interval" (b_k in (-1, 0) as well)
    interval_depth: int | None   # least k with b_k in (-1, 0)

    def as_dict(self):
        return {
            "b0": self.b0,
            "obstruction_depth": self.depth,
            "b_k_value_as_rational": format_fraction(self.b_k) if self.b_k is not None else None,
            "mode": self.mode,
            "interval_depth": self.interval_depth,
        }


@dataclass
class ObstructionReport:
    bound: int
    depth: int
    entries: list = field(default_factory=list)

    @property
    def inconclusive(self):
        return [e.b0 for e in self.entries if e.depth is None]

    @property
    def success(self) -> bool:
        return not self.inconclusive

    @property
    def max_depth(self):
        return max((e.depth for e in self.entries if e.depth is not None), default=None)

    def as_dict(self):
        return {
            "bound": self.bound,
            "depth": self.depth,
            "success": self.success,
            "max_obstruction_depth": self.max_depth,
            "inconclusive": self.inconclusive,
            "entries": [e.as_dict() for e in self.entries],
        }


def _obstruct(seq, b0, K):
    first, value, interval = None, None, None
    for k in range(1, min(K, seq.depth) + 1):
        bk = seq.b(b0, k)
        if first is None and bk.denominator != 1:
            first, value = k, bk
        if interval is None and -1 < bk < 0:
            interval = k
        if first is not None and interval is not None:
            break
    if first is None:
        return ObstructionEntry(b0, None, None, None, interval)
    mode = "interval" if interval == first else "non_integral"
    return ObstructionEntry(b0, first, value, mode, interval)


def boundary_obstruction(seq: WitnessSequence, bound: int = 1000, depth: int = 40) -> ObstructionReport:
    """For every integer |b0| <= bound, the least k <= depth at which b_k fails to be an integer."""
    if seq.depth < depth:
        seq = WitnessSequence(seq.a + _extend(seq, depth), seq.kind)
    rep = ObstructionReport(bound, depth)
    for b0 in range(-bound, bound + 1):
        rep.entries.append(_obstruct(seq, b0, depth))
    return rep


def _extend(seq, depth):
    if seq.kind == "alternating":
        return tuple(1 if j % 2 else 0 for j in range(seq.depth + 1, depth + 1))
    if seq.kind in ("ones", "zeros"):
        return (seq.a[0] if seq.a else 0,) * (depth - seq.depth)
    raise ValueError("custom sequence is shorter than the requested depth")


# ---------------------------------------------------------------------------
# the gamma basis

def gamma(n: int) -> dict:
    """gamma_n = sum_{j<=n} 2^(n-j) cbar_j."""
    return {f"cbar{j}": 2 ** (n - j) for j in range(n + 1)}


def gamma_change_matrix(k: int) -> Matrix:
    """Columns gamma_0..gamma_k in the basis cbar_0..cbar_k."""
    return Matrix.from_columns(
        ZZ, [tuple(2 ** (n - j) if j <= n else 0 for j in range(k + 1)) for n in range(k + 1)], k + 1)


def check_gamma_boundaries(depth: int) -> bool:
    """d(gamma_{n-1}) = cund_n for n = 1..depth-1 in the window [-depth, 0]."""
    cx = build_complex(_appendix(), -depth, 0)
    for n in range(1, depth):
        image = cx.chain(cx.d(cx.vector(gamma(n - 1))))
        if image != {f"cund{n}": 1}:
            return False
    return True
