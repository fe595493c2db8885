"""A cycle in the completed complex that no finite search can bound."""

from morselimits.novikov import (
    SequenceRejected, boundary_obstruction, candidate_boundary, cycle_check, witness_cycle, witness_sequence,
)

seq = witness_sequence("alternating", 30)
print("first terms:", seq.a[:8])
print("ratios:", [str(r) for r in seq.ratios()[:6]])

xi = witness_cycle(seq)
print("cycle:", cycle_check(xi))

# every starting value b0 in [-1000, 1000] leaves the integers at some depth
rep = boundary_obstruction(seq, 1000, 40)
print("obstructed:", rep.success, " deepest obstruction:", rep.max_depth)
e = next(e for e in rep.entries if e.b0 == 1)
print("b0 = 1:", e.as_dict())

# control: the all-ones sequence fails validation and is a boundary
try:
    witness_sequence("ones", 30)
except SequenceRejected as err:
    print("ones rejected:", err.condition, "at k =", err.k)
ones = witness_sequence("ones", 30, validate=False)
eta = candidate_boundary(ones, -1)
print("d(eta) == xi:", eta.boundary() == witness_cycle(ones))
