"""Floer triples: build, validate, restrict and serialize."""

from morselimits import builtin_family, lazy_family, parse, serialize, validate
from morselimits.exact_linalg import GF

# a finite truncation of the two-component example: cbar_n at action n, cund_n at -n
t = builtin_family("intro_lines", 3, GF(2))
print(len(t.points), "points")
for c in t.points:
    print(" ", c.name, c.action)

# every axiom is checked and reported with a witness on failure
print("axioms ok:", validate(t).ok)

# the text format round-trips
text = serialize(t)
print(text)
assert parse(text) == t

# a lazy family is infinite; only windows are ever materialized
lazy = lazy_family("appendix_z")
print("window [-3, 0]:", [c.name for c in lazy.window_points(-3, 0)])
print("flows:", lazy.window_flows(-3, 0))

# a broken triple: a flow from a point to itself
bad = parse("ring Z\npoint a 0\nflow a a 1\n")
for f in validate(bad).failures():
    print("failed axiom", f.axiom, "witness", f.witness)
