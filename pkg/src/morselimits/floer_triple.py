"""Floer triples: critical points with exact actions and flow counts.

A triple is either explicit (a finite list of points and flows) or lazy: a
family that can list the points and flows inside any bounded action interval.
The two built-in families are available in both forms.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .exact_linalg import CoefficientRing, QQ, ZZ, Matrix, parse_ring

__all__ = [
    "CriticalPoint", "FloerTriple", "LazyFamily", "EmptyWindow", "FloerFormatError",
    "AxiomCheck", "ValidationReport", "validate", "points_in_window",
    "parse", "serialize", "load", "dump",
    "builtin_family", "lazy_family", "random_triple", "BUILTIN_FAMILIES",
    "to_fraction", "format_fraction",
]


def to_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction or a string such as ``"-7/2"`` or ``"-3.5"``."""
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a string or Fraction")
    return Fraction(x)


def format_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class EmptyWindow(ValueError):
    """Raised for an action window with a > b."""


class FloerFormatError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True, order=True)
class CriticalPoint:
    action: Fraction
    name: str
    grading: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "action", to_fraction(self.action))

    @property
    def sort_key(self):
        return (self.action, self.name)


def _check_window(a, b):
    a, b = to_fraction(a), to_fraction(b)
    if a > b:
        raise EmptyWindow(f"window [{a}, {b}] has a > b")
    return a, b


class LazyFamily:
    """An infinite triple given by two pure functions of a bounded interval.

    ``points(a, b)`` returns the critical points with action in ``[a, b]``;
    ``flow(c1, c2)`` returns the (unreduced, rational) flow count between two
    of them.  ``max_action`` is ``None`` when the actions are unbounded above.
    """

    def __init__(self, name: str, points: Callable, flow: Callable, max_action=None):
        self.name = name
        self._points = points
        self._flow = flow
        self.max_action = None if max_action is None else to_fraction(max_action)

    def points(self, a, b) -> list[CriticalPoint]:
        return sorted(self._points(a, b), key=lambda c: c.sort_key)

    def flow(self, c1: CriticalPoint, c2: CriticalPoint):
        return self._flow(c1, c2)

    def __repr__(self):
        return f"LazyFamily({self.name!r})"


class FloerTriple:
    """The datum (critical points, action, flow counts) over a coefficient ring.

    ``flows`` maps ``(from_name, to_name)`` to the nonzero ring element
    ``m(from, to)``; the boundary of a point ``c`` is ``sum m(c', c) c'``.
    """

    def __init__(self, ring: CoefficientRing, points: Iterable[CriticalPoint] = (),
                 flows: Mapping | None = None, lazy: LazyFamily | None = None, name: str | None = None):
        self.ring = ring
        self.lazy = lazy
        self.name = name or (lazy.name if lazy else None)
        pts = sorted(points, key=lambda c: c.sort_key)
        by_name = {}
        for c in pts:
            if c.name in by_name:
                raise ValueError(f"duplicate point name {c.name!r}")
            by_name[c.name] = c
        if lazy is not None and pts:
            raise ValueError("a lazy triple carries no explicit points")
        self.points = tuple(pts)
        self._by_name = by_name
        clean = {}
        for (u, v), coeff in (flows or {}).items():
            if lazy is None and (u not in by_name or v not in by_name):
                raise ValueError(f"flow ({u}, {v}) references an unknown point")
            x = ring(coeff)
            if x != 0:
                clean[(u, v)] = x
        self.flows = clean

    # -- queries ---------------------------------------------------------------

    @property
    def is_lazy(self) -> bool:
        return self.lazy is not None

    @property
    def max_action(self):
        if self.lazy is not None:
            return self.lazy.max_action
        return max((c.action for c in self.points), default=None)

    def point(self, name: str) -> CriticalPoint:
        return self._by_name[name]

    def window_points(self, a, b, half_open_at_top=False) -> list[CriticalPoint]:
        a, b = _check_window(a, b)
        if self.lazy is not None:
            pts = self.lazy.points(a, b)
        else:
            pts = [c for c in self.points if a <= c.action <= b]
        if half_open_at_top:
            pts = [c for c in pts if c.action < b]
        return pts

    def window_flows(self, a, b) -> dict:
        """Flows with both endpoints in ``[a, b]``."""
        pts = self.window_points(a, b)
        if self.lazy is None:
            names = {c.name for c in pts}
            return {k: v for k, v in self.flows.items() if k[0] in names and k[1] in names}
        out = {}
        for c1 in pts:
            for c2 in pts:
                if c1.action < c2.action:
                    x = self.ring(self.lazy.flow(c1, c2))
                    if x != 0:
                        out[(c1.name, c2.name)] = x
        return out

    def restrict(self, a, b) -> "FloerTriple":
        """An explicit triple holding only the points with action in [a, b]."""
        return FloerTriple(self.ring, self.window_points(a, b), self.window_flows(a, b),
                           name=self.name)

    def with_ring(self, ring: CoefficientRing) -> "FloerTriple":
        if self.lazy is not None:
            return FloerTriple(ring, lazy=self.lazy, name=self.name)
        return FloerTriple(ring, self.points, self.flows, name=self.name)

    def flow_matrix(self, points: list[CriticalPoint] | None = None) -> Matrix:
        """``M[i][j] = m(points[i], points[j])`` for the explicit point list."""
        points = list(self.points) if points is None else points
        index = {c.name: i for i, c in enumerate(points)}
        data = [[self.ring.zero] * len(points) for _ in points]
        if self.lazy is None:
            for (u, v), x in self.flows.items():
                if u in index and v in index:
                    data[index[u]][index[v]] = x
        else:
            for c1 in points:
                for c2 in points:
                    if c1.action < c2.action:
                        data[index[c1.name]][index[c2.name]] = self.ring(self.lazy.flow(c1, c2))
        return Matrix(self.ring, len(points), len(points), tuple(tuple(r) for r in data))

    def __eq__(self, other):
        if not isinstance(other, FloerTriple) or self.is_lazy or other.is_lazy:
            return NotImplemented
        return (self.ring == other.ring
                and [(c.name, c.action, c.grading) for c in self.points]
                == [(c.name, c.action, c.grading) for c in other.points]
                and self.flows == other.flows)

    __hash__ = None

    def __repr__(self):
        if self.is_lazy:
            return f"FloerTriple(lazy={self.lazy.name!r}, ring={self.ring})"
        return f"FloerTriple({self.name or 'anonymous'}, ring={self.ring}, points={len(self.points)}, flows={len(self.flows)})"


def points_in_window(triple: FloerTriple, a, b, half_open_at_top=False) -> list[CriticalPoint]:
    """Points with ``a <= f(c) <= b`` (or ``< b``), sorted by (action, name)."""
    return triple.window_points(a, b, half_open_at_top)


# ---------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    passed: bool
    witness: tuple = ()
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[AxiomCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, axiom) -> AxiomCheck:
        return next(c for c in self.checks if c.axiom == axiom)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def validate(triple: FloerTriple, window=None, morse_mode=False) -> ValidationReport:
    """Check finiteness (i), action increase (ii) and square zero (iii).

    Lazy triples are checked on ``window`` (required); the sum in (iii) only
    involves intermediate points between the two endpoints, so a window check
    is exact for pairs inside it.
    """
    if triple.is_lazy:
        if window is None:
            raise ValueError("a lazy triple is validated on an explicit window")
        a, b = _check_window(*window)
        pts = triple.window_points(a, b)
        flows = triple.window_flows(a, b)
        fin = AxiomCheck("i", True, detail=f"{len(pts)} points in [{a}, {b}]")
    else:
        pts = list(triple.points)
        flows = triple.flows
        fin = AxiomCheck("i", True, detail=f"{len(pts)} points (explicit list)")
    by_name = {c.name: c for c in pts}

    checks = [fin]
    bad = [(u, v) for (u, v) in sorted(flows) if not by_name[u].action < by_name[v].action]
    if bad:
        checks.append(AxiomCheck("ii", False, bad[0],
                                 f"m{bad[0]} != 0 but f({bad[0][0]}) >= f({bad[0][1]})"))
    else:
        checks.append(AxiomCheck("ii", True))

    outgoing = {}
    for (u, v), x in flows.items():
        outgoing.setdefault(u, []).append((v, x))
    square = {}
    ring = triple.ring
    for (u, v), x in flows.items():
        for w, y in outgoing.get(v, ()):
            square[(u, w)] = ring.normalize(square.get((u, w), ring.zero) + x * y)
    nonzero = sorted(((k, v) for k, v in square.items() if v != 0),
                     key=lambda kv: (by_name[kv[0][0]].sort_key, by_name[kv[0][1]].sort_key))
    if nonzero:
        (u, w), val = nonzero[0]
        checks.append(AxiomCheck("iii", False, (u, w, val), f"sum_c m({u},c) m(c,{w}) = {val}"))
    else:
        checks.append(AxiomCheck("iii", True))

    if morse_mode:
        off = [(u, v) for (u, v) in sorted(flows)
               if by_name[u].grading is None or by_name[v].grading is None
               or by_name[u].grading != by_name[v].grading - 1]
        checks.append(AxiomCheck("grading", not off, off[0] if off else (),
                                 "flow between points whose indices do not differ by one" if off else ""))
    return ValidationReport(tuple(checks))


# ---------------------------------------------------------------------------
# the .floer text format

def serialize(triple: FloerTriple) -> str:
    if triple.is_lazy:
        raise ValueError("restrict a lazy triple to a window before serializing it")
    ring = triple.ring
    lines = [f"ring F {ring.p}" if ring.kind == "F" else f"ring {ring.kind}"]
    if triple.name:
        lines.insert(0, f"# {triple.name}")
    for c in triple.points:
        lines.append(f"point {c.name} {format_fraction(c.action)}")
    for c in triple.points:
        if c.grading is not None:
            lines.append(f"grading {c.name} {c.grading}")
    order = {c.name: c.sort_key for c in triple.points}
    for (u, v) in sorted(triple.flows, key=lambda k: (order[k[0]], order[k[1]])):
        lines.append(f"flow {u} {v} {format_fraction(triple.flows[(u, v)])}")
    return "\n".join(lines) + "\n"


def _rational(tok, lineno):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise FloerFormatError(f"not a rational number: {tok!r}", lineno) from None


def parse(text: str) -> FloerTriple:
    ring = None
    points, gradings, flows = {}, {}, {}
    name = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if ring is None and raw.strip().startswith("#") and name is None:
                name = raw.strip()[1:].strip() or None
            continue
        tok = line.split()
        head = tok[0]
        if ring is None:
            if head != "ring":
                raise FloerFormatError("the first directive must be 'ring'", lineno)
            try:
                ring = parse_ring("".join(tok[1:]))
            except ValueError as e:
                raise FloerFormatError(str(e), lineno) from None
            continue
        if head == "ring":
            raise FloerFormatError("ring declared twice", lineno)
        if head == "point":
            if len(tok) != 3:
                raise FloerFormatError("expected: point <name> <action>", lineno)
            if tok[1] in points:
                raise FloerFormatError(f"duplicate point name {tok[1]!r}", lineno)
            points[tok[1]] = _rational(tok[2], lineno)
        elif head == "grading":
            if len(tok) != 3 or not tok[2].lstrip("-").isdigit():
                raise FloerFormatError("expected: grading <name> <int>", lineno)
            gradings[tok[1]] = (int(tok[2]), lineno)
        elif head == "flow":
            if len(tok) != 4:
                raise FloerFormatError("expected: flow <from> <to> <coeff>", lineno)
            key = (tok[1], tok[2])
            if key in flows:
                raise FloerFormatError(f"duplicate flow {key}", lineno)
            q = _rational(tok[3], lineno)
            try:
                x = ring(q)
            except ValueError as e:
                raise FloerFormatError(str(e), lineno) from None
            if x == 0:
                raise FloerFormatError(f"flow coefficient {tok[3]} vanishes in {ring}", lineno)
            flows[key] = (x, lineno)
        else:
            raise FloerFormatError(f"unknown directive {head!r}", lineno)
    if ring is None:
        raise FloerFormatError("missing 'ring' line")
    for nm, (_, lineno) in gradings.items():
        if nm not in points:
            raise FloerFormatError(f"grading for unknown point {nm!r}", lineno)
    for (u, v), (_, lineno) in flows.items():
        for nm in (u, v):
            if nm not in points:
                raise FloerFormatError(f"flow references unknown point {nm!r}", lineno)
    pts = [CriticalPoint(act, nm, gradings.get(nm, (None,))[0]) for nm, act in points.items()]
    return FloerTriple(ring, pts, {k: x for k, (x, _) in flows.items()}, name=name)


def load(path) -> FloerTriple:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(triple: FloerTriple, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(triple))


# ---------------------------------------------------------------------------
# built-in families

def _intro_points(a, b):
    # maxima cbar_n at n, minima cund_n at -n, n >= 1
    out = []
    for n in range(max(1, math.ceil(a)), math.floor(b) + 1):
        out.append(CriticalPoint(n, f"cbar{n}", 1))
    for n in range(max(1, math.ceil(-b)), math.floor(-a) + 1):
        out.append(CriticalPoint(-n, f"cund{n}", 0))
    return out


def _intro_flow(c1, c2):
    if c1.name.startswith("cund") and c2.name == "cbar" + c1.name[4:]:
        return 1
    return 0


def _appendix_points(a, b):
    # cbar_n at -n for n >= 0, cund_n at -n-1 for n >= 1
    out = []
    for n in range(max(0, math.ceil(-b)), math.floor(-a) + 1):
        out.append(CriticalPoint(-n, f"cbar{n}"))
    for n in range(max(1, math.ceil(-b - 1)), math.floor(-a - 1) + 1):
        out.append(CriticalPoint(-n - 1, f"cund{n}"))
    return out


def _appendix_flow(c1, c2):
    if not (c1.name.startswith("cund") and c2.name.startswith("cbar")):
        return 0
    n, k = int(c1.name[4:]), int(c2.name[4:])
    if k == n - 1:
        return 1
    if k == n:
        return -2
    return 0


BUILTIN_FAMILIES = {
    "intro_lines": (_intro_points, _intro_flow, None),
    "appendix_z": (_appendix_points, _appendix_flow, 0),
}


def lazy_family(name: str, ring: CoefficientRing = ZZ) -> FloerTriple:
    """The infinite built-in family as a lazy triple."""
    try:
        pts, flow, top = BUILTIN_FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(BUILTIN_FAMILIES)}") from None
    return FloerTriple(ring, lazy=LazyFamily(name, pts, flow, top), name=name)


def builtin_family(name: str, depth: int, ring: CoefficientRing = ZZ) -> FloerTriple:
    """Explicit truncation of a built-in family.

    ``intro_lines``: ``cbar_n`` (action n) and ``cund_n`` (action -n) for
    ``1 <= n <= depth`` with ``m(cund_n, cbar_n) = 1``.

    ``appendix_z``: ``cbar_n`` (action -n, ``0 <= n <= depth``) and ``cund_n``
    (action -n-1, ``1 <= n <= depth-1``) with ``m(cund_n, cbar_{n-1}) = 1``
    and ``m(cund_n, cbar_n) = -2``.
    """
    if name not in BUILTIN_FAMILIES:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(BUILTIN_FAMILIES)}")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    pts_fn, flow_fn, _ = BUILTIN_FAMILIES[name]
    if name == "intro_lines":
        pts = pts_fn(Fraction(-depth), Fraction(depth))
    else:
        pts = [c for c in pts_fn(Fraction(-depth), Fraction(0))]
    flows = {}
    for c1 in pts:
        for c2 in pts:
            x = flow_fn(c1, c2)
            if x and ring(x) != 0:
                flows[(c1.name, c2.name)] = x
    return FloerTriple(ring, pts, flows, name=f"{name}_{depth}")


# ---------------------------------------------------------------------------
# random triples

def random_triple(seed, point_count: int, action_spread=10, ring: CoefficientRing = QQ,
                  pairs: int | None = None, density: float = 0.4) -> FloerTriple:
    """A random triple that satisfies the axioms by construction.

    Start from a square-zero matrix made of cancelling pairs (lower point flows
    to the higher one) and singletons, then conjugate by a random unitriangular
    matrix whose off-diagonal entries only go from lower to higher action.
    """
    if point_count < 1:
        raise ValueError("point_count must be at least 1")
    rng = random.Random(seed)
    n = point_count
    if pairs is None:
        pairs = rng.randint(0, n // 2)
    if not 0 <= 2 * pairs <= n:
        raise ValueError("too many pairs for the point count")

    denom = 2
    spread = Fraction(action_spread)
    while 2 * spread * denom + 1 < n:
        denom *= 2
    lo = math.floor(-spread * denom)
    hi = math.ceil(spread * denom)
    actions = sorted(Fraction(k, denom) for k in rng.sample(range(lo, hi + 1), n))
    labels = [f"x{i:02d}" for i in range(n)]
    rng.shuffle(labels)

    # positions are action ranks; pair up random positions, lower one flows up
    slots = list(range(n))
    rng.shuffle(slots)
    D0 = [[0] * n for _ in range(n)]
    for k in range(pairs):
        i, j = sorted(slots[2 * k:2 * k + 2])
        D0[i][j] = 1

    def coeff():
        if ring.kind == "F":
            return rng.randrange(1, ring.p)
        return rng.choice([-2, -1, 1, 2, 3])

    P = [[int(i == j) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                P[i][j] = coeff()
    R = Matrix.from_rows(ring, P)
    Pinv = _unitriangular_inverse(R)
    D = R @ Matrix.from_rows(ring, D0) @ Pinv

    pts = [CriticalPoint(actions[i], labels[i]) for i in range(n)]
    flows = {(labels[i], labels[j]): D[i, j] for i in range(n) for j in range(n) if D[i, j] != 0}
    return FloerTriple(ring, pts, flows, name=f"random_{seed}")


def _unitriangular_inverse(P: Matrix) -> Matrix:
    n = P.rows
    ring = P.ring
    inv = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    # back substitution on an upper unitriangular matrix
    for j in range(n):
        for i in range(j - 1, -1, -1):
            s = sum((P[i, k] * inv[k][j] for k in range(i + 1, j + 1)), ring.zero)
            inv[i][j] = ring.normalize(-s)
    return Matrix(ring, n, n, tuple(tuple(r) for r in inv))
