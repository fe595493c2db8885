"""Action-window chain complexes, their homology and the maps between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Mapping, Sequence

from .exact_linalg import (
    Matrix, ModuleMap, PresentedModule, Submodule, _left_inverse, reduce_echelon,
    smith_normal_form, reduce,
)
from .floer_triple import FloerTriple, EmptyWindow, to_fraction

__all__ = [
    "Window", "WindowComplex", "HomologyGroup", "ChainMap", "SquareClassification",
    "build_complex", "check_d_squared", "homology", "chain_projection", "chain_inclusion",
    "basis_map", "induced_hom_map", "classify_square", "check_identities", "IdentityReport",
    "ChainMapError",
]


@dataclass(frozen=True)
class Window:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = to_fraction(self.a), to_fraction(self.b)
        if a > b:
            raise EmptyWindow(f"window [{a}, {b}] has a > b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __str__(self):
        return f"[{self.a}, {self.b}]"


class WindowComplex:
    """CM_a^b: basis sorted by (action, name), ``boundary[c', c] = m(c', c)``."""

    def __init__(self, triple: FloerTriple, window: Window, basis, boundary: Matrix):
        self.triple = triple
        self.window = window
        self.basis = tuple(basis)
        self.boundary = boundary
        self.index = {c.name: i for i, c in enumerate(self.basis)}

    @property
    def ring(self):
        return self.triple.ring

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.basis)

    def as_module(self) -> PresentedModule:
        return PresentedModule.free(self.ring, self.names)

    def vector(self, coeffs: Mapping[str, object]) -> tuple:
        """Chain vector from ``{name: coefficient}``; names outside the window are an error."""
        v = [self.ring.zero] * self.dim
        for name, x in coeffs.items():
            v[self.index[name]] = self.ring.normalize(v[self.index[name]] + self.ring(x))
        return tuple(v)

    def chain(self, vec: Sequence) -> dict:
        return {self.basis[i].name: x for i, x in enumerate(vec) if x != 0}

    def d(self, vec: Sequence) -> tuple:
        return self.boundary.apply(vec)

    def __repr__(self):
        return f"WindowComplex({self.window}, dim={self.dim}, ring={self.ring})"


def build_complex(triple: FloerTriple, a, b=None) -> WindowComplex:
    """CM_a^b.  Flows with an endpoint outside the window are dropped."""
    window = a if isinstance(a, Window) else Window(a, b)
    basis = triple.window_points(window.a, window.b)
    return WindowComplex(triple, window, basis, triple.flow_matrix(basis))


def check_d_squared(cx: WindowComplex):
    """``(True, None)`` or ``(False, name)`` for the first column with d(d c) != 0."""
    sq = cx.boundary @ cx.boundary
    for j in range(cx.dim):
        if any(x != 0 for x in sq.column(j)):
            return False, cx.basis[j].name
    return True, None


# ---------------------------------------------------------------------------
# homology

class HomologyGroup:
    """ker d / im d with one cycle representative per generator of ``module``."""

    def __init__(self, cx: WindowComplex, module: PresentedModule, representatives, coords):
        self.complex = cx
        self.module = module
        self.representatives = tuple(representatives)
        self._coords = coords

    @property
    def ring(self):
        return self.complex.ring

    def is_cycle(self, vec) -> bool:
        return all(x == 0 for x in self.complex.d(vec))

    def coordinates(self, cycle) -> tuple:
        """Coordinates of the class of ``cycle`` in terms of the representatives."""
        cycle = tuple(self.ring(x) for x in cycle)
        if not self.is_cycle(cycle):
            raise ValueError("not a cycle")
        return self.module.reduce_coordinates(self._coords(cycle))

    def class_is_zero(self, cycle) -> bool:
        return self.module.contains_relation(self.coordinates(cycle))

    def is_boundary(self, chain) -> bool:
        return self.is_cycle(chain) and self.class_is_zero(chain)

    @property
    def rank(self) -> int:
        return self.module.free_rank

    def verify(self) -> bool:
        """Representatives are cycles and have unit coordinates."""
        n = self.module.ngens
        for i, r in enumerate(self.representatives):
            if not self.is_cycle(r):
                return False
            e = tuple(int(i == j) for j in range(n))
            if self.coordinates(r) != self.module.reduce_coordinates(e):
                return False
        return True

    def __repr__(self):
        return f"HomologyGroup({self.complex.window}, {self.module.describe()})"


def homology(cx: WindowComplex) -> HomologyGroup:
    if cx.ring.is_field:
        return _field_homology(cx)
    return _integer_homology(cx)


def _field_homology(cx):
    ring, n = cx.ring, cx.dim
    D = cx.boundary
    red = reduce(D)
    img, K = red.image_basis, red.kernel_basis
    # greedy completion of the image basis by kernel columns, leftmost first
    joint = reduce_echelon(img.hstack(K))
    chosen = [p - img.cols for p in joint.pivots if p >= img.cols]
    reps = [K.column(j) for j in chosen]
    h = len(reps)
    A = Matrix.from_columns(ring, reps + img.columns(), n)
    P = _left_inverse(A) if A.cols else Matrix.zeros(ring, 0, n)

    def coords(z):
        return P.apply(z)[:h]

    module = PresentedModule.free(ring, [f"h{i}" for i in range(h)])
    return HomologyGroup(cx, module, reps, coords)


def _integer_homology(cx):
    ring, n = cx.ring, cx.dim
    D = cx.boundary
    snf = smith_normal_form(D)
    r = snf.rank
    K = snf.V.submatrix(range(n), range(r, n))
    k = K.cols
    Vinv = snf.Vinv
    Y = Matrix.from_columns(ring, [Vinv.apply(c)[r:] for c in D.columns()], k)
    sy = smith_normal_form(Y)
    diag = list(sy.D.diagonal()) + [0] * (k - min(Y.rows, Y.cols))
    keep = [i for i in range(k) if diag[i] != 1]
    reps = [K.apply(sy.Uinv.column(i)) for i in keep]
    torsion = [(pos, diag[i]) for pos, i in enumerate(keep) if diag[i] != 0]
    rels = Matrix.from_columns(ring, [tuple(d if p == pos else 0 for p in range(len(keep)))
                                      for pos, d in torsion], len(keep))
    module = PresentedModule(ring, tuple(f"h{i}" for i in range(len(keep))), rels)
    Uy = sy.U

    def coords(z):
        w = Vinv.apply(z)
        y = Uy.apply(w[r:])
        return tuple(y[i] for i in keep)

    return HomologyGroup(cx, module, reps, coords)


# ---------------------------------------------------------------------------
# chain maps

class ChainMapError(ValueError):
    """A matrix that does not commute with the boundaries, or a bad parameter order."""


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: WindowComplex
    target: WindowComplex
    matrix: Matrix
    kind: str = "composite"
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ChainMapError("matrix shape does not match the complexes")
        if self.check and not self.commutes():
            raise ChainMapError("matrix does not commute with the boundaries")

    def commutes(self) -> bool:
        return self.target.boundary @ self.matrix == self.matrix @ self.source.boundary

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        if other.target.names != self.source.names or other.target.window != self.source.window:
            raise ChainMapError("chain maps are not composable")
        return ChainMap(other.source, self.target, self.matrix @ other.matrix, "composite")

    def as_module_map(self) -> ModuleMap:
        return ModuleMap(self.source.as_module(), self.target.as_module(), self.matrix)

    def __call__(self, vec):
        return self.matrix.apply(vec)


def basis_map(source: WindowComplex, target: WindowComplex, kind: str) -> ChainMap:
    """Send each source point to itself if it lies in the target window, else to 0."""
    ring = source.ring
    data = [[ring.zero] * source.dim for _ in range(target.dim)]
    for j, c in enumerate(source.basis):
        i = target.index.get(c.name)
        if i is not None:
            data[i][j] = ring.one
    M = Matrix(ring, target.dim, source.dim, tuple(tuple(r) for r in data))
    return ChainMap(source, target, M, kind)


def chain_projection(triple, a1, a2, b, source=None, target=None) -> ChainMap:
    """p^b_{a2,a1}: CM_{a1}^b -> CM_{a2}^b, killing the points with action in [a1, a2)."""
    a1, a2, b = map(to_fraction, (a1, a2, b))
    if not a1 <= a2 <= b:
        raise ChainMapError(f"projection needs a1 <= a2 <= b, got {a1}, {a2}, {b}")
    source = source or build_complex(triple, a1, b)
    target = target or build_complex(triple, a2, b)
    return basis_map(source, target, "projection")


def chain_inclusion(triple, a, b1, b2, source=None, target=None) -> ChainMap:
    """i_a^{b2,b1}: CM_a^{b1} -> CM_a^{b2}."""
    a, b1, b2 = map(to_fraction, (a, b1, b2))
    if not a <= b1 <= b2:
        raise ChainMapError(f"inclusion needs a <= b1 <= b2, got {a}, {b1}, {b2}")
    source = source or build_complex(triple, a, b1)
    target = target or build_complex(triple, a, b2)
    return basis_map(source, target, "inclusion")


def induced_hom_map(chain_map: ChainMap, H_source: HomologyGroup, H_target: HomologyGroup) -> ModuleMap:
    cols = []
    for r in H_source.representatives:
        image = chain_map(r)
        try:
            cols.append(H_target.coordinates(image))
        except ValueError:
            raise AssertionError("chain map sends a cycle to a non-cycle") from None
    M = Matrix.from_columns(chain_map.matrix.ring, cols, H_target.module.ngens)
    return ModuleMap(H_source.module, H_target.module, M)


# ---------------------------------------------------------------------------
# squares

@dataclass(frozen=True)
class SquareClassification:
    commutative: bool
    exact: bool
    cartesian: bool
    cocartesian: bool
    bicartesian: bool

    def as_dict(self):
        return dict(self.__dict__)


def _as_module_map(f):
    return f.as_module_map() if isinstance(f, ChainMap) else f


def _direct_sum(B: PresentedModule, C: PresentedModule) -> PresentedModule:
    gens = tuple(f"B.{g}" for g in B.generators) + tuple(f"C.{g}" for g in C.generators)
    return PresentedModule(B.ring, gens, Matrix.block_diag(B.ring, [B.relations, C.relations]))


def classify_square(phi_BA, phi_CA, phi_DB, phi_DC) -> SquareClassification:
    """Classify the square A -> B -> D, A -> C -> D via A -> B+C -> D.

    The second map is ``<phi_DB, -phi_DC>``; cartesian means left exact,
    cocartesian right exact.
    """
    f_BA, f_CA, f_DB, f_DC = map(_as_module_map, (phi_BA, phi_CA, phi_DB, phi_DC))
    A, B, C, D = f_BA.source, f_BA.target, f_CA.target, f_DB.target
    if (f_CA.source.ngens != A.ngens or f_DB.source.ngens != B.ngens
            or f_DC.source.ngens != C.ngens or f_DC.target.ngens != D.ngens):
        raise ValueError("maps do not form a square")
    BC = _direct_sum(B, C)
    f = ModuleMap(A, BC, f_BA.matrix.vstack(f_CA.matrix))
    g = ModuleMap(BC, D, f_DB.matrix.hstack(-f_DC.matrix))
    commutative = (g @ f).is_zero()
    exact = False
    if commutative:
        im_f = Submodule(BC, f.matrix)
        exact = all(im_f.contains(x) for x in g.kernel_lattice().columns())
    cart = exact and f.is_injective()
    cocart = exact and g.is_surjective()
    return SquareClassification(commutative, exact, cart, cocart, cart and cocart)


# ---------------------------------------------------------------------------
# structural identities

@dataclass
class IdentityReport:
    results: list = field(default_factory=list)

    def add(self, name, params, passed):
        self.results.append((name, tuple(params), bool(passed)))

    @property
    def ok(self) -> bool:
        return all(p for _, _, p in self.results)

    def failures(self):
        return [r for r in self.results if not r[2]]

    def counts(self) -> dict:
        out = {}
        for name, _, _ in self.results:
            out[name] = out.get(name, 0) + 1
        return out


class _Cache:
    def __init__(self, triple):
        self.triple = triple
        self.cx, self.h = {}, {}

    def complex(self, a, b):
        if (a, b) not in self.cx:
            self.cx[(a, b)] = build_complex(self.triple, a, b)
        return self.cx[(a, b)]

    def hom(self, a, b):
        if (a, b) not in self.h:
            self.h[(a, b)] = homology(self.complex(a, b))
        return self.h[(a, b)]

    def p(self, b, a2, a1):
        return chain_projection(self.triple, a1, a2, b, self.complex(a1, b), self.complex(a2, b))

    def i(self, a, b2, b1):
        return chain_inclusion(self.triple, a, b1, b2, self.complex(a, b1), self.complex(a, b2))

    def Hp(self, b, a2, a1):
        return induced_hom_map(self.p(b, a2, a1), self.hom(a1, b), self.hom(a2, b))

    def Hi(self, a, b2, b1):
        return induced_hom_map(self.i(a, b2, b1), self.hom(a, b1), self.hom(a, b2))


def check_identities(triple: FloerTriple, a_values, b_values) -> IdentityReport:
    """Check the projection/inclusion identities at chain and homology level.

    Chain level: p d = d p, p p = p, p_{a,a} = id, i d = d i, i i = i,
    i^{b,b} = id, i p = p i.  Homology level: the induced versions of the
    composition, identity and mixed identities.  All parameter tuples drawn
    from the two value lists (with repetition, respecting the order
    constraints) are checked.
    """
    A = sorted({to_fraction(x) for x in a_values})
    B = sorted({to_fraction(x) for x in b_values})
    c = _Cache(triple)
    rep = IdentityReport()

    for a1, a2 in combinations_with_replacement(A, 2):
        for b in B:
            if a2 > b:
                continue
            rep.add("proj1", (a1, a2, b), c.p(b, a2, a1).commutes())
    for a in A:
        for b in B:
            if a > b:
                continue
            I = Matrix.identity(triple.ring, c.complex(a, b).dim)
            rep.add("proj2a", (a, b), c.p(b, a, a).matrix == I)
            rep.add("in2a", (a, b), c.i(a, b, b).matrix == I)
            Hid = c.hom(a, b).module.identity()
            rep.add("proj3a", (a, b), c.Hp(b, a, a).equals(Hid))
            rep.add("in3a", (a, b), c.Hi(a, b, b).equals(Hid))
    for a1, a2, a3 in combinations_with_replacement(A, 3):
        for b in B:
            if a3 > b:
                continue
            rep.add("proj2", (a1, a2, a3, b),
                    (c.p(b, a3, a2) @ c.p(b, a2, a1)).matrix == c.p(b, a3, a1).matrix)
            rep.add("proj3", (a1, a2, a3, b),
                    (c.Hp(b, a3, a2) @ c.Hp(b, a2, a1)).equals(c.Hp(b, a3, a1)))
    for a in A:
        for b1, b2 in combinations_with_replacement(B, 2):
            if a > b1:
                continue
            rep.add("in1", (a, b1, b2), c.i(a, b2, b1).commutes())
        for b1, b2, b3 in combinations_with_replacement(B, 3):
            if a > b1:
                continue
            rep.add("in2", (a, b1, b2, b3),
                    (c.i(a, b3, b2) @ c.i(a, b2, b1)).matrix == c.i(a, b3, b1).matrix)
            rep.add("in3", (a, b1, b2, b3),
                    (c.Hi(a, b3, b2) @ c.Hi(a, b2, b1)).equals(c.Hi(a, b3, b1)))
    for a1, a2 in combinations_with_replacement(A, 2):
        for b1, b2 in combinations_with_replacement(B, 2):
            if a2 > b1:
                continue
            lhs = c.i(a2, b2, b1).matrix @ c.p(b1, a2, a1).matrix
            rhs = c.p(b2, a2, a1).matrix @ c.i(a1, b2, b1).matrix
            rep.add("ip1", (a1, a2, b1, b2), lhs == rhs)
            rep.add("ip2", (a1, a2, b1, b2),
                    (c.Hi(a2, b2, b1) @ c.Hp(b1, a2, a1)).equals(c.Hp(b2, a2, a1) @ c.Hi(a1, b2, b1)))
    return rep
