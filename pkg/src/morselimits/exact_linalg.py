"""Exact linear algebra over the rationals, prime fields and the integers.

Everything here works on plain Python numbers: ``Fraction`` for Q, ``int``
residues in ``[0, p)`` for F_p and arbitrary precision ``int`` for Z.  Matrices
are small and dense.

>>> M = Matrix.from_rows(QQ, [[1, 2], [2, 4]])
>>> reduce(M).rank
1
>>> smith_normal_form(Matrix.from_rows(ZZ, [[2, 0], [0, 3]])).D.diagonal()
(1, 6)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import sympy

__all__ = [
    "CoefficientRing", "QQ", "ZZ", "GF", "parse_ring",
    "Matrix", "ReduceResult", "SmithForm", "reduce", "smith_normal_form",
    "solve", "kernel_basis", "lattice_basis", "span_contains",
    "PresentedModule", "present_quotient", "ModuleMap", "induced_map",
    "NotWellDefined", "Submodule",
]


# ---------------------------------------------------------------------------
# rings

@dataclass(frozen=True)
class CoefficientRing:
    """One of Q, Z or F_p.  ``kind`` is ``"Q"``, ``"Z"`` or ``"F"``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("Q", "Z", "F"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "F":
            if self.p is None or not sympy.isprime(self.p):
                raise ValueError(f"modulus {self.p} is not prime")
        elif self.p is not None:
            raise ValueError("only prime fields carry a modulus")

    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def __call__(self, x):
        """Coerce an int, Fraction or ``"p/q"`` string into the ring."""
        if isinstance(x, str):
            x = Fraction(x)
        if self.kind == "Q":
            return Fraction(x)
        if self.kind == "Z":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"{x} is not an integer")
                return x.numerator
            return int(x)
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ValueError(f"{x} has no image in F_{self.p}")
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def normalize(self, x):
        if self.kind == "F":
            return x % self.p
        return x

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero in ring")
        if self.kind == "Q":
            return Fraction(a) / b
        if self.kind == "F":
            return a * pow(b, -1, self.p) % self.p
        q, r = divmod(a, b)
        if r:
            raise ValueError(f"{a} is not divisible by {b} in Z")
        return q

    def __str__(self):
        return f"F{self.p}" if self.kind == "F" else self.kind

    def __repr__(self):
        return f"CoefficientRing({self})"


QQ = CoefficientRing("Q")
ZZ = CoefficientRing("Z")


def GF(p: int) -> CoefficientRing:
    return CoefficientRing("F", p)


def parse_ring(text: str) -> CoefficientRing:
    """Parse ``Q``, ``Z``, ``F2``, ``F 3`` or ``GF5``."""
    t = text.strip().replace(" ", "").upper()
    if t in ("Q", "QQ"):
        return QQ
    if t in ("Z", "ZZ"):
        return ZZ
    for prefix in ("GF", "F"):
        if t.startswith(prefix) and t[len(prefix):].isdigit():
            return GF(int(t[len(prefix):]))
    raise ValueError(f"cannot parse ring {text!r}")


# ---------------------------------------------------------------------------
# matrices

@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with entries normalized into ``ring``."""

    ring: CoefficientRing
    rows: int
    cols: int
    data: tuple[tuple, ...] = field(repr=False)

    @classmethod
    def from_rows(cls, ring, rows: Sequence[Sequence], cols: int | None = None):
        rows = [tuple(ring(x) for x in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(ring, len(rows), cols, tuple(rows))

    @classmethod
    def from_columns(cls, ring, columns: Sequence[Sequence], rows: int):
        columns = [tuple(c) for c in columns]
        if any(len(c) != rows for c in columns):
            raise ValueError("column length mismatch")
        data = tuple(tuple(ring(c[i]) for c in columns) for i in range(rows))
        return cls(ring, rows, len(columns), data)

    @classmethod
    def zeros(cls, ring, rows, cols):
        z = ring.zero
        return cls(ring, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, ring, n):
        z, o = ring.zero, ring.one
        return cls(ring, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, ring, entries, rows=None, cols=None):
        entries = list(entries)
        rows = len(entries) if rows is None else rows
        cols = len(entries) if cols is None else cols
        z = ring.zero
        data = [[z] * cols for _ in range(rows)]
        for i, e in enumerate(entries):
            data[i][i] = ring(e)
        return cls(ring, rows, cols, tuple(tuple(r) for r in data))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def to_lists(self):
        return [list(r) for r in self.data]

    def column(self, j) -> tuple:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    def row(self, i) -> tuple:
        return self.data[i]

    def diagonal(self) -> tuple:
        return tuple(self.data[i][i] for i in range(min(self.rows, self.cols)))

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows,
                      tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def _check_ring(self, other):
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._check_ring(other)
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            norm, zero = self.ring.normalize, self.ring.zero
            od = other.data
            rows = []
            for r in self.data:
                nz = [(k, a) for k, a in enumerate(r) if a]
                rows.append(tuple(
                    norm(sum((a * od[k][j] for k, a in nz if od[k][j]), zero)) for j in range(other.cols)))
            return Matrix(self.ring, self.rows, other.cols, tuple(rows))
        return self.apply(other)

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.shape} matrix")
        norm = self.ring.normalize
        return tuple(norm(sum((a * b for a, b in zip(r, vec) if a and b), self.ring.zero))
                     for r in self.data)

    def _zip(self, other, op):
        self._check_ring(other)
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        norm = self.ring.normalize
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(norm(op(a, b)) for a, b in zip(r, s))
                            for r, s in zip(self.data, other.data)))

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = self.ring(c)
        norm = self.ring.normalize
        return Matrix(self.ring, self.rows, self.cols,
                      tuple(tuple(norm(c * x) for x in r) for r in self.data))

    def hstack(self, *others):
        out = self
        for o in others:
            out._check_ring(o)
            if o.rows != out.rows:
                raise ValueError("hstack row mismatch")
            out = Matrix(out.ring, out.rows, out.cols + o.cols,
                         tuple(a + b for a, b in zip(out.data, o.data)))
        return out

    def vstack(self, *others):
        out = self
        for o in others:
            out._check_ring(o)
            if o.cols != out.cols:
                raise ValueError("vstack column mismatch")
            out = Matrix(out.ring, out.rows + o.rows, out.cols, out.data + o.data)
        return out

    @staticmethod
    def block_diag(ring, blocks: Sequence["Matrix"]):
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        data = [[ring.zero] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    data[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return Matrix(ring, rows, cols, tuple(tuple(r) for r in data))

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]):
        rows, cols = list(rows), list(cols)
        return Matrix(self.ring, len(rows), len(cols),
                      tuple(tuple(self.data[i][j] for j in cols) for i in rows))

    def det(self):
        """Determinant by fraction-free elimination (Bareiss)."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return self.ring.one
        if self.ring.kind == "F":
            red = reduce_echelon(self)
            if red.rank < n:
                return 0
            d = red.det_factor
            return self.ring.normalize(d)
        a = [list(map(Fraction if self.ring.kind == "Q" else int, r)) for r in self.data]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return self.ring.zero
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                    a[i][j] = num / prev if self.ring.kind == "Q" else num // prev
            prev = a[k][k]
        return self.ring(sign * a[n - 1][n - 1])

    def __str__(self):
        return "\n".join("[" + " ".join(str(x) for x in r) + "]" for r in self.data) or "[]"


# ---------------------------------------------------------------------------
# row reduction over a field

@dataclass(frozen=True)
class _Echelon:
    rref: Matrix
    pivots: tuple[int, ...]
    det_factor: object

    @property
    def rank(self):
        return len(self.pivots)


def reduce_echelon(M: Matrix) -> _Echelon:
    ring = M.ring
    if not ring.is_field:
        raise ValueError("row reduction needs a field; use smith_normal_form over Z")
    a = M.to_lists()
    norm = ring.normalize
    pivots = []
    det = ring.one
    r = 0
    for c in range(M.cols):
        piv = next((i for i in range(r, M.rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            det = -det
        inv = ring.div(ring.one, a[r][c])
        det = norm(det * a[r][c])
        a[r] = [norm(x * inv) if x else x for x in a[r]]
        for i in range(M.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [norm(x - f * y) if y else x for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == M.rows:
            break
    rref = Matrix(ring, M.rows, M.cols, tuple(tuple(row) for row in a))
    return _Echelon(rref, tuple(pivots), det)


@dataclass(frozen=True)
class ReduceResult:
    rank: int
    kernel_basis: Matrix
    image_basis: Matrix
    pivots: tuple[int, ...]


def reduce(M: Matrix) -> ReduceResult:
    """Rank, a kernel basis (columns) and an image basis (pivot columns of M)."""
    ech = reduce_echelon(M)
    ring = M.ring
    free = [j for j in range(M.cols) if j not in ech.pivots]
    kernel = []
    for f in free:
        v = [ring.zero] * M.cols
        v[f] = ring.one
        for row, pc in enumerate(ech.pivots):
            v[pc] = ring.normalize(-ech.rref[row, f])
        kernel.append(v)
    K = Matrix.from_columns(ring, kernel, M.cols)
    image = Matrix.from_columns(ring, [M.column(j) for j in ech.pivots], M.rows)
    return ReduceResult(ech.rank, K, image, ech.pivots)


def _left_inverse(A: Matrix) -> Matrix:
    """P with P @ A = I for a full column rank matrix over a field."""
    n = A.rows
    aug = A.hstack(Matrix.identity(A.ring, n))
    ech = reduce_echelon(aug)
    if ech.pivots[:A.cols] != tuple(range(A.cols)):
        raise ValueError("matrix does not have full column rank")
    return ech.rref.submatrix(range(A.cols), range(A.cols, A.cols + n))


# ---------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with U, V unimodular and D in Smith form."""

    U: Matrix
    D: Matrix
    V: Matrix
    Uinv: Matrix
    Vinv: Matrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.D.diagonal() if d != 0)

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.D.diagonal() if d != 0)


def _min_pivot(a, t, m, n):
    best = None
    for j in range(t, n):
        for i in range(t, m):
            x = a[i][j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(M: Matrix) -> SmithForm:
    """Smith normal form by elementary operations.

    Pivot is the nonzero entry of least absolute value, first in column-major
    order (leftmost column, then topmost row), which makes U and V
    reproducible.
    """
    if M.ring != ZZ:
        raise ValueError("smith_normal_form works over Z only")
    m, n = M.rows, M.cols
    a = M.to_lists()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    # row op: row_i += q * row_k  (U left-multiplied; Uinv gets col_k -= q col_i)
    def add_row(i, k, q):
        a[i] = [x + q * y for x, y in zip(a[i], a[k])]
        U[i] = [x + q * y for x, y in zip(U[i], U[k])]
        for r in Ui:
            r[k] -= q * r[i]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]
        for r in Ui:
            r[i], r[k] = r[k], r[i]

    def neg_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    # col op: col_j += q * col_k  (V right-multiplied; Vinv gets row_k -= q row_j)
    def add_col(j, k, q):
        for r in a:
            r[j] += q * r[k]
        for r in V:
            r[j] += q * r[k]
        Vi[k] = [x - q * y for x, y in zip(Vi[k], Vi[j])]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    for t in range(min(m, n)):
        best = _min_pivot(a, t, m, n)
        if best is None:
            break
        while True:
            _, pi, pj = best
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            leftover = any(a[i][t] for i in range(t + 1, m)) or any(a[t][j] for j in range(t + 1, n))
            if not leftover:
                bad = next(((i, j) for j in range(t + 1, n) for i in range(t + 1, m)
                            if a[i][j] % p), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
            best = _min_pivot(a, t, m, n)
        if a[t][t] < 0:
            neg_row(t)

    mk = lambda rows, r, c: Matrix(ZZ, r, c, tuple(tuple(x) for x in rows))
    return SmithForm(mk(U, m, m), mk(a, m, n), mk(V, n, n), mk(Ui, m, m), mk(Vi, n, n))


# ---------------------------------------------------------------------------
# solving, kernels, lattices

def solve(M: Matrix, target: Sequence):
    """A solution of ``M x = target`` over the ring, or ``None``."""
    if len(target) != M.rows:
        raise ValueError(f"target of length {len(target)} for {M.shape} matrix")
    ring = M.ring
    target = tuple(ring(x) for x in target)
    if ring.is_field:
        aug = M.hstack(Matrix.from_columns(ring, [target], M.rows))
        ech = reduce_echelon(aug)
        if M.cols in ech.pivots:
            return None
        x = [ring.zero] * M.cols
        for row, pc in enumerate(ech.pivots):
            x[pc] = ech.rref[row, M.cols]
        return tuple(x)
    snf = smith_normal_form(M)
    ut = snf.U.apply(target)
    d = snf.D.diagonal()
    y = [0] * M.cols
    for i, ui in enumerate(ut):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if ui != 0:
                return None
        else:
            q, r = divmod(ui, di)
            if r:
                return None
            y[i] = q
    return snf.V.apply(y)


def kernel_basis(M: Matrix) -> Matrix:
    """Columns forming a basis of ``{x : M x = 0}`` (a lattice basis over Z)."""
    if M.ring.is_field:
        return reduce(M).kernel_basis
    snf = smith_normal_form(M)
    r = snf.rank
    return snf.V.submatrix(range(M.cols), range(r, M.cols))


def lattice_basis(G: Matrix) -> Matrix:
    """Independent columns spanning the same submodule as the columns of G."""
    if G.ring.is_field:
        return reduce(G).image_basis
    snf = smith_normal_form(G)
    cols = [tuple(d * x for x in snf.Uinv.column(i)) for i, d in enumerate(snf.D.diagonal()) if d]
    return Matrix.from_columns(ZZ, cols, G.rows)


def span_contains(G: Matrix, v: Sequence) -> bool:
    return solve(G, v) is not None


# ---------------------------------------------------------------------------
# modules

@dataclass(frozen=True)
class PresentedModule:
    """``ring^generators / span(relation columns)``.

    The normal form is computed lazily: over a field a dimension, over Z a
    free rank plus invariant factors (units dropped).
    """

    ring: CoefficientRing
    generators: tuple[str, ...]
    relations: Matrix

    def __post_init__(self):
        if self.relations.rows != len(self.generators):
            raise ValueError("relation rows must be indexed by generators")
        if self.relations.ring != self.ring:
            raise ValueError("relation matrix over the wrong ring")

    @classmethod
    def free(cls, ring, generators):
        generators = tuple(generators)
        return cls(ring, generators, Matrix.zeros(ring, len(generators), 0))

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def _normal(self):
        cached = self.__dict__.get("_nf")
        if cached is None:
            if self.ring.is_field:
                r = reduce(self.relations).rank if self.relations.cols else 0
                cached = (self.ngens - r, ())
            else:
                snf = smith_normal_form(self.relations)
                facs = snf.invariant_factors
                cached = (self.ngens - len(facs), tuple(d for d in facs if d != 1))
            object.__setattr__(self, "_nf", cached)
        return cached

    @property
    def dimension(self) -> int:
        if not self.ring.is_field:
            raise ValueError("dimension is only defined over a field; use free_rank")
        return self._normal()[0]

    @property
    def free_rank(self) -> int:
        return self._normal()[0]

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self._normal()[1]

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def is_isomorphic(self, other: "PresentedModule") -> bool:
        return (self.ring == other.ring and self.free_rank == other.free_rank
                and self.invariant_factors == other.invariant_factors)

    def contains_relation(self, v: Sequence) -> bool:
        """True if the generator-coordinate vector ``v`` is zero in the module."""
        if all(x == 0 for x in v):
            return True
        return self.relations.cols > 0 and span_contains(self.relations, v)

    def reduce_coordinates(self, v: Sequence) -> tuple:
        """Canonical representative when relations are diagonal torsion."""
        v = [self.ring(x) for x in v]
        if self.ring.is_field or self.relations.cols == 0:
            return tuple(v)
        for j in range(self.relations.cols):
            col = self.relations.column(j)
            nz = [i for i, x in enumerate(col) if x]
            if len(nz) == 1:
                i = nz[0]
                v[i] %= abs(col[i])
        return tuple(v)

    def describe(self) -> str:
        if self.ring.is_field:
            return f"{self.ring}^{self.dimension}"
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts) or "0"

    def identity(self) -> "ModuleMap":
        return ModuleMap(self, self, Matrix.identity(self.ring, self.ngens))

    def zero_map(self, target: "PresentedModule") -> "ModuleMap":
        return ModuleMap(self, target, Matrix.zeros(self.ring, target.ngens, self.ngens))


def present_quotient(generators, relations: Matrix) -> PresentedModule:
    return PresentedModule(relations.ring, tuple(generators), relations)


class NotWellDefined(ValueError):
    """A generator matrix that does not respect the source relations."""

    def __init__(self, relation_index: int):
        super().__init__(f"source relation {relation_index} does not map into the target relations")
        self.relation_index = relation_index


@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: PresentedModule
    target: PresentedModule
    matrix: Matrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.ngens, self.source.ngens):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match "
                             f"{self.target.ngens}x{self.source.ngens}")
        bad = self.first_bad_relation()
        if bad is not None:
            raise NotWellDefined(bad)

    def first_bad_relation(self):
        for j in range(self.source.relations.cols):
            img = self.matrix.apply(self.source.relations.column(j))
            if not self.target.contains_relation(img):
                return j
        return None

    @property
    def ring(self):
        return self.matrix.ring

    def __call__(self, v):
        return self.target.reduce_coordinates(self.matrix.apply(v))

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """Composition ``self ∘ other``."""
        if other.target.ngens != self.source.ngens or other.target.ring != self.source.ring:
            raise ValueError("maps are not composable")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other):
        return ModuleMap(self.source, self.target, self.matrix + other.matrix)

    def __neg__(self):
        return ModuleMap(self.source, self.target, -self.matrix)

    def equals(self, other: "ModuleMap") -> bool:
        """Equality as homomorphisms (matrices may differ by target relations)."""
        if self.matrix.shape != other.matrix.shape:
            return False
        diff = self.matrix - other.matrix
        return all(self.target.contains_relation(c) for c in diff.columns())

    def is_zero(self) -> bool:
        return all(self.target.contains_relation(c) for c in self.matrix.columns())

    def image(self) -> "Submodule":
        return Submodule(self.target, self.matrix)

    def cokernel(self) -> PresentedModule:
        return present_quotient(self.target.generators, self.matrix.hstack(self.target.relations))

    def kernel_lattice(self) -> Matrix:
        """Columns in source coordinates spanning the preimage of the target relations."""
        m = self.source.ngens
        big = self.matrix.hstack(self.target.relations)
        K = kernel_basis(big)
        top = K.submatrix(range(m), range(K.cols))
        return lattice_basis(top) if top.cols else top

    def kernel(self) -> PresentedModule:
        L = self.kernel_lattice()
        rels = []
        for c in self.source.relations.columns():
            x = solve(L, c)
            if x is None:
                raise AssertionError("source relation outside kernel lattice")
            rels.append(x)
        return present_quotient([f"k{i}" for i in range(L.cols)],
                                Matrix.from_columns(self.ring, rels, L.cols))

    def kernel_quotient(self) -> PresentedModule:
        """source / ker, the image as an abstract module."""
        L = self.kernel_lattice()
        return present_quotient(self.source.generators, L.hstack(self.source.relations))

    def is_surjective(self) -> bool:
        return self.cokernel().is_zero()

    def is_injective(self) -> bool:
        L = self.kernel_lattice()
        return all(self.source.contains_relation(c) for c in L.columns())

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "ModuleMap":
        """Inverse of an isomorphism; ``ValueError`` otherwise."""
        if not self.is_isomorphism():
            raise ValueError("map is not an isomorphism")
        n, m = self.source.ngens, self.target.ngens
        big = self.matrix.hstack(self.target.relations)
        cols = []
        for j in range(m):
            x = solve(big, tuple(int(i == j) for i in range(m)))
            cols.append(x[:n])
        return ModuleMap(self.target, self.source, Matrix.from_columns(self.ring, cols, n))

    def rank(self) -> int:
        """Dimension of the image (fields) or free rank of the image (Z)."""
        if self.ring.is_field:
            return self.image().dimension
        return self.image().free_rank


def induced_map(source: PresentedModule, target: PresentedModule, generator_matrix: Matrix) -> ModuleMap:
    """Build a ModuleMap; raises NotWellDefined with the offending relation index."""
    return ModuleMap(source, target, generator_matrix)


@dataclass(frozen=True, eq=False)
class Submodule:
    """The submodule of ``ambient`` generated by the columns of ``generators``."""

    ambient: PresentedModule
    generators: Matrix

    def _lifted(self) -> Matrix:
        return self.generators.hstack(self.ambient.relations)

    def contains(self, v) -> bool:
        if all(x == 0 for x in v):
            return True
        L = self._lifted()
        return L.cols > 0 and span_contains(L, v)

    def __le__(self, other: "Submodule") -> bool:
        return all(other.contains(c) for c in self.generators.columns())

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return self <= other and other <= self

    def __hash__(self):
        return id(self)

    def as_module(self) -> PresentedModule:
        f = ModuleMap(PresentedModule.free(self.ambient.ring,
                                           [f"s{i}" for i in range(self.generators.cols)]),
                      self.ambient, self.generators)
        return f.kernel_quotient()

    @property
    def dimension(self) -> int:
        R = self.ambient.relations
        r_all = reduce(self._lifted()).rank if self._lifted().cols else 0
        r_rel = reduce(R).rank if R.cols else 0
        return r_all - r_rel

    @property
    def free_rank(self) -> int:
        return self.as_module().free_rank

    def elementary_divisors(self) -> tuple:
        """Nonzero Smith diagonal of the lifted lattice (generators plus ambient relations)."""
        L = self._lifted()
        if self.ambient.ring.is_field:
            return (1,) * (reduce(L).rank if L.cols else 0)
        if L.cols == 0:
            return ()
        return smith_normal_form(L).invariant_factors

    def is_zero(self) -> bool:
        return all(self.ambient.contains_relation(c) for c in self.generators.columns())

