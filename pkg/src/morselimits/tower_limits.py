"""One-parameter towers of modules over a finite grid, their grid limits,
eventual images, Mittag-Leffler certificates and lim^1.

Towers are stored uniformly: ``transitions[j]`` maps the module at grid
index ``j`` to the module at index ``j + 1``.  For an inverse tower (fixed b,
varying a) these are the projections pi_{a_{j+1}, a_j}; for a direct tower
(fixed a, varying b) they are the inclusions iota^{b_{j+1}, b_j}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_linalg import Matrix, ModuleMap, PresentedModule
from .floer_triple import FloerTriple, to_fraction
from .window_complex import (
    build_complex, homology, chain_projection, chain_inclusion, induced_hom_map,
)

__all__ = [
    "Tower", "build_tower", "GridLimit", "grid_inverse_limit", "grid_direct_limit",
    "direct_limit_quotient", "ImageChain", "StabilizationReport", "eventual_images",
    "MLCertificate", "mittag_leffler", "Lim1Result", "lim1", "lim1_preimage",
    "INVERSE", "DIRECT", "DEFAULT_WINDOW",
]

INVERSE = "inverse"   # toward -infinity
DIRECT = "direct"     # toward +infinity
DEFAULT_WINDOW = 3

SURJECTIVE = "surjective_criterion"
FINITE_DIM = "finite_dim_criterion"
EMPIRICAL = "empirical_at_depth"
INDETERMINATE = "indeterminate"


class Tower:
    def __init__(self, index_grid, modules, transitions, direction, groups=None, label=None):
        grid = tuple(to_fraction(x) for x in index_grid)
        if any(x >= y for x, y in zip(grid, grid[1:])):
            raise ValueError("tower grid must be strictly increasing")
        if direction not in (INVERSE, DIRECT):
            raise ValueError(f"unknown direction {direction!r}")
        if len(modules) != len(grid) or len(transitions) != max(len(grid) - 1, 0):
            raise ValueError("tower needs one module per index and one map per adjacent pair")
        for j, t in enumerate(transitions):
            if t.source.ngens != modules[j].ngens or t.target.ngens != modules[j + 1].ngens:
                raise ValueError(f"transition {j} does not match its modules")
        self.index_grid = grid
        self.modules = tuple(modules)
        self.transitions = tuple(transitions)
        self.direction = direction
        self.groups = tuple(groups) if groups is not None else None
        self.label = label
        self._maps = {}

    @property
    def ring(self):
        return self.modules[0].ring

    def __len__(self):
        return len(self.index_grid)

    def position(self, index) -> int:
        return self.index_grid.index(to_fraction(index))

    def map(self, i: int, j: int) -> ModuleMap:
        """Composite transition from position ``i`` to position ``j >= i``."""
        if j < i:
            raise ValueError("maps only go up the grid")
        if i == j:
            return self.modules[i].identity()
        if (i, j) not in self._maps:
            self._maps[(i, j)] = self.transitions[j - 1] @ self.map(i, j - 1)
        return self._maps[(i, j)]

    def check_composition(self) -> bool:
        n = len(self)
        for i in range(n):
            for k in range(i, n):
                for j in range(i, k + 1):
                    if not (self.map(j, k) @ self.map(i, j)).equals(self.map(i, k)):
                        return False
        return True

    def __repr__(self):
        return f"Tower({self.direction}, {self.label}, grid={[str(x) for x in self.index_grid]})"


def build_tower(triple: FloerTriple, fixed, grid: Sequence, direction: str = INVERSE,
                level: str = "homology") -> Tower:
    """Inverse tower: fixed b, windows [a, b] for a in grid.
    Direct tower: fixed a, windows [a, b] for b in grid."""
    if level not in ("homology", "chain"):
        raise ValueError(f"unknown level {level!r}")
    fixed = to_fraction(fixed)
    grid = sorted({to_fraction(x) for x in grid})
    if not grid:
        raise ValueError("empty grid")
    if direction == INVERSE and grid[-1] > fixed:
        raise ValueError(f"a-grid reaches {grid[-1]} above b = {fixed}")
    if direction == DIRECT and grid[0] < fixed:
        raise ValueError(f"b-grid reaches {grid[0]} below a = {fixed}")

    if direction == INVERSE:
        cxs = [build_complex(triple, a, fixed) for a in grid]
        chain_maps = [chain_projection(triple, grid[j], grid[j + 1], fixed, cxs[j], cxs[j + 1])
                      for j in range(len(grid) - 1)]
        label = f"b={fixed}"
    elif direction == DIRECT:
        cxs = [build_complex(triple, fixed, b) for b in grid]
        chain_maps = [chain_inclusion(triple, fixed, grid[j], grid[j + 1], cxs[j], cxs[j + 1])
                      for j in range(len(grid) - 1)]
        label = f"a={fixed}"
    else:
        raise ValueError(f"unknown direction {direction!r}")

    if level == "chain":
        modules = [cx.as_module() for cx in cxs]
        maps = [cm.as_module_map() for cm in chain_maps]
        return Tower(grid, modules, maps, direction, label=label)
    groups = [homology(cx) for cx in cxs]
    maps = [induced_hom_map(cm, groups[j], groups[j + 1]) for j, cm in enumerate(chain_maps)]
    return Tower(grid, [g.module for g in groups], maps, direction, groups=groups, label=label)


# ---------------------------------------------------------------------------
# grid limits

@dataclass
class GridLimit:
    """Limit of the finite grid truncation.  ``maps[j]`` is pi_a (limit -> G_a)
    for inverse towers and iota^b (G^b -> limit) for direct towers."""

    module: PresentedModule
    maps: tuple
    direction: str
    index_grid: tuple
    label: str = "grid"
    certificate: object = None
    oracle_checked: bool = False


def grid_inverse_limit(tower: Tower) -> GridLimit:
    if tower.direction != INVERSE:
        raise ValueError("grid_inverse_limit needs an inverse tower")
    maps = tuple(tower.map(0, j) for j in range(len(tower)))
    for j in range(len(tower)):
        for k in range(j, len(tower)):
            if not (tower.map(j, k) @ maps[j]).equals(maps[k]):
                raise AssertionError("inverse limit projections are not compatible")
    return GridLimit(tower.modules[0], maps, INVERSE, tower.index_grid)


def grid_direct_limit(tower: Tower, oracle=None) -> GridLimit:
    """Colimit of the grid; with ``oracle`` (default: small towers) the explicit
    quotient of the direct sum is built and compared."""
    if tower.direction != DIRECT:
        raise ValueError("grid_direct_limit needs a direct tower")
    last = len(tower) - 1
    maps = tuple(tower.map(j, last) for j in range(len(tower)))
    for j in range(len(tower)):
        for k in range(j, len(tower)):
            if not (maps[k] @ tower.map(j, k)).equals(maps[j]):
                raise AssertionError("direct limit injections are not compatible")
    if oracle is None:
        oracle = len(tower) <= 5 and sum(m.ngens for m in tower.modules) <= 24
    if oracle and not direct_limit_quotient(tower).is_isomorphic(tower.modules[last]):
        raise AssertionError("explicit quotient disagrees with the last module")
    return GridLimit(tower.modules[last], maps, DIRECT, tower.index_grid, oracle_checked=bool(oracle))


def direct_limit_quotient(tower: Tower) -> PresentedModule:
    """(sum of all G^b) / S, S generated by lambda^{b2} iota^{b2,b1}(x) - lambda^{b1}(x)."""
    ring = tower.ring
    offsets, total = [], 0
    for m in tower.modules:
        offsets.append(total)
        total += m.ngens
    gens = tuple(f"{j}.{g}" for j, m in enumerate(tower.modules) for g in m.generators)
    rels = [c for c in Matrix.block_diag(ring, [m.relations for m in tower.modules]).columns()]
    for j1 in range(len(tower)):
        for j2 in range(j1 + 1, len(tower)):
            M = tower.map(j1, j2).matrix
            for e in range(tower.modules[j1].ngens):
                v = [ring.zero] * total
                for i, x in enumerate(M.column(e)):
                    v[offsets[j2] + i] = x
                v[offsets[j1] + e] = ring.normalize(v[offsets[j1] + e] - ring.one)
                rels.append(tuple(v))
    return PresentedModule(ring, gens, Matrix.from_columns(ring, rels, total))


# ---------------------------------------------------------------------------
# eventual images

@dataclass
class ImageChain:
    """im pi_{a, a'} for a' running from a itself down to the bottom of the grid."""

    index: Fraction
    sources: tuple          # the a' values, deepest last
    images: tuple           # Submodule of G_a per a'
    stabilized: bool
    stable_from: Fraction | None

    def sizes(self):
        out = []
        for im in self.images:
            if im.ambient.ring.is_field:
                out.append(im.dimension)
            else:
                out.append((im.free_rank, im.elementary_divisors()))
        return out


@dataclass
class StabilizationReport:
    chains: tuple                     # one ImageChain per grid index, ascending
    window: int
    stabilized: bool                  # refers to the top (largest) index
    certificate: str

    def chain(self, index) -> ImageChain:
        index = to_fraction(index)
        for c in self.chains:
            if c.index == index:
                return c
        raise KeyError(index)

    @property
    def top(self) -> ImageChain:
        return self.chains[-1]

    @property
    def stable_image(self):
        return self.top.images[-1] if self.stabilized else None


def _image_chain(tower, i, window):
    sources, images = [], []
    for j in range(i, -1, -1):
        sources.append(tower.index_grid[j])
        images.append(tower.map(j, i).image())
    for k in range(1, len(images)):
        if not images[k] <= images[k - 1]:
            raise AssertionError("eventual images are not decreasing")
    stable_from, run = None, 1
    for k in range(len(images) - 1, 0, -1):
        if images[k] == images[k - 1]:
            run += 1
        else:
            break
    stabilized = run >= window
    if stabilized:
        stable_from = sources[len(images) - run]
    return ImageChain(tower.index_grid[i], tuple(sources), tuple(images), stabilized, stable_from)


def _certificate(tower, stabilized):
    if all(t.is_surjective() for t in tower.transitions):
        return SURJECTIVE
    if tower.ring.is_field:
        return FINITE_DIM
    if stabilized:
        return EMPIRICAL
    return INDETERMINATE


def eventual_images(tower: Tower, window: int = DEFAULT_WINDOW) -> StabilizationReport:
    """Images of deeper levels at every level; stabilized when the last
    ``window`` images in a chain coincide."""
    if tower.direction != INVERSE:
        raise ValueError("eventual images are taken on inverse towers")
    if window < 2:
        raise ValueError("stabilization window must be at least 2")
    chains = tuple(_image_chain(tower, i, window) for i in range(len(tower)))
    stabilized = chains[-1].stabilized
    return StabilizationReport(chains, window, stabilized, _certificate(tower, stabilized))


@dataclass
class MLCertificate:
    kind: str
    stable_from: Fraction | None
    report: StabilizationReport

    @property
    def holds(self) -> bool:
        return self.kind != INDETERMINATE


def mittag_leffler(tower: Tower, window: int = DEFAULT_WINDOW) -> MLCertificate:
    rep = eventual_images(tower, window)
    return MLCertificate(rep.certificate, rep.top.stable_from, rep)


# ---------------------------------------------------------------------------
# lim^1

@dataclass
class Lim1Result:
    module: PresentedModule       # coker Delta of the finite truncation
    delta: ModuleMap
    certificate: str              # always finite_truncation
    ml: MLCertificate
    order: tuple                  # positions in the cofinal sequence, top first

    @property
    def full_tower_vanishes(self) -> bool:
        return self.ml.holds


def _product(tower, order):
    ring = tower.ring
    gens = tuple(f"{tower.index_grid[p]}.{g}" for p in order for g in tower.modules[p].generators)
    rels = Matrix.block_diag(ring, [tower.modules[p].relations for p in order])
    return PresentedModule(ring, gens, rels)


def lim1(tower: Tower, window: int = DEFAULT_WINDOW) -> Lim1Result:
    """coker of Delta(x)_j = x_j - pi(x_{j+1}) along the grid read downwards.
    The deepest component has nothing below it, so it is x_K."""
    if tower.direction != INVERSE:
        raise ValueError("lim1 is taken on inverse towers")
    ring = tower.ring
    order = tuple(range(len(tower) - 1, -1, -1))
    prod = _product(tower, order)
    sizes = [tower.modules[p].ngens for p in order]
    offs = [sum(sizes[:k]) for k in range(len(sizes))]
    n = sum(sizes)
    data = [[ring.zero] * n for _ in range(n)]
    for k, p in enumerate(order):
        for i in range(sizes[k]):
            data[offs[k] + i][offs[k] + i] = ring.one
        if k + 1 < len(order):
            T = tower.transitions[p - 1].matrix   # G_{p-1} -> G_p
            for i in range(sizes[k]):
                for j in range(sizes[k + 1]):
                    data[offs[k] + i][offs[k + 1] + j] = ring.normalize(-T[i, j])
    delta = ModuleMap(prod, prod, Matrix(ring, n, n, tuple(tuple(r) for r in data)))
    coker = delta.cokernel()
    if not coker.is_zero():
        raise AssertionError("Delta is not surjective on a finite tower")
    return Lim1Result(coker, delta, "finite_truncation", mittag_leffler(tower, window), order)


def lim1_preimage(result: Lim1Result, tower: Tower, y: Sequence) -> tuple:
    """Back-substitution: x_K = y_K, x_j = y_j + pi(x_{j+1})."""
    ring = tower.ring
    order = result.order
    sizes = [tower.modules[p].ngens for p in order]
    offs = [sum(sizes[:k]) for k in range(len(sizes))]
    y = [ring(v) for v in y]
    x = [None] * len(order)
    for k in range(len(order) - 1, -1, -1):
        yk = y[offs[k]:offs[k] + sizes[k]]
        if k + 1 == len(order):
            x[k] = tuple(yk)
        else:
            up = tower.transitions[order[k] - 1](x[k + 1])
            x[k] = tuple(ring.normalize(a + b) for a, b in zip(yk, up))
    flat = tuple(v for part in x for v in part)
    if result.delta(flat) != tuple(y) and not result.delta.target.contains_relation(
            tuple(ring.normalize(a - b) for a, b in zip(result.delta(flat), y))):
        raise AssertionError("back-substitution failed")
    return flat
