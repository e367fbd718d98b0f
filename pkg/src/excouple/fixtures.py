"""Named fixtures: small towers and pairings with known answers.

Generator levels follow the filtration: ``F^q`` is spanned by generators of
level at least ``q``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .abgroup import PresentedGroup, kernel_basis
from .couple import Bidegree
from .pairing import PagePairing, TowerPairing
from .signcalc import convention_sign
from .tower import AugmentedTowerData, FilteredComplex, from_filtered_complex


def trivial_filtration(ranks, boundaries, level: int = 0) -> FilteredComplex:
    """Every generator at one level: a single jump in the filtration."""
    return FilteredComplex(ranks, boundaries, {n: [level] * r for n, r in ranks.items()})


def point() -> FilteredComplex:
    return FilteredComplex({0: 1}, {}, {0: [0]})


def circle_two_step() -> FilteredComplex:
    """Cellular ``S^1``: the 0-cell in ``F^1``, the 1-cell entering at ``F^0``."""
    return FilteredComplex({0: 1, 1: 1}, {1: [[0]]}, {0: [1], 1: [0]})


def skeletal(cells: dict[int, int], boundaries=None) -> FilteredComplex:
    """Cellular complex filtered by skeleta: an ``n``-cell sits at level ``-n``."""
    return FilteredComplex(cells, boundaries or {}, {n: [-n] * r for n, r in cells.items()})


def sphere2() -> FilteredComplex:
    """``S^2`` with one 0-cell and one 2-cell, skeletal filtration."""
    return skeletal({0: 1, 2: 1})


def circle_skeletal() -> FilteredComplex:
    return skeletal({0: 1, 1: 1})


def three_layer_d2() -> FilteredComplex:
    """``b`` (degree 2, level 0) bounds ``a`` (degree 1, level 2); ``c`` (degree 1, level 1) is idle.

    ``d_1`` vanishes and ``d_2`` sends ``[b]`` to ``[a]``.
    """
    return FilteredComplex({1: 2, 2: 1}, {2: [[1], [0]]}, {1: [2, 1], 2: [0]})


# ---------------------------------------------------------------------------
# the counterexample towers


def disk_tower(n: int) -> FilteredComplex:
    """``S^{n-1}`` at level 1 inside ``D^n`` at level 0: cells ``a`` (degree n-1), ``b`` (degree n), ``d b = a``."""
    return FilteredComplex({n - 1: 1, n: 1}, {n: [[1]]}, {n - 1: [1], n: [0]})


def disk_tower_target(n: int) -> FilteredComplex:
    """``S^{n-2}`` at level 2 inside ``D^{n-1}`` entering at level 1; nothing at level 0."""
    return FilteredComplex({n - 2: 1, n - 1: 1}, {n - 1: [[1]]}, {n - 2: [2], n - 1: [1]})


def disk_tower_data(n: int) -> AugmentedTowerData:
    """The tower ``D^n <- S^{n-1} <- *`` entered directly as ``E_1`` and ``D_1`` data."""
    Z = PresentedGroup.free(1)
    return AugmentedTowerData(
        D={(n - 1, 1): Z},
        E={(n, 0): Z, (n - 1, 1): Z},
        j={(n - 1, 1): [[1]]},
        kappa={(n, 0): [[1]]},
    )


@dataclass(frozen=True, eq=False)
class Counterexample:
    k: int
    l: int
    pairing: PagePairing
    w: Bidegree
    x: Bidegree
    residual_spot: Bidegree


def counterexample(k: int, l: int) -> Counterexample:
    """Page-level pairing of the ``D^k`` and ``D^l`` towers into the ``D^{k+l-1}`` tower.

    Given at ``E_1`` without a chain-level witness.  ``wx = 0`` because
    ``E_1^{k+l,0}(Y) = 0``; ``(dw)x = e``; ``w(dx) = (-1)^{k+l} e`` from moving
    ``k+l-2`` suspension coordinates past each other; ``(dw)(dx) = (-1)^{k-1} f``
    from the cone sign of ``dw``.  Here ``e``, ``f`` generate
    ``E_1^{k+l-1,1}(Y)`` and ``E_1^{k+l-2,2}(Y)``.
    """
    if k < 2 or l < 2:
        raise ValueError("need k, l >= 2")
    W, X = from_filtered_complex(disk_tower(k)), from_filtered_complex(disk_tower(l))
    Y = from_filtered_complex(disk_tower_target(k + l))
    s_w_dx = convention_sign("left-suspension") ** (k + l - 2)
    s_dw_dx = convention_sign("kappa-cone", k)
    w, dw = Bidegree(k, 0), Bidegree(k - 1, 1)
    x, dx = Bidegree(l, 0), Bidegree(l - 1, 1)
    tensors = {
        (dw, x): (((1,),),),
        (w, dx): (((s_w_dx,),),),
        (dw, dx): (((s_dw_dx,),),),
    }
    return Counterexample(k, l, PagePairing(1, W, X, Y, tensors), w, x, Bidegree(k + l - 1, 1))


# ---------------------------------------------------------------------------
# chain-level pairings


def dga_cube() -> TowerPairing:
    """``Z[x]/(x^3) (x) Lambda(y)``, ``|x| = 2``, ``|y| = 5``, ``d y = x^2``, weights ``w(x) = 1``, ``w(y) = 0``.

    Products are commutative (``x`` is even) with ``y^2 = 0``; ``d_2(y) = x^2``.
    """
    basis = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]  # x^a y^e
    deg = {m: 2 * m[0] + 5 * m[1] for m in basis}
    by_deg: dict[int, list[tuple[int, int]]] = {}
    for m in basis:
        by_deg.setdefault(deg[m], []).append(m)
    ranks = {n: len(v) for n, v in by_deg.items()}
    index = {m: (deg[m], by_deg[deg[m]].index(m)) for m in basis}
    levels = {n: [m[0] for m in v] for n, v in by_deg.items()}
    bnd = {}
    for n, v in by_deg.items():
        if n - 1 not in by_deg:
            continue
        M = [[0] * len(v) for _ in by_deg[n - 1]]
        for g, m in enumerate(v):
            if m[1] == 1 and m[0] + 2 <= 2:
                M[by_deg[n - 1].index((m[0] + 2, 0))][g] = 1
        bnd[n] = M
    C = FilteredComplex(ranks, bnd, levels)
    mu = {}
    for a in basis:
        for b in basis:
            c = (a[0] + b[0], a[1] + b[1])
            if c[0] > 2 or c[1] > 1:
                continue
            v = [0] * ranks[deg[c]]
            v[index[c][1]] = 1
            mu[(index[a], index[b])] = v
    return TowerPairing(C, C, C, mu)


def dga_torsion() -> TowerPairing:
    """``{1, u, v}`` with ``|u| = 2`` (level 1), ``|v| = 3`` (level 0), ``d v = 2u``; only the unit multiplies.

    ``E_2 = E_inf`` has ``Z/2`` at ``(2, 1)``.
    """
    C = FilteredComplex({0: 1, 2: 1, 3: 1}, {3: [[2]]}, {0: [0], 2: [1], 3: [0]})
    mu = {((0, 0), (0, 0)): [1], ((0, 0), (2, 0)): [1], ((0, 0), (3, 0)): [1],
          ((2, 0), (0, 0)): [1], ((3, 0), (0, 0)): [1]}
    return TowerPairing(C, C, C, mu)


def torus() -> TowerPairing:
    """Cross product ``S^1 x S^1 -> T`` on cellular chains with skeletal filtrations."""
    S = circle_skeletal()
    # T: degree 0: e0e0; degree 1: e1e0, e0e1; degree 2: e1e1
    T = skeletal({0: 1, 1: 2, 2: 1})
    mu = {((0, 0), (0, 0)): [1], ((1, 0), (0, 0)): [1, 0], ((0, 0), (1, 0)): [0, 1], ((1, 0), (1, 0)): [1]}
    return TowerPairing(S, S, T, mu)


def sphere_unit() -> TowerPairing:
    """The unit pairing ``point x S^2 -> S^2``."""
    S = sphere2()
    return TowerPairing(point(), S, S, {((0, 0), (0, 0)): [1], ((0, 0), (2, 0)): [1]})


# ---------------------------------------------------------------------------
# random corpus


def random_filtered_complex(rng: random.Random, max_degree: int = 4, max_width: int = 4,
                            max_rank: int = 3, entry_bound: int = 3) -> FilteredComplex:
    """A random bounded filtered complex with ``d d = 0`` and ``d(F^q) ⊆ F^q``.

    Each boundary column is an integer combination of a kernel basis of the
    previous boundary, restricted to generators of level at least the
    column's own level plus a random gap.
    """
    degrees = range(0, rng.randint(1, max_degree + 1))
    width = rng.randint(1, max_width)
    ranks = {n: rng.randint(0, max_rank) for n in degrees}
    levels = {n: sorted(rng.randrange(width) for _ in range(r)) for n, r in ranks.items()}
    bnd = {}
    for n in degrees:
        if n - 1 not in ranks or ranks[n - 1] == 0 or ranks[n] == 0:
            continue
        prev = bnd.get(n - 1)
        rows = ranks[n - 1]
        cols = []
        for g in range(ranks[n]):
            # a random gap between a generator and its boundary feeds higher pages
            lvl = levels[n][g] + rng.randrange(width)
            allowed = [h for h in range(rows) if levels[n - 1][h] >= lvl]
            col = [0] * rows
            if allowed and rng.random() < 0.8:
                if prev is None:
                    for h in allowed:
                        col[h] = rng.randint(-entry_bound, entry_bound)
                else:
                    sub = [[prev[a][h] for h in allowed] for a in range(len(prev))]
                    K = kernel_basis(sub, len(allowed))
                    for vec in K:
                        c = rng.randint(-1, 1)
                        for h, x in zip(allowed, vec):
                            col[h] += c * x
                    if any(abs(x) > entry_bound for x in col):
                        col = [0] * rows
            cols.append(col)
        bnd[n] = [[cols[g][h] for g in range(ranks[n])] for h in range(rows)]
    return FilteredComplex(ranks, bnd, levels)


def random_corpus(n: int, seed: int = 0, **kw) -> list[FilteredComplex]:
    rng = random.Random(seed)
    return [random_filtered_complex(rng, **kw) for _ in range(n)]
