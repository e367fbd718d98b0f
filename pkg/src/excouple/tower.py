"""Towers as algebraic input: filtered chain complexes and hand-entered couples.

A :class:`FilteredComplex` stands in for a tower of spaces.  Each generator
carries a filtration level and ``F^q`` is spanned by the generators of level
at least ``q``.  Homology takes the place of homotopy; short exact sequences
of windows ``W(a, b) = F^a / F^b`` supply the long exact sequences.

Two couples come out of a filtered complex:

* the *colim* couple of the tower ``... -> F^{q+1} -> F^q -> ...``, with
  ``D^{p,q} = H_p(F^q)`` and ``E^{p,q} = H_p(F^q/F^{q+1})``;
* the *lim* couple of the quotient tower ``C/F^{q+1} -> C/F^q``, with
  ``D^{p,q} = H_{p+1}(C/F^q)`` and ``E^{p,q} = H_p(F^q/F^{q+1})``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .abgroup import (
    GroupHom,
    PresentedGroup,
    Subquotient,
    kernel_basis,
    subquotient,
    transpose,
)
from .couple import Bidegree, ExactCouple, ExactnessError, validate

COLIM = "colim"
LIM = "lim"
CONVENTIONS = (COLIM, LIM)


class TowerError(Exception):
    pass


class NotSubcomplexError(TowerError):
    def __init__(self, degree: int, generator: int, image_generator: int):
        self.degree, self.generator, self.image_generator = degree, generator, image_generator
        super().__init__(
            f"filtration is not a subcomplex: boundary of generator {generator} in degree {degree} "
            f"involves generator {image_generator} of lower level"
        )


@dataclass(frozen=True, eq=False)
class FilteredComplex:
    """Bounded chain complex of free groups with a decreasing filtration.

    ``boundaries[n]`` is the matrix of ``d_n: C_n -> C_{n-1}`` with
    ``ranks[n-1]`` rows and ``ranks[n]`` columns; ``levels[n][g]`` is the
    filtration level of generator ``g`` in degree ``n``.
    """

    ranks: Mapping[int, int]
    boundaries: Mapping[int, Sequence[Sequence[int]]]
    levels: Mapping[int, Sequence[int]]
    names: Mapping[int, Sequence[str]] = field(default_factory=dict)

    def __post_init__(self):
        ranks = {int(n): int(r) for n, r in self.ranks.items() if int(r) > 0}
        levels = {n: tuple(int(x) for x in self.levels.get(n, ())) for n in ranks}
        bd = {}
        for n in ranks:
            M = self.boundaries.get(n)
            rows = ranks.get(n - 1, 0)
            if M is None or (rows == 0 and not any(M)):
                M = [[0] * ranks[n] for _ in range(rows)]
            M = tuple(tuple(int(a) for a in r) for r in M)
            if len(M) != rows or any(len(r) != ranks[n] for r in M):
                raise TowerError(f"boundary in degree {n} must be {rows}x{ranks[n]}")
            bd[n] = M
        for n, lv in levels.items():
            if len(lv) != ranks[n]:
                raise TowerError(f"degree {n} has {ranks[n]} generators but {len(lv)} levels")
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "boundaries", bd)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "_cache", {})
        self._check()

    def _check(self):
        for n in self.ranks:
            lower = self.ranks.get(n - 2, 0)
            if n - 1 in self.ranks and lower:
                A, B = self.boundaries[n - 1], self.boundaries[n]
                for a in range(lower):
                    for g in range(self.ranks[n]):
                        if sum(A[a][k] * B[k][g] for k in range(self.ranks[n - 1])):
                            raise TowerError(f"boundary squared is nonzero in degree {n}")
            for g in range(self.ranks[n]):
                for h, row in enumerate(self.boundaries[n]):
                    if row[g] and self.levels[n - 1][h] < self.levels[n][g]:
                        raise NotSubcomplexError(n, g, h)

    # -- shape -----------------------------------------------------------

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def degrees(self) -> range:
        if not self.ranks:
            return range(0)
        return range(min(self.ranks), max(self.ranks) + 1)

    def level_range(self) -> tuple[int, int] | None:
        """``(qmin, qmax)`` over all generators, or None for the zero complex."""
        lv = [x for v in self.levels.values() for x in v]
        return (min(lv), max(lv)) if lv else None

    def width(self) -> int:
        lr = self.level_range()
        return 0 if lr is None else lr[1] - lr[0] + 1

    def window_generators(self, n: int, a: int | None, b: int | None) -> list[int]:
        """Generators of degree ``n`` in ``W(a, b)``: levels ``a <= l < b``."""
        return [
            g for g, l in enumerate(self.levels.get(n, ()))
            if (a is None or l >= a) and (b is None or l < b)
        ]

    def window_boundary(self, n: int, a, b) -> tuple[list[list[int]], int]:
        cols = self.window_generators(n, a, b)
        rows = self.window_generators(n - 1, a, b)
        M = self.boundaries.get(n, ())
        return [[M[h][g] for g in cols] for h in rows], len(cols)

    # -- homology --------------------------------------------------------

    def homology(self, n: int, a: int | None = None, b: int | None = None) -> Subquotient:
        """``H_n(W(a, b))`` in window-generator coordinates."""
        key = ("H", n, a, b)
        if key not in self._cache:
            A, k = self.window_boundary(n, a, b)
            Z = kernel_basis(A, k) if A else [tuple(int(i == j) for j in range(k)) for i in range(k)]
            Bm, kb = self.window_boundary(n + 1, a, b)
            Bcols = transpose(Bm, kb) if kb else []
            if not Bm:
                Bcols = []
            G = PresentedGroup.free(k)
            self._cache[key] = subquotient(G, Z, [tuple(c) for c in Bcols if any(c)])
        return self._cache[key]

    def _embed(self, n, a, b, v) -> list[int]:
        full = [0] * self.rank(n)
        for g, x in zip(self.window_generators(n, a, b), v):
            full[g] = x
        return full

    def _restrict(self, n, a, b, full) -> tuple[int, ...]:
        return tuple(full[g] for g in self.window_generators(n, a, b))

    def map_homology(self, n: int, src: tuple, dst: tuple) -> GroupHom:
        """Map ``H_n(W(a,b)) -> H_n(W(a',b'))`` induced by ``F^a/F^b -> F^{a'}/F^{b'}``."""
        key = ("map", n, src, dst)
        if key not in self._cache:
            (a, b), (a2, b2) = src, dst
            if not (_le(a2, a) and _le(b2, b, top=True)):
                raise TowerError(f"no window map W{src} -> W{dst}")
            S, T = self.homology(n, a, b), self.homology(n, a2, b2)
            cols = []
            for x in S.group.basis():
                full = self._embed(n, a, b, S.representative(x))
                cols.append(T.proj(self._restrict(n, a2, b2, full)))
            self._cache[key] = GroupHom.from_columns(S.group, T.group, cols, check=False)
        return self._cache[key]

    def connecting(self, n: int, a, b, c) -> GroupHom:
        """Connecting map ``H_n(W(a,b)) -> H_{n-1}(W(b,c))`` of ``0 -> W(b,c) -> W(a,c) -> W(a,b) -> 0``.

        A class ``[z]`` goes to ``[d z~]`` for the lift ``z~`` with the same
        coordinates; no sign is inserted.
        """
        key = ("conn", n, a, b, c)
        if key not in self._cache:
            S, T = self.homology(n, a, b), self.homology(n - 1, b, c)
            M = self.boundaries.get(n, ())
            cols = []
            for x in S.group.basis():
                full = self._embed(n, a, b, S.representative(x))
                dz = [sum(M[h][g] * full[g] for g in range(len(full))) for h in range(self.rank(n - 1))]
                cols.append(T.proj(self._restrict(n - 1, b, c, dz)))
            self._cache[key] = GroupHom.from_columns(S.group, T.group, cols, check=False)
        return self._cache[key]

    def total_homology(self, n: int) -> Subquotient:
        return self.homology(n, None, None)

    def chain_boundary(self, n: int, v: Sequence[int]) -> list[int]:
        M = self.boundaries.get(n, ())
        return [sum(M[h][g] * v[g] for g in range(self.rank(n))) for h in range(self.rank(n - 1))]


def _le(x, y, top=False):
    """``x <= y`` where None means -infinity (or +infinity when ``top``)."""
    if top:
        return y is None or (x is not None and x <= y)
    return x is None or (y is not None and x <= y)


@dataclass(frozen=True)
class TowerProvenance:
    """Records how a couple was built, for the convergence module."""

    complex: FilteredComplex | None
    kind: str  # COLIM, LIM, "augmented" or "reindexed"
    source: object = None


# ---------------------------------------------------------------------------
# couples from filtered complexes


def from_filtered_complex(fc: FilteredComplex) -> ExactCouple:
    """The colim couple: ``D^{p,q} = H_p(F^q)``, ``E^{p,q} = H_p(F^q/F^{q+1})``."""
    lr = fc.level_range()
    prov = TowerProvenance(fc, COLIM)
    if lr is None:
        return ExactCouple({}, {}, {}, {}, {}, provenance=prov)
    qmin, qmax = lr
    D, E, i, j, k = {}, {}, {}, {}, {}
    for p in fc.degrees():
        for q in range(qmin, qmax + 2):
            D[Bidegree(p, q)] = fc.homology(p, q, None).group
        for q in range(qmin, qmax + 1):
            E[Bidegree(p, q)] = fc.homology(p, q, q + 1).group
            i[Bidegree(p, q)] = fc.map_homology(p, (q + 1, None), (q, None))
            j[Bidegree(p, q)] = fc.map_homology(p, (q, None), (q, q + 1))
            k[Bidegree(p, q)] = fc.connecting(p, q, q + 1, None)
    return ExactCouple(D, E, i, j, k, level=1, d_below=qmin, indexing=COLIM, provenance=prov)


def lim_couple(fc: FilteredComplex) -> ExactCouple:
    """The lim couple of the quotient tower ``C/F^{q+1} -> C/F^q`` (lim indexing).

    ``D^{p,q} = H_{p+1}(C/F^q)`` and ``E^{p,q} = H_p(F^q/F^{q+1})``; ``j`` is
    the connecting map and ``kappa`` the map into ``C/F^{q+1}``.
    """
    lr = fc.level_range()
    prov = TowerProvenance(fc, LIM)
    if lr is None:
        return ExactCouple({}, {}, {}, {}, {}, indexing=LIM, provenance=prov)
    qmin, qmax = lr
    D, E, i, j, k = {}, {}, {}, {}, {}
    degs = fc.degrees()
    for p in range(degs.start - 1, degs.stop):
        for q in range(qmin, qmax + 2):
            D[Bidegree(p, q)] = fc.homology(p + 1, None, q).group
        for q in range(qmin, qmax + 1):
            E[Bidegree(p, q)] = fc.homology(p, q, q + 1).group
            i[Bidegree(p, q)] = fc.map_homology(p + 1, (None, q + 1), (None, q))
            j[Bidegree(p, q)] = fc.connecting(p + 1, None, q, q + 1)
            k[Bidegree(p, q)] = fc.map_homology(p, (q, q + 1), (None, q + 1))
    return ExactCouple(D, E, i, j, k, level=1, d_above=qmax + 1, indexing=LIM, provenance=prov)


def quotient_tower_couple(fc: FilteredComplex) -> ExactCouple:
    """The quotient tower ``W_q = C/F^{q+1}`` in colim indexing.

    Here ``D^{p,q} = H_p(W_q)`` and ``E^{p,q}`` is the relative group of
    ``W_{q+1} -> W_q``, which is ``H_{p-1}(F^{q+1}/F^{q+2})``.  Reindexing it
    to lim conventions gives :func:`lim_couple`.
    """
    lr = fc.level_range()
    prov = TowerProvenance(fc, "quotient")
    if lr is None:
        return ExactCouple({}, {}, {}, {}, {}, provenance=prov)
    qmin, qmax = lr
    D, E, i, j, k = {}, {}, {}, {}, {}
    degs = fc.degrees()
    for p in range(degs.start, degs.stop + 1):
        for q in range(qmin - 1, qmax + 1):
            D[Bidegree(p, q)] = fc.homology(p, None, q + 1).group
        for q in range(qmin - 1, qmax):
            E[Bidegree(p, q)] = fc.homology(p - 1, q + 1, q + 2).group
            i[Bidegree(p, q)] = fc.map_homology(p, (None, q + 2), (None, q + 1))
            j[Bidegree(p, q)] = fc.connecting(p, None, q + 1, q + 2)
            k[Bidegree(p, q)] = fc.map_homology(p - 1, (q + 1, q + 2), (None, q + 2))
    return ExactCouple(D, E, i, j, k, level=1, d_above=qmax, indexing=COLIM, provenance=prov)


# ---------------------------------------------------------------------------
# hand-entered couples


@dataclass(frozen=True)
class AugmentedTowerData:
    """``E_1`` and ``D_1`` data entered directly, maps as integer matrices.

    ``i`` is keyed by target bidegree, ``j`` and ``kappa`` by source.
    """

    D: Mapping[tuple, PresentedGroup]
    E: Mapping[tuple, PresentedGroup]
    i: Mapping[tuple, Sequence[Sequence[int]]] = field(default_factory=dict)
    j: Mapping[tuple, Sequence[Sequence[int]]] = field(default_factory=dict)
    kappa: Mapping[tuple, Sequence[Sequence[int]]] = field(default_factory=dict)
    d_below: int | None = None
    d_above: int | None = None
    indexing: str = COLIM


def from_augmented_tower(data: AugmentedTowerData) -> ExactCouple:
    """Assemble and validate a hand-entered couple; raise on any exactness failure."""
    if data.indexing not in CONVENTIONS:
        raise TowerError(f"unknown indexing convention {data.indexing!r}")
    D = {Bidegree(*k): G for k, G in data.D.items()}
    E = {Bidegree(*k): G for k, G in data.E.items()}
    probe = ExactCouple(D, E, {}, {}, {}, d_below=data.d_below, d_above=data.d_above)

    def hom(src, tgt, M, what, key):
        try:
            return GroupHom(src, tgt, tuple(tuple(r) for r in M))
        except Exception as exc:
            raise TowerError(f"{what} at {tuple(key)}: {exc}") from None

    i = {Bidegree(*b): hom(probe.d_group(b[0], b[1] + 1), probe.d_group(*b), M, "i", b) for b, M in data.i.items()}
    j = {Bidegree(*b): hom(probe.d_group(*b), probe.e_group(*b), M, "j", b) for b, M in data.j.items()}
    k = {
        Bidegree(*b): hom(probe.e_group(*b), probe.d_group(b[0] - 1, b[1] + 1), M, "kappa", b)
        for b, M in data.kappa.items()
    }
    couple = ExactCouple(
        D, E, i, j, k, level=1, d_below=data.d_below, d_above=data.d_above,
        indexing=data.indexing, provenance=TowerProvenance(None, "augmented"),
    )
    failures = validate(couple)
    if failures:
        raise ExactnessError(failures)
    return couple


# ---------------------------------------------------------------------------
# indexing conventions

_SHIFT = {(COLIM, LIM): (-1, 1), (LIM, COLIM): (1, -1)}


def reindex(couple: ExactCouple, frm: str, to: str) -> ExactCouple:
    """Relabel a level-1 couple between colim and lim conventions.

    A colim spot ``(p, q)`` (``D = pi_p W_q``) becomes the lim spot
    ``(p-1, q+1)`` (``D = pi_{(p-1)+1} W_{(q+1)-1}``).  Groups and maps are
    unchanged and ``d_r`` still has bidegree ``(-1, r)``.
    """
    for c in (frm, to):
        if c not in CONVENTIONS:
            raise TowerError(f"unknown indexing convention {c!r}")
    if couple.indexing != frm:
        raise TowerError(f"couple is in {couple.indexing} indexing, not {frm}")
    if couple.level != 1:
        raise TowerError("reindex works on level-1 couples")
    if frm == to:
        return couple
    dp, dq = _SHIFT[(frm, to)]

    def mv(d):
        return {Bidegree(b.p + dp, b.q + dq): v for b, v in d.items()}

    def mq(x):
        return None if x is None else x + dq

    return ExactCouple(
        mv(couple.D), mv(couple.E), mv(couple.i), mv(couple.j), mv(couple.kappa),
        level=1, d_below=mq(couple.d_below), d_above=mq(couple.d_above), indexing=to,
        provenance=TowerProvenance(
            couple.provenance.complex if isinstance(couple.provenance, TowerProvenance) else None,
            "reindexed", couple.provenance,
        ),
    )


def same_couple(a: ExactCouple, b: ExactCouple) -> bool:
    """Equality of level-1 data (groups, maps, clamps, convention)."""
    def strip(d, nontrivial):
        return {k: v for k, v in d.items() if nontrivial(v)}

    grp = lambda G: G.ngens > 0  # noqa: E731
    hom = lambda f: f.source.ngens > 0 and f.target.ngens > 0 and not f.is_zero()  # noqa: E731
    return (
        a.indexing == b.indexing and a.d_below == b.d_below and a.d_above == b.d_above
        and strip(a.D, grp) == strip(b.D, grp) and strip(a.E, grp) == strip(b.E, grp)
        and all(
            {k: f.reduced_matrix() for k, f in strip(getattr(a, n), hom).items()}
            == {k: f.reduced_matrix() for k, f in strip(getattr(b, n), hom).items()}
            for n in ("i", "j", "kappa")
        )
    )
