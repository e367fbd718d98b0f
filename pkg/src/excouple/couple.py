"""Exact couples in Adams indexing.

An exact couple at level ``r`` has bigraded groups ``D^{p,q}``, ``E^{p,q}``
and maps

    i: D^{p,q+1} -> D^{p,q}        bidegree (0, -1)
    j: D^{p,q}   -> E^{p,q+r-1}    bidegree (0, r-1)
    k: E^{p,q}   -> D^{p-1,q+1}    bidegree (-1, +1)

so that ``d_r = j k`` has bidegree ``(-1, r)``.  The level-1 couple of a tower
is the one whose ``E`` is the ``E_1`` page.

``D`` may be *clamped* on either side: for ``q < d_below`` the group
``D^{p,q}`` equals ``D^{p,d_below}`` and ``i`` is the identity there (the
tower is eventually the identity downward), and similarly above ``d_above``.
Without a clamp, ``D`` vanishes outside its stored entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from .abgroup import (
    TRIVIAL,
    GroupHom,
    PresentedGroup,
    Subquotient,
    Vector,
    canonical_subgroup,
    image,
    image_generators,
    is_subgroup,
    kernel_generators,
    preimage_generators,
    subquotient,
)


class Bidegree(NamedTuple):
    p: int
    q: int

    def __add__(self, other):  # type: ignore[override]
        return Bidegree(self.p + other[0], self.q + other[1])


class CoupleError(Exception):
    pass


class BidegreeMismatch(CoupleError):
    pass


class ExactnessError(CoupleError):
    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(str(f) for f in self.failures))


@dataclass(frozen=True)
class ExactnessFailure:
    spot: str  # "D", "E" or "D'" (the D-spot reached by kappa)
    at: Bidegree
    detail: str

    def __str__(self):
        return f"exactness fails at {self.spot}{tuple(self.at)}: {self.detail}"


def _bd(x) -> Bidegree:
    return Bidegree(int(x[0]), int(x[1]))


@dataclass(frozen=True, eq=False)
class ExactCouple:
    """Bigraded exact couple; absent entries are trivial groups / zero maps.

    ``i`` is keyed by the bidegree of its *target*, ``j`` and ``kappa`` by the
    bidegree of their *source*.
    """

    D: Mapping[Bidegree, PresentedGroup]
    E: Mapping[Bidegree, PresentedGroup]
    i: Mapping[Bidegree, GroupHom]
    j: Mapping[Bidegree, GroupHom]
    kappa: Mapping[Bidegree, GroupHom]
    level: int = 1
    d_below: int | None = None
    d_above: int | None = None
    indexing: str = "colim"
    prev: "ExactCouple | None" = field(default=None, repr=False)
    e_steps: Mapping[Bidegree, Subquotient] = field(default_factory=dict, repr=False)
    d_incl: Mapping[Bidegree, GroupHom] = field(default_factory=dict, repr=False)
    provenance: object = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("D", "E", "i", "j", "kappa", "e_steps", "d_incl"):
            object.__setattr__(self, name, {_bd(k): v for k, v in getattr(self, name).items()})
        object.__setattr__(self, "_cache", {})
        self._check_bidegrees()

    # -- lookups ---------------------------------------------------------

    def d_key(self, p: int, q: int) -> Bidegree:
        if self.d_below is not None and q < self.d_below:
            q = self.d_below
        if self.d_above is not None and q > self.d_above:
            q = self.d_above
        return Bidegree(p, q)

    def d_group(self, p: int, q: int) -> PresentedGroup:
        return self.D.get(self.d_key(p, q), TRIVIAL)

    def e_group(self, p: int, q: int) -> PresentedGroup:
        return self.E.get(Bidegree(p, q), TRIVIAL)

    def i_map(self, p: int, q: int) -> GroupHom:
        """``i: D^{p,q+1} -> D^{p,q}``."""
        src, tgt = self.d_group(p, q + 1), self.d_group(p, q)
        if self.d_key(p, q + 1) == self.d_key(p, q):
            return GroupHom.identity(src)
        f = self.i.get(Bidegree(p, q))
        return f if f is not None else GroupHom.zero(src, tgt)

    def j_degree(self) -> int:
        return self.level - 1

    def j_map(self, p: int, q: int) -> GroupHom:
        """``j: D^{p,q} -> E^{p,q+r-1}``."""
        # in a clamped region j is zero: the E-groups it would hit are empty
        f = self.j.get(Bidegree(p, q)) if self.d_key(p, q) == (p, q) else None
        src, tgt = self.d_group(p, q), self.e_group(p, q + self.j_degree())
        return f if f is not None else GroupHom.zero(src, tgt)

    def kappa_map(self, p: int, q: int) -> GroupHom:
        """``kappa: E^{p,q} -> D^{p-1,q+1}``."""
        f = self.kappa.get(Bidegree(p, q))
        return f if f is not None else GroupHom.zero(self.e_group(p, q), self.d_group(p - 1, q + 1))

    def differential(self, p: int, q: int) -> GroupHom:
        """``d_r: E^{p,q} -> E^{p-1,q+r}``."""
        return self.j_map(p - 1, q + 1).compose(self.kappa_map(p, q))

    def iterated_i(self, p: int, q: int, steps: int) -> GroupHom:
        """``i^(steps): D^{p,q} -> D^{p,q-steps}`` (identity when ``steps == 0``)."""
        f = GroupHom.identity(self.d_group(p, q))
        for s in range(steps):
            f = self.i_map(p, q - s - 1).compose(f)
        return f

    # -- extent ----------------------------------------------------------

    def p_range(self) -> range:
        ps = [k.p for k in self.D] + [k.p for k in self.E]
        if not ps:
            return range(0)
        return range(min(ps) - 1, max(ps) + 2)

    def q_range(self) -> range:
        qs = [k.q for k in self.D] + [k.q for k in self.E]
        qs += [x for x in (self.d_below, self.d_above) if x is not None]
        if not qs:
            return range(0)
        return range(min(qs) - 2, max(qs) + 3)

    def width(self) -> int:
        qs = self.q_range()
        return max(len(qs) - 4, 0)

    def support(self) -> list[Bidegree]:
        """Bidegrees with a nontrivial ``E`` group, ordered by ``(q, p)``."""
        return sorted((k for k, G in self.E.items() if not G.is_trivial()), key=lambda b: (b.q, b.p))

    def _check_bidegrees(self):
        r = self.level
        for k, f in self.i.items():
            if self.d_key(k.p, k.q) != k or f.target != self.d_group(k.p, k.q) or f.source != self.d_group(k.p, k.q + 1):
                raise BidegreeMismatch(f"i at {tuple(k)} does not map D{(k.p, k.q + 1)} -> D{tuple(k)}")
        for k, f in self.j.items():
            if f.source != self.d_group(k.p, k.q) or f.target != self.e_group(k.p, k.q + r - 1):
                raise BidegreeMismatch(f"j at {tuple(k)} does not map D{tuple(k)} -> E{(k.p, k.q + r - 1)}")
        for k, f in self.kappa.items():
            if f.source != self.e_group(k.p, k.q) or f.target != self.d_group(k.p - 1, k.q + 1):
                raise BidegreeMismatch(f"kappa at {tuple(k)} does not map E{tuple(k)} -> D{(k.p - 1, k.q + 1)}")

    # -- derived couples -------------------------------------------------

    def base(self) -> "ExactCouple":
        c = self
        while c.prev is not None:
            c = c.prev
        return c

    def derived(self, r: int) -> "ExactCouple":
        """The couple at level ``r`` (``r >= self.level``), memoized."""
        if r < self.level:
            raise CoupleError(f"cannot go down from level {self.level} to {r}")
        c = self
        while c.level < r:
            nxt = c._cache.get("derive")
            if nxt is None:
                nxt = derive(c)
                c._cache["derive"] = nxt
            c = nxt
        return c


def _hom_from_images(src: PresentedGroup, tgt: PresentedGroup, cols) -> GroupHom:
    return GroupHom.from_columns(src, tgt, cols, check=False)


def _subgroup_coords(incl: GroupHom, y: Vector) -> Vector:
    x = incl.preimage(y)
    if x is None:
        raise CoupleError(f"{y} does not lie in the expected subgroup")
    return x


def validate(couple: ExactCouple) -> list[ExactnessFailure]:
    """Spots where ``D -> D -> E -> D -> D`` fails to be exact (empty iff exact)."""
    couple._check_bidegrees()
    r = couple.level
    out: list[ExactnessFailure] = []
    for p in couple.p_range():
        for q in couple.q_range():
            i_in = couple.i_map(p, q)
            j_out = couple.j_map(p, q)
            if not _exact(i_in, j_out):
                out.append(ExactnessFailure("D", Bidegree(p, q), "image(i) != kernel(j)"))
            j_in = couple.j_map(p, q - r + 1)
            k_out = couple.kappa_map(p, q)
            if not _exact(j_in, k_out):
                out.append(ExactnessFailure("E", Bidegree(p, q), "image(j) != kernel(kappa)"))
            i_out = couple.i_map(p - 1, q)
            if not _exact(k_out, i_out):
                out.append(ExactnessFailure("D'", Bidegree(p - 1, q + 1), "image(kappa) != kernel(i)"))
    return out


def _exact(f: GroupHom, g: GroupHom) -> bool:
    B = f.target
    if B.ngens == 0:
        return True
    im = image_generators(f)
    if any(any(g(v)) for v in im):
        return False
    return is_subgroup(B, kernel_generators(g), im)


def is_valid(couple: ExactCouple) -> bool:
    return not validate(couple)


def derive(c: ExactCouple) -> ExactCouple:
    """The derived couple: ``D' = i(D)``, ``E' = ker d / im d``."""
    r = c.level
    # E_{r+1}
    e_steps: dict[Bidegree, Subquotient] = {}
    E2: dict[Bidegree, PresentedGroup] = {}
    for b, G in c.E.items():
        if G.ngens == 0:
            continue
        d_out = c.differential(b.p, b.q)
        d_in = c.differential(b.p + 1, b.q - r)
        sq = subquotient(G, kernel_generators(d_out), image_generators(d_in))
        e_steps[b] = sq
        E2[b] = sq.group
    # D_{r+1}
    qs = [k.q for k in c.D]
    D2: dict[Bidegree, PresentedGroup] = {}
    incl: dict[Bidegree, GroupHom] = {}
    if qs:
        ps = sorted({k.p for k in c.D})
        lo, hi = min(qs) - 1, max(qs)
        if c.d_below is not None:
            lo = min(lo, c.d_below - 1)
        if c.d_above is not None:
            hi = max(hi, c.d_above)
        for p in ps:
            for q in range(lo, hi + 1):
                I, inc = image(c.i_map(p, q))
                clamp = q in (None if c.d_below is None else c.d_below - 1, c.d_above)
                if I.ngens or clamp:
                    D2[Bidegree(p, q)] = I
                    incl[Bidegree(p, q)] = inc
    new_below = None if c.d_below is None else c.d_below - 1
    new_above = c.d_above

    def dkey(p, q):
        if new_below is not None and q < new_below:
            q = new_below
        if new_above is not None and q > new_above:
            q = new_above
        return Bidegree(p, q)

    def d2(p, q):
        return D2.get(dkey(p, q), TRIVIAL)

    def incl_at(p, q):
        k = dkey(p, q)
        return incl.get(k)

    i2, j2, k2 = {}, {}, {}
    for k in list(D2):
        p, q = k
        # i': D'^{p,q+1} -> D'^{p,q}
        if dkey(p, q + 1) != dkey(p, q) and d2(p, q + 1).ngens and d2(p, q).ngens:
            src_inc, tgt_inc = incl_at(p, q + 1), incl_at(p, q)
            imap = c.i_map(p, q)
            cols = [_subgroup_coords(tgt_inc, imap(src_inc(g))) for g in src_inc.source.basis()]
            i2[k] = _hom_from_images(d2(p, q + 1), d2(p, q), cols)
        # j': D'^{p,q} -> E'^{p,q+r}
        tgt_b = Bidegree(p, q + r)
        if tgt_b in E2 and D2[k].ngens:
            inc = incl[k]
            imap = c.i_map(p, q)
            jmap = c.j_map(p, q + 1)
            cols = []
            for g in inc.source.basis():
                x = imap.preimage(inc(g))
                if x is None:
                    raise CoupleError("derived j: element not in image of i")
                cols.append(e_steps[tgt_b].proj(jmap(x)))
            j2[k] = _hom_from_images(D2[k], E2[tgt_b], cols)
    for b, sq in e_steps.items():
        tgt = dkey(b.p - 1, b.q + 1)
        if sq.group.ngens == 0 or tgt not in D2 or D2[tgt].ngens == 0:
            continue
        kmap = c.kappa_map(b.p, b.q)
        inc = incl[tgt]
        cols = [_subgroup_coords(inc, kmap(sq.representative(g))) for g in sq.group.basis()]
        k2[b] = _hom_from_images(sq.group, D2[tgt], cols)
    # only keep i at positions distinct from its clamp image
    i2 = {k: f for k, f in i2.items() if dkey(k.p, k.q) == k}
    return ExactCouple(
        D2, E2, i2, j2, k2,
        level=r + 1, d_below=new_below, d_above=new_above, indexing=c.indexing,
        prev=c, e_steps=e_steps, d_incl=incl, provenance=c.provenance,
    )


# ---------------------------------------------------------------------------
# the Z_r / B_r description


def cycles_boundaries(couple: ExactCouple, r: int, p: int, q: int) -> tuple[list[Vector], list[Vector]]:
    """``(Z_r^{p,q}, B_r^{p,q})`` as generator lists in ``E_1^{p,q}``.

    ``Z_r`` is the kappa-preimage of the image of ``i^(r-1)`` from
    ``D^{p-1,q+r}`` and ``B_r`` is ``j`` of the kernel of ``i^(r-1)`` on
    ``D^{p,q}``.
    """
    if couple.level != 1:
        raise CoupleError("cycles_boundaries works on a level-1 couple")
    if r < 1:
        raise CoupleError("page index must be >= 1")
    E1 = couple.e_group(p, q)
    if r == 1:
        return E1.basis(), []
    lift = couple.iterated_i(p - 1, q + r, r - 1)
    Z = preimage_generators(couple.kappa_map(p, q), image_generators(lift))
    Z = [z for z in Z if any(z)]
    ker = kernel_generators(couple.iterated_i(p, q, r - 1))
    jm = couple.j_map(p, q)
    B = [v for v in (jm(x) for x in ker) if any(v)]
    return Z, B


def zb_subquotient(couple: ExactCouple, r: int, p: int, q: int) -> Subquotient:
    Z, B = cycles_boundaries(couple, r, p, q)
    return subquotient(couple.e_group(p, q), Z, B)


def stabilization_bound(couple: ExactCouple) -> int:
    """A page index past which ``Z_r`` and ``B_r`` no longer move."""
    return couple.width() + 2


@dataclass(frozen=True)
class EInfinity:
    group: PresentedGroup
    page: int
    quotient: Subquotient

    def __str__(self):
        return str(self.group)


def stabilization_page(couple: ExactCouple, p: int, q: int) -> int:
    """Minimal ``N`` with ``Z_r = Z_N`` and ``B_r = B_N`` as subgroups for all ``r >= N``."""
    key = ("N", p, q)
    if key in couple._cache:
        return couple._cache[key]
    E1 = couple.e_group(p, q)
    R = stabilization_bound(couple)
    lattices = []
    for r in range(1, R + 2):
        Z, B = cycles_boundaries(couple, r, p, q)
        lattices.append((canonical_subgroup(E1, Z), canonical_subgroup(E1, B)))
    N = len(lattices)
    while N > 1 and lattices[N - 2] == lattices[-1]:
        N -= 1
    couple._cache[key] = N
    return N


def e_infinity(couple: ExactCouple, p: int, q: int) -> EInfinity:
    """``E_infinity^{p,q} = Z_N / B_N`` at the minimal stabilization page ``N``."""
    N = stabilization_page(couple, p, q)
    sq = zb_subquotient(couple, N, p, q)
    return EInfinity(sq.group, N, sq)


# ---------------------------------------------------------------------------
# pages


@dataclass(frozen=True, eq=False)
class Page:
    """``E_r`` with its differential and representation maps back to ``E_1``."""

    r: int
    couple: ExactCouple  # the level-r couple

    @property
    def entries(self) -> dict[Bidegree, PresentedGroup]:
        return dict(self.couple.E)

    def group(self, p: int, q: int) -> PresentedGroup:
        return self.couple.e_group(p, q)

    def differential(self, p: int, q: int) -> GroupHom:
        return self.couple.differential(p, q)

    @property
    def differentials(self) -> dict[Bidegree, GroupHom]:
        return {b: self.differential(*b) for b in self.couple.E}

    def step(self, p: int, q: int) -> Subquotient | None:
        """``E_r`` as ``ker d_{r-1} / im d_{r-1}`` inside ``E_{r-1}`` (None at r = 1)."""
        if self.r == 1:
            return None
        return self.couple.e_steps.get(Bidegree(p, q))

    def previous(self) -> "Page | None":
        return None if self.couple.prev is None else Page(self.r - 1, self.couple.prev)

    def lift_to_e1(self, p: int, q: int, x: Vector) -> Vector:
        """An ``E_1`` representative (in ``Z_r``) of ``x`` in ``E_r^{p,q}``."""
        page: Page = self
        v = tuple(x)
        while page.r > 1:
            sq = page.step(p, q)
            if sq is None:
                return page.previous().group(p, q).zero()
            v = sq.representative(v)
            page = page.previous()
        return page.group(p, q).reduce(v)

    def proj_from_e1(self, p: int, q: int, v: Vector) -> Vector:
        """Class in ``E_r^{p,q}`` of an element of ``Z_r^{p,q} ⊆ E_1^{p,q}``."""
        chain = []
        page: Page = self
        while page.r > 1:
            chain.append(page)
            page = page.previous()
        x = page.group(p, q).reduce(v)
        for pg in reversed(chain):
            sq = pg.step(p, q)
            if sq is None:
                return pg.group(p, q).zero()
            x = sq.proj(x)
        return x

    def support(self) -> list[Bidegree]:
        return self.couple.support()


def page(couple: ExactCouple, r: int) -> Page:
    """Page ``E_r`` computed by iterated derivation of a level-1 couple."""
    if r < 1:
        raise CoupleError("page index must be >= 1")
    if couple.level != 1:
        raise CoupleError("pages are indexed from a level-1 couple")
    return Page(r, couple.derived(r))


def global_stabilization_page(couple: ExactCouple) -> int:
    ns = [stabilization_page(couple, b.p, b.q) for b in couple.E]
    return max(ns, default=1)
