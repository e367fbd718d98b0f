"""Abutment filtrations, the comparison map Gamma and convergence verdicts.

For a colim-indexed couple the abutment in degree ``p`` is the bottom of the
tower, ``D^{p,qlow}`` (the colimit, reached because the tower is eventually
the identity downward), filtered by images ``F^q = im(D^{p,q})``.

For a lim-indexed couple the abutment in degree ``p`` is the top of the
tower, ``D^{p-1,qtop}`` (the limit), filtered by kernels
``F^q = ker(D^{p-1,qtop} -> D^{p-1,q})``; since ``D^{p-1,q}`` is the degree
``p`` group of ``W_{q-1}``, these are the elements that die at level ``q-1``.

Everything here assumes bounded data, so ``lim^1`` vanishes and pages
stabilize; the checks exist to certify the clause logic, not to handle
genuinely infinite towers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .abgroup import (
    GroupHom,
    PresentedGroup,
    Subquotient,
    Vector,
    canonical_subgroup,
    image_generators,
    is_injective,
    is_subgroup,
    is_surjective,
    kernel_generators,
    subquotient,
)
from .couple import Bidegree, EInfinity, ExactCouple, e_infinity, stabilization_page
from .tower import COLIM, LIM


class ConvergenceError(Exception):
    pass


# ---------------------------------------------------------------------------
# tower extent


def _q_extent(couple: ExactCouple) -> tuple[int, int]:
    qs = [k.q for k in couple.D] + [k.q for k in couple.E]
    qs += [x for x in (couple.d_below, couple.d_above) if x is not None]
    if not qs:
        return 0, 0
    return min(qs), max(qs)


def abutment_level(couple: ExactCouple) -> int:
    """The tower level whose ``D`` group is the abutment."""
    lo, hi = _q_extent(couple)
    if couple.indexing == COLIM:
        return couple.d_below if couple.d_below is not None else lo - 1
    return couple.d_above if couple.d_above is not None else hi + 1


def tower_map(couple: ExactCouple, p: int, hi: int, lo: int) -> GroupHom:
    """The composite ``D^{p,hi} -> D^{p,lo}`` of ``i`` maps (``hi >= lo``)."""
    if hi < lo:
        raise ConvergenceError(f"tower maps go down, not from {hi} to {lo}")
    return couple.iterated_i(p, hi, hi - lo)


# ---------------------------------------------------------------------------
# filtration


@dataclass(frozen=True, eq=False)
class AbutmentFiltration:
    """``F^q`` subgroups of the abutment group in degree ``p``.

    ``steps[q]`` is generators of ``F^q`` for ``q`` in ``[q_first, q_last]``;
    ``F^q`` is all of the group for ``q < q_first`` and equals
    ``F^{q_last}`` for ``q > q_last``.
    """

    p: int
    indexing: str
    group: PresentedGroup
    steps: dict[int, list[Vector]]
    q_first: int
    q_last: int

    def F(self, q: int) -> list[Vector]:
        if q < self.q_first:
            return self.group.basis()
        return self.steps[min(q, self.q_last)]

    def graded(self, q: int) -> Subquotient:
        return subquotient(self.group, self.F(q), self.F(q + 1))

    def levels(self) -> range:
        return range(self.q_first, self.q_last)

    def intersection(self) -> list[Vector]:
        return self.steps[self.q_last]

    def is_decreasing(self) -> bool:
        return all(
            is_subgroup(self.group, self.F(q + 1), self.F(q))
            for q in range(self.q_first - 1, self.q_last)
        )


def filtration(couple: ExactCouple, p: int) -> AbutmentFiltration:
    """The abutment filtration in degree ``p`` (image type for colim, kernel type for lim)."""
    if couple.level != 1:
        raise ConvergenceError("filtration needs the level-1 couple")
    lo, hi = _q_extent(couple)
    a = abutment_level(couple)
    steps: dict[int, list[Vector]] = {}
    if couple.indexing == COLIM:
        A = couple.d_group(p, a)
        top = hi + 1
        for q in range(a, top + 1):
            steps[q] = image_generators(tower_map(couple, p, q, a))
        return AbutmentFiltration(p, COLIM, A, steps, a, top)
    if couple.indexing == LIM:
        A = couple.d_group(p - 1, a)
        first = lo
        for q in range(first, a + 1):
            steps[q] = kernel_generators(tower_map(couple, p - 1, a, q))
        return AbutmentFiltration(p, LIM, A, steps, first, a)
    raise ConvergenceError(f"unknown indexing {couple.indexing!r}")


# ---------------------------------------------------------------------------
# Gamma


def gamma_element(couple: ExactCouple, filt: AbutmentFiltration, q: int, alpha, lift=None) -> Vector:
    """``E_1`` representative of the image of ``alpha`` in ``F^q``.

    Colim: ``j(beta)`` for a lift ``beta`` of ``alpha`` to ``D^{p,q}``.  Lim:
    an ``e`` with ``kappa(e)`` equal to the image of ``alpha`` one level up.
    ``lift`` overrides the chosen preimage (to test independence of choices).
    """
    p = filt.p
    a = abutment_level(couple)
    if filt.indexing == COLIM:
        beta = lift if lift is not None else tower_map(couple, p, q, a).preimage(alpha)
        if beta is None:
            raise ConvergenceError(f"{alpha} is not in F^{q}")
        return couple.j_map(p, q)(beta)
    y = tower_map(couple, p - 1, a, q + 1)(alpha) if q + 1 <= a else tuple(alpha)
    e = lift if lift is not None else couple.kappa_map(p, q).preimage(y)
    if e is None:
        raise ConvergenceError(f"{alpha} is not in F^{q}")
    return tuple(e)


def gamma(couple: ExactCouple, filt: AbutmentFiltration, q: int) -> tuple[GroupHom, Subquotient, EInfinity]:
    """``Gamma: Gr^q -> E_infinity^{p,q}`` with the graded piece and ``E_infinity`` it connects."""
    p = filt.p
    gr = filt.graded(q)
    einf = e_infinity(couple, p, q)
    cols = []
    for x in gr.group.basis():
        e = gamma_element(couple, filt, q, gr.representative(x))
        cols.append(einf.quotient.proj(e))
    return GroupHom.from_columns(gr.group, einf.group, cols, check=True), gr, einf


def gamma_well_defined(couple: ExactCouple, filt: AbutmentFiltration, q: int) -> list[str]:
    """Recompute Gamma with perturbed lifts and perturbed representatives.

    Returns a list of discrepancies (empty when independent of choices).
    """
    p = filt.p
    einf = e_infinity(couple, p, q)
    bad = []
    a = abutment_level(couple)
    Fq = filt.F(q)
    if filt.indexing == COLIM:
        f = tower_map(couple, p, q, a)
        ker = kernel_generators(f)
        src = f
    else:
        src = couple.kappa_map(p, q)
        ker = kernel_generators(src)
    for alpha in Fq:
        base = einf.quotient.proj(gamma_element(couple, filt, q, alpha))
        lift0 = src.preimage(
            alpha if filt.indexing == COLIM
            else (tower_map(couple, p - 1, a, q + 1)(alpha) if q + 1 <= a else alpha)
        )
        for kv in ker:
            other = tuple(x + y for x, y in zip(lift0, kv))
            v = einf.quotient.proj(gamma_element(couple, filt, q, alpha, lift=other))
            if v != base:
                bad.append(f"lift of {alpha} changed by {kv}")
        for f1 in filt.F(q + 1):
            moved = filt.group.reduce([x + y for x, y in zip(alpha, f1)])
            v = einf.quotient.proj(gamma_element(couple, filt, q, moved))
            if v != base:
                bad.append(f"{alpha} moved by F^{q + 1} element {f1}")
    return bad


# ---------------------------------------------------------------------------
# stabilization and Mittag-Leffler


@dataclass(frozen=True)
class StabilizationReport:
    pages: dict[Bidegree, int]
    all_stable: bool = True

    def max_page(self) -> int:
        return max(self.pages.values(), default=1)


def re_infinity_check(couple: ExactCouple) -> StabilizationReport:
    """Minimal stabilization page per supported bidegree (the bounded reading of RE_inf = 0)."""
    base = couple.base() if couple.level != 1 else couple
    pages = {b: stabilization_page(base, b.p, b.q) for b in base.support()}
    return StabilizationReport(pages, True)


@dataclass(frozen=True)
class MittagLefflerCertificate:
    """For each level ``q``, the ``k`` from which ``im(G_{q+k} -> G_q)`` no longer shrinks."""

    lim1_zero: bool
    stable_after: dict[int, int]


def mittag_leffler(groups: list[PresentedGroup], maps: list[GroupHom], above: str = "zero") -> MittagLefflerCertificate:
    """Mittag-Leffler check for a finite tower ``G_0 <- G_1 <- ... <- G_n``.

    ``maps[q]`` is ``G_{q+1} -> G_q``.  Above the top the tower continues by
    zero groups (``above="zero"``) or identities (``above="identity"``); either
    way images settle within the listed levels, so ``lim^1 = 0``.
    """
    n = len(groups)
    if len(maps) != max(n - 1, 0):
        raise ConvergenceError("need one map between each pair of consecutive groups")
    for q, f in enumerate(maps):
        if f.source != groups[q + 1] or f.target != groups[q]:
            raise ConvergenceError(f"map {q} does not go from level {q + 1} to level {q}")
    cert = {}
    for q in range(n):
        comp = GroupHom.identity(groups[q])
        lattices = [canonical_subgroup(groups[q], groups[q].basis())]
        for s in range(q, n - 1):
            comp = comp.compose(maps[s])
            lattices.append(canonical_subgroup(groups[q], image_generators(comp)))
        lattices.append(() if above == "zero" else lattices[-1])
        k = len(lattices) - 1
        while k > 0 and lattices[k - 1] == lattices[-1]:
            k -= 1
        cert[q] = k
    return MittagLefflerCertificate(True, cert)


def couple_mittag_leffler(couple: ExactCouple, p: int) -> MittagLefflerCertificate:
    """Mittag-Leffler certificate for the ``D^{p,*}`` tower of a couple."""
    lo, hi = _q_extent(couple)
    lo = couple.d_below if couple.d_below is not None else lo
    hi = couple.d_above if couple.d_above is not None else hi + 1
    groups = [couple.d_group(p, q) for q in range(lo, hi + 1)]
    maps = [couple.i_map(p, q) for q in range(lo, hi)]
    above = "identity" if couple.d_above is not None else "zero"
    cert = mittag_leffler(groups, maps, above)
    return MittagLefflerCertificate(cert.lim1_zero, {q + lo: k for q, k in cert.stable_after.items()})


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class ClauseResult:
    clause: str
    holds: bool
    statement: str
    detail: str = ""


@dataclass(frozen=True)
class GammaReport:
    p: int
    q: int
    graded: tuple
    e_infinity: tuple
    injective: bool
    surjective: bool
    well_defined: bool


@dataclass(frozen=True)
class ConvergenceVerdict:
    indexing: str
    stabilization: StabilizationReport
    lim1_zero: bool
    mittag_leffler: dict[int, MittagLefflerCertificate]
    gamma: list[GammaReport]
    gamma_injective: bool
    gamma_iso: bool
    strong: bool
    route: tuple[str, ...]
    clauses: list[ClauseResult]
    notes: list[str] = field(default_factory=list)


def _degrees(couple: ExactCouple) -> list[int]:
    ps = sorted({b.p for b in couple.E} | {b.p for b in couple.D})
    if couple.indexing == LIM:
        ps = sorted({b.p for b in couple.E} | {b.p + 1 for b in couple.D})
    return ps


def gamma_reports(couple: ExactCouple) -> list[GammaReport]:
    out = []
    for p in _degrees(couple):
        filt = filtration(couple, p)
        qs = sorted(set(filt.levels()) | {b.q for b in couple.support() if b.p == p})
        for q in qs:
            G, gr, einf = gamma(couple, filt, q)
            if gr.group.ngens == 0 and einf.group.ngens == 0:
                continue
            out.append(GammaReport(
                p, q, gr.group.invariants(), einf.group.invariants(),
                is_injective(G), is_surjective(G), not gamma_well_defined(couple, filt, q),
            ))
    return out


def _colim_eventually_zero(couple: ExactCouple) -> bool:
    """``D`` vanishes far down the tower (the hypothesis of a lim-tower)."""
    if couple.d_below is None:
        return True
    return all(couple.d_group(b.p, couple.d_below).is_trivial() for b in couple.D)


def _lim_eventually_zero(couple: ExactCouple) -> bool:
    if couple.d_above is None:
        return True
    return all(couple.d_group(b.p, couple.d_above).is_trivial() for b in couple.D)


def verdict(couple: ExactCouple) -> ConvergenceVerdict:
    """Clause-by-clause convergence verdict for a bounded level-1 couple."""
    if couple.level != 1:
        raise ConvergenceError("verdict needs the level-1 couple")
    stab = re_infinity_check(couple)
    ps = sorted({b.p for b in couple.D})
    ml = {p: couple_mittag_leffler(couple, p) for p in ps}
    lim1 = all(c.lim1_zero for c in ml.values())
    notes = ["lim^1 certified by Mittag-Leffler only; no lim^1 group is computed"]
    if couple.indexing == LIM and not _colim_eventually_zero(couple):
        notes.append("not a lim-tower: D does not vanish far down, so the colimit is nonzero")
        clauses = [
            ClauseResult("(i)", False, "Gr^q -> E_inf is an isomorphism; strong convergence",
                         "hypothesis colim D = 0 fails"),
        ]
        return ConvergenceVerdict(LIM, stab, lim1, ml, [], False, False, False, (), clauses, notes)
    if couple.indexing == COLIM and not _lim_eventually_zero(couple):
        notes.append("the tower does not vanish far up; the colim reading assumes it does")
    reports = gamma_reports(couple)
    inj = all(r.injective and r.well_defined for r in reports)
    iso = inj and all(r.surjective for r in reports)
    re_inf = stab.all_stable
    clauses: list[ClauseResult] = []
    route: tuple[str, ...] = ()
    if couple.indexing == COLIM:
        clauses.append(ClauseResult("(a)", re_inf and iso, "RE_inf = 0, so Gamma is an isomorphism",
                                    f"pages stabilize by page {stab.max_page()}"))
        clauses.append(ClauseResult("(b)", lim1, "lim^1 = 0, so the spectral sequence converges conditionally",
                                    "bounded tower is Mittag-Leffler"))
        meet_zero = all(not any(v) for p in _degrees(couple) for v in filtration(couple, p).intersection())
        clauses.append(ClauseResult("(c)", re_inf and lim1 and meet_zero,
                                    "(a), (b) and the intersection of the F^q is 0: strong convergence"))
        unique = _unique_preimages(couple)
        clauses.append(ClauseResult("(d)", re_inf and lim1 and unique,
                                    "(a), (b) and at most one preimage at some level: strong convergence",
                                    "tower maps are the identity below the bottom level" if unique else ""))
        if clauses[3].holds and clauses[0].holds:
            route = ("(a)", "(b)", "(d)")
        elif clauses[2].holds and clauses[0].holds:
            route = ("(a)", "(b)", "(c)")
    else:
        clauses.append(ClauseResult("(i)", re_inf and iso, "RE_inf = 0, so Gr^q -> E_inf is an isomorphism "
                                    "and the spectral sequence converges strongly",
                                    f"pages stabilize by page {stab.max_page()}"))
        clauses.append(ClauseResult("(ii)", lim1, "lim^1 = 0, so pi_p(holim W) -> pi_p W is an isomorphism",
                                    "Milnor sequence not computed; Mittag-Leffler certificate only"))
        clauses.append(ClauseResult("(iii)", re_inf and _colim_eventually_zero(couple),
                                    "W_n = * far down and RE_inf = 0, so lim^1 = 0"))
        if clauses[0].holds:
            route = ("(i)",)
    notes.append("extension problems between graded pieces are not resolved")
    return ConvergenceVerdict(couple.indexing, stab, lim1, ml, reports, inj, iso, bool(route), route, clauses, notes)


def _unique_preimages(couple: ExactCouple) -> bool:
    """Bounded reading of clause (d): the bottom tower map into the abutment is injective."""
    a = abutment_level(couple)
    if couple.d_below is None:
        # D vanishes below the support, so the abutment is 0 and preimages are unique
        return True
    return all(is_injective(couple.i_map(b.p, a - 1)) for b in couple.D)
