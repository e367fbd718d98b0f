"""Pairings of towers and of spectral-sequence pages.

A :class:`TowerPairing` is a chain-level product ``C(W) x C(X) -> C(Y)``
that respects filtrations and satisfies the graded derivation rule.  It
induces a :class:`PagePairing` on ``E_1``.  A page pairing can also be given
directly, without a chain-level witness; whether it descends to the next
page is then decided by the per-page Leibniz check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .abgroup import ContainmentError, PresentedGroup, Vector
from .convergence import filtration, gamma, gamma_element
from .couple import Bidegree, ExactCouple, e_infinity, global_stabilization_page, page
from .signcalc import leibniz_sign, shift_couple
from .tower import FilteredComplex, from_filtered_complex


class PairingError(Exception):
    pass


class FiltrationViolation(PairingError):
    pass


class DerivationViolation(PairingError):
    pass


class DescentRefused(PairingError):
    def __init__(self, report: "LeibnizReport"):
        self.report = report
        w = report.witnesses[0]
        super().__init__(f"Leibniz rule fails on page {report.r}: {w}")


GenKey = tuple[int, int]  # (degree, generator index)


# ---------------------------------------------------------------------------
# chain level


@dataclass(frozen=True, eq=False)
class TowerPairing:
    """Chain-level product ``mu[(m, a), (n, b)]`` in ``C_{m+n}(Y)`` on generator pairs.

    Pairs absent from ``mu`` multiply to zero.
    """

    W: FilteredComplex
    X: FilteredComplex
    Y: FilteredComplex
    mu: Mapping[tuple[GenKey, GenKey], Sequence[int]]

    def __post_init__(self):
        mu = {}
        for (ka, kb), v in self.mu.items():
            ka, kb = (int(ka[0]), int(ka[1])), (int(kb[0]), int(kb[1]))
            deg = ka[0] + kb[0]
            if not (0 <= ka[1] < self.W.rank(ka[0]) and 0 <= kb[1] < self.X.rank(kb[0])):
                raise PairingError(f"product on {ka} x {kb} names a missing generator")
            v = tuple(int(x) for x in v)
            if len(v) != self.Y.rank(deg):
                raise PairingError(f"product on {ka} x {kb} must have {self.Y.rank(deg)} coordinates")
            if any(v):
                mu[(ka, kb)] = v
        object.__setattr__(self, "mu", mu)
        self._check_filtration()
        self._check_derivation()

    def product(self, m: int, a: Sequence[int], n: int, b: Sequence[int]) -> list[int]:
        """Bilinear extension of ``mu`` to chains ``a`` in ``C_m(W)``, ``b`` in ``C_n(X)``."""
        out = [0] * self.Y.rank(m + n)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                v = self.mu.get(((m, i), (n, j)))
                if v:
                    for k, c in enumerate(v):
                        out[k] += x * y * c
        return out

    def _check_filtration(self):
        for ((m, i), (n, j)), v in self.mu.items():
            need = self.W.levels[m][i] + self.X.levels[n][j]
            for k, c in enumerate(v):
                if c and self.Y.levels[m + n][k] < need:
                    raise FiltrationViolation(
                        f"product of W generator {(m, i)} and X generator {(n, j)} has a term on "
                        f"Y generator {(m + n, k)} of level {self.Y.levels[m + n][k]} < {need}"
                    )

    def _check_derivation(self):
        for m in self.W.degrees():
            for n in self.X.degrees():
                for i in range(self.W.rank(m)):
                    ea = _unit(self.W.rank(m), i)
                    da = self.W.chain_boundary(m, ea)
                    for j in range(self.X.rank(n)):
                        eb = _unit(self.X.rank(n), j)
                        db = self.X.chain_boundary(n, eb)
                        lhs = self.Y.chain_boundary(m + n, self.product(m, ea, n, eb))
                        r1 = self.product(m - 1, da, n, eb)
                        r2 = self.product(m, ea, n - 1, db)
                        s = leibniz_sign(m)
                        rhs = [x + s * y for x, y in zip(r1, r2)] if r1 else [s * y for y in r2]
                        if len(lhs) != len(rhs):
                            rhs = rhs + [0] * (len(lhs) - len(rhs))
                        if list(lhs) != list(rhs):
                            raise DerivationViolation(
                                f"d(ab) != (da)b + (-1)^{m} a(db) for W generator {(m, i)} and "
                                f"X generator {(n, j)}: {lhs} vs {rhs}"
                            )


def _unit(n: int, i: int) -> list[int]:
    return [int(k == i) for k in range(n)]


# ---------------------------------------------------------------------------
# page level


Tensor = tuple[tuple[Vector, ...], ...]


@dataclass(frozen=True, eq=False)
class PagePairing:
    """Products ``E_r^{b1}(W) x E_r^{b2}(X) -> E_r^{b1+b2}(Y)`` on generators.

    ``W``, ``X``, ``Y`` are level-1 couples; the groups used are those of
    their level-``r`` derived couples.  ``tensors[(b1, b2)][i][j]`` is the
    product of generator ``i`` with generator ``j``.
    """

    r: int
    W: ExactCouple
    X: ExactCouple
    Y: ExactCouple
    tensors: Mapping[tuple[Bidegree, Bidegree], Tensor]
    witness: TowerPairing | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.r < 1:
            raise PairingError("page index must be at least 1")
        for c in (self.W, self.X, self.Y):
            if c.level != 1:
                raise PairingError("page pairings refer to level-1 couples")
        clean = {}
        for (b1, b2), T in self.tensors.items():
            b1, b2 = Bidegree(*b1), Bidegree(*b2)
            G, H = self.left.e_group(*b1), self.right.e_group(*b2)
            K = self.target.e_group(*(b1 + b2))
            T = tuple(tuple(K.reduce(v) for v in row) for row in T)
            if len(T) != G.ngens or any(len(row) != H.ngens for row in T):
                raise PairingError(f"tensor at {tuple(b1)} x {tuple(b2)} has the wrong shape")
            if any(len(v) != K.ngens for row in T for v in row):
                raise PairingError(f"tensor at {tuple(b1)} x {tuple(b2)} has entries of the wrong length")
            clean[(b1, b2)] = T
        object.__setattr__(self, "tensors", clean)
        self._check_bilinear()

    @property
    def left(self) -> ExactCouple:
        return self.W.derived(self.r)

    @property
    def right(self) -> ExactCouple:
        return self.X.derived(self.r)

    @property
    def target(self) -> ExactCouple:
        return self.Y.derived(self.r)

    def _check_bilinear(self):
        for (b1, b2), T in self.tensors.items():
            G, H = self.left.e_group(*b1), self.right.e_group(*b2)
            for rel in G.relations:
                for j in range(H.ngens):
                    y = _unit(H.ngens, j)
                    if any(self.product(b1, rel, b2, y)):
                        raise PairingError(f"product at {tuple(b1)} x {tuple(b2)} ignores left relation {rel}")
            for rel in H.relations:
                for i in range(G.ngens):
                    x = _unit(G.ngens, i)
                    if any(self.product(b1, x, b2, rel)):
                        raise PairingError(f"product at {tuple(b1)} x {tuple(b2)} ignores right relation {rel}")

    def product(self, b1, x: Sequence[int], b2, y: Sequence[int]) -> Vector:
        b1, b2 = Bidegree(*b1), Bidegree(*b2)
        K = self.target.e_group(*(b1 + b2))
        T = self.tensors.get((b1, b2))
        if T is None:
            return K.zero()
        out = [0] * K.ngens
        for i, a in enumerate(x):
            if not a:
                continue
            for j, c in enumerate(y):
                if not c:
                    continue
                for k, v in enumerate(T[i][j]):
                    out[k] += a * c * v
        return K.reduce(out)

    def is_zero(self) -> bool:
        return all(not any(v) for T in self.tensors.values() for row in T for v in row)


def _window_class(fc: FilteredComplex, n: int, q: int, full: Sequence[int]) -> Vector:
    sq = fc.homology(n, q, q + 1)
    return sq.proj(fc._restrict(n, q, q + 1, full))


def induce_E1(tp: TowerPairing) -> PagePairing:
    """The ``E_1`` product induced by a chain-level pairing on layer representatives."""
    W, X, Y = (from_filtered_complex(c) for c in (tp.W, tp.X, tp.Y))
    tensors = {}
    for b1 in W.support():
        for b2 in X.support():
            B = b1 + b2
            K = Y.e_group(*B)
            if K.ngens == 0:
                continue
            HW = tp.W.homology(b1.p, b1.q, b1.q + 1)
            HX = tp.X.homology(b2.p, b2.q, b2.q + 1)
            reps_w = [tp.W._embed(b1.p, b1.q, b1.q + 1, HW.representative(x)) for x in HW.group.basis()]
            reps_x = [tp.X._embed(b2.p, b2.q, b2.q + 1, HX.representative(y)) for y in HX.group.basis()]

            def cls(a, b):
                return _window_class(tp.Y, B.p, B.q, tp.product(b1.p, a, b2.p, b))

            T = tuple(tuple(cls(a, b) for b in reps_x) for a in reps_w)
            # independence of representatives: boundaries of the layers multiply to zero
            for beta in HW.boundaries:
                full = tp.W._embed(b1.p, b1.q, b1.q + 1, beta)
                if any(any(cls(full, b)) for b in reps_x):
                    raise PairingError(f"E_1 product at {tuple(b1)} x {tuple(b2)} depends on the left representative")
            for beta in HX.boundaries:
                full = tp.X._embed(b2.p, b2.q, b2.q + 1, beta)
                if any(any(cls(a, full)) for a in reps_w):
                    raise PairingError(f"E_1 product at {tuple(b1)} x {tuple(b2)} depends on the right representative")
            tensors[(b1, b2)] = T
    return PagePairing(1, W, X, Y, tensors, witness=tp)


# ---------------------------------------------------------------------------
# Leibniz and descent


@dataclass(frozen=True)
class LeibnizWitness:
    """A generator pair where ``residual = (da) b + (-1)^p a (db) - d(ab)`` is nonzero."""

    left: Bidegree
    left_generator: int
    right: Bidegree
    right_generator: int
    at: Bidegree
    residual: Vector
    d_of_product: Vector
    da_times_b: Vector
    a_times_db: Vector

    def __str__(self):
        return (
            f"a = gen {self.left_generator} at {tuple(self.left)}, b = gen {self.right_generator} at "
            f"{tuple(self.right)}: residual {render_element(self.residual)} at {tuple(self.at)}"
        )


@dataclass(frozen=True)
class LeibnizReport:
    r: int
    passed: bool
    witnesses: list[LeibnizWitness]
    checked: int


def render_element(v: Sequence[int]) -> str:
    """``2·e`` style rendering in generator names ``e``, ``e1``, ..."""
    terms = []
    names = ["e"] if len(v) == 1 else [f"e{k}" for k in range(len(v))]
    for c, name in zip(v, names):
        if c == 0:
            continue
        if c == 1:
            terms.append(name)
        elif c == -1:
            terms.append(f"-{name}")
        else:
            terms.append(f"{c}·{name}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def check_leibniz(pp: PagePairing, sign=None) -> LeibnizReport:
    """Test ``d_r(ab) = d_r(a) b + (-1)^p a d_r(b)`` on all generator pairs.

    ``sign`` overrides the Koszul sign (a function of ``p``), for negative
    controls.
    """
    sgn = sign or leibniz_sign
    r = pp.r
    L, R, T = pp.left, pp.right, pp.target
    step = Bidegree(-1, r)
    witnesses = []
    checked = 0
    for b1 in L.support():
        for b2 in R.support():
            B = b1 + b2
            tgt = B + step
            K = T.e_group(*tgt)
            G, H = L.e_group(*b1), R.e_group(*b2)
            dL, dR, dT = L.differential(*b1), R.differential(*b2), T.differential(*B)
            for i, x in enumerate(G.basis()):
                da = dL(x)
                for j, y in enumerate(H.basis()):
                    checked += 1
                    ab = pp.product(b1, x, b2, y)
                    d_ab = dT(ab) if T.e_group(*B).ngens else K.zero()
                    da_b = pp.product(b1 + step, da, b2, y)
                    a_db = pp.product(b1, x, b2 + step, dR(y))
                    s = sgn(b1.p)
                    res = K.reduce([v + s * w - u for u, v, w in zip(d_ab, da_b, a_db)])
                    if any(res):
                        witnesses.append(LeibnizWitness(b1, i, b2, j, tgt, res, d_ab, da_b, a_db))
    return LeibnizReport(r, not witnesses, witnesses, checked)


def descend(pp: PagePairing) -> PagePairing:
    """The induced pairing on the next page; refused when the Leibniz rule fails."""
    report = check_leibniz(pp)
    if not report.passed:
        raise DescentRefused(report)
    r = pp.r
    L2, R2, T2 = (c.derived(r + 1) for c in (pp.W, pp.X, pp.Y))
    tensors = {}
    for b1 in L2.support():
        for b2 in R2.support():
            B = b1 + b2
            if T2.e_group(*B).ngens == 0:
                continue
            sqL, sqR, sqT = L2.e_steps[b1], R2.e_steps[b2], T2.e_steps[B]
            reps_l = [sqL.representative(x) for x in sqL.group.basis()]
            reps_r = [sqR.representative(y) for y in sqR.group.basis()]

            def cls(a, b):
                v = pp.product(b1, a, b2, b)
                try:
                    return sqT.proj(v)
                except ContainmentError:
                    raise PairingError(f"product of cycles at {tuple(b1)} x {tuple(b2)} is not a cycle") from None

            T = tuple(tuple(cls(a, b) for b in reps_r) for a in reps_l)
            for beta in sqL.boundaries:
                if any(any(cls(beta, b)) for b in reps_r):
                    raise PairingError(f"descended product at {tuple(b1)} x {tuple(b2)} depends on the left representative")
            for beta in sqR.boundaries:
                if any(any(cls(a, beta)) for a in reps_l):
                    raise PairingError(f"descended product at {tuple(b1)} x {tuple(b2)} depends on the right representative")
            tensors[(b1, b2)] = T
    return PagePairing(r + 1, pp.W, pp.X, pp.Y, tensors, witness=pp.witness)


def stabilization_of(pp: PagePairing) -> int:
    return max(global_stabilization_page(c) for c in (pp.W, pp.X, pp.Y))


@dataclass(frozen=True)
class DescentLog:
    pairings: list[PagePairing]
    reports: list[LeibnizReport]
    page_limit: int
    refused: LeibnizReport | None = None

    @property
    def complete(self) -> bool:
        return self.refused is None


def run_descent(pp: PagePairing, upto: int | None = None) -> DescentLog:
    """Check Leibniz and descend page by page up to ``upto`` (default: stabilization)."""
    N = upto if upto is not None else stabilization_of(pp)
    pairings, reports = [pp], []
    cur = pp
    while True:
        rep = check_leibniz(cur)
        reports.append(rep)
        if not rep.passed:
            return DescentLog(pairings, reports, N, rep)
        if cur.r >= N:
            return DescentLog(pairings, reports, N)
        cur = descend(cur)
        pairings.append(cur)


@dataclass(frozen=True, eq=False)
class EInfinityPairing:
    """The product on stabilized pages, addressed through ``E_1`` representatives."""

    pairing: PagePairing  # at the stabilization page N
    N: int
    log: DescentLog

    def multiply(self, b1, z1: Sequence[int], b2, z2: Sequence[int]) -> Vector:
        """Class in ``E_inf^{b1+b2}(Y)`` of the product of permanent cycles ``z1``, ``z2`` in ``E_1``."""
        b1, b2 = Bidegree(*b1), Bidegree(*b2)
        pp = self.pairing
        PW, PX, PY = (page(c, self.N) for c in (pp.W, pp.X, pp.Y))
        x = PW.proj_from_e1(*b1, z1)
        y = PX.proj_from_e1(*b2, z2)
        B = b1 + b2
        v = pp.product(b1, x, b2, y)
        rep = PY.lift_to_e1(*B, v)
        return e_infinity(pp.Y, *B).quotient.proj(rep)

    def generator_products(self) -> dict[tuple[Bidegree, Bidegree], list[list[Vector]]]:
        """Products of ``E_inf`` generators, as ``E_inf`` classes."""
        pp = self.pairing
        out = {}
        for b1 in pp.W.support():
            eW = e_infinity(pp.W, *b1)
            for b2 in pp.X.support():
                eX = e_infinity(pp.X, *b2)
                if eW.group.ngens == 0 or eX.group.ngens == 0:
                    continue
                if e_infinity(pp.Y, *(b1 + b2)).group.ngens == 0:
                    continue
                out[(b1, b2)] = [
                    [self.multiply(b1, eW.quotient.representative(x), b2, eX.quotient.representative(y))
                     for y in eX.group.basis()]
                    for x in eW.group.basis()
                ]
        return out


def einfinity_pairing(pp: PagePairing) -> EInfinityPairing:
    """Descend to the stabilization page; raise :class:`DescentRefused` on a Leibniz failure."""
    log = run_descent(pp)
    if log.refused is not None:
        raise DescentRefused(log.refused)
    return EInfinityPairing(log.pairings[-1], log.pairings[-1].r, log)


# ---------------------------------------------------------------------------
# compatibility with the abutment product


@dataclass(frozen=True)
class CompatibilityViolation:
    p: int
    q: int
    s: int
    t: int
    left_generator: int
    right_generator: int
    via_abutment: Vector | None
    via_e_infinity: Vector


@dataclass(frozen=True)
class CompatibilityReport:
    checked: int
    violations: list[CompatibilityViolation]

    @property
    def commutes(self) -> bool:
        return not self.violations


def abutment_product(tp: TowerPairing, p: int, alpha, s: int, beta) -> Vector:
    """Product of total homology classes, computed on cycle representatives."""
    W, X, Y = tp.W, tp.X, tp.Y
    aw, ax, ay = (c.level_range()[0] for c in (W, X, Y))
    HW, HX, HY = W.homology(p, aw, None), X.homology(s, ax, None), Y.homology(p + s, ay, None)
    a = W._embed(p, aw, None, HW.representative(alpha))
    b = X._embed(s, ax, None, HX.representative(beta))
    return HY.proj(Y._restrict(p + s, ay, None, tp.product(p, a, s, b)))


def gr_compatibility(tp: TowerPairing, einf: EInfinityPairing | None = None) -> CompatibilityReport:
    """Compare ``Gamma(a . b)`` with ``Gamma(a) . Gamma(b)`` over all graded generators."""
    pp1 = induce_E1(tp)
    einf = einf or einfinity_pairing(pp1)
    W, X, Y = pp1.W, pp1.X, pp1.Y
    if any(c.level_range() is None for c in (tp.W, tp.X, tp.Y)):
        return CompatibilityReport(0, [])
    violations = []
    checked = 0
    for p in tp.W.degrees():
        fW = filtration(W, p)
        for s in tp.X.degrees():
            fX = filtration(X, s)
            fY = filtration(Y, p + s)
            for q in fW.levels():
                grW = fW.graded(q)
                if grW.group.ngens == 0:
                    continue
                for t in fX.levels():
                    grX = fX.graded(t)
                    if grX.group.ngens == 0:
                        continue
                    GY, grY, einfY = gamma(Y, fY, q + t)
                    for i, x in enumerate(grW.group.basis()):
                        alpha = grW.representative(x)
                        e1 = gamma_element(W, fW, q, alpha)
                        for j, y in enumerate(grX.group.basis()):
                            checked += 1
                            beta = grX.representative(y)
                            e2 = gamma_element(X, fX, t, beta)
                            rhs = einf.multiply(Bidegree(p, q), e1, Bidegree(s, t), e2)
                            prod = abutment_product(tp, p, alpha, s, beta)
                            try:
                                lhs = GY(grY.proj(prod))
                            except ContainmentError:
                                lhs = None
                            if lhs is None or tuple(lhs) != tuple(rhs):
                                violations.append(CompatibilityViolation(p, q, s, t, i, j, lhs, rhs))
    return CompatibilityReport(checked, violations)


# ---------------------------------------------------------------------------
# suspension of pairings


def shift_pairing(pp: PagePairing, side: str) -> PagePairing:
    """Suspend an ``E_1`` pairing: ``(sigma x) y = sigma(x y)`` or ``x (y sigma) = (x y) sigma``."""
    if pp.r != 1:
        raise PairingError("shift an E_1 pairing")
    one = Bidegree(1, 0)
    if side == "left":
        W, X = shift_couple(pp.W, "left"), pp.X
        tensors = {(b1 + one, b2): T for (b1, b2), T in pp.tensors.items()}
    elif side == "right":
        W, X = pp.W, shift_couple(pp.X, "right")
        tensors = {(b1, b2 + one): T for (b1, b2), T in pp.tensors.items()}
    else:
        raise PairingError(f"unknown side {side!r}")
    Y = shift_couple(pp.Y, side)
    return PagePairing(1, W, X, Y, tensors)


def zero_pairing(W: ExactCouple, X: ExactCouple, Y: ExactCouple, r: int = 1) -> PagePairing:
    return PagePairing(r, W, X, Y, {})


def tensor_from_function(G: PresentedGroup, H: PresentedGroup, f) -> Tensor:
    return tuple(tuple(tuple(f(i, j)) for j in range(H.ngens)) for i in range(G.ngens))


__all__ = [
    "TowerPairing", "PagePairing", "induce_E1", "check_leibniz", "descend", "run_descent",
    "einfinity_pairing", "gr_compatibility", "shift_pairing", "zero_pairing", "DescentRefused",
    "PairingError", "FiltrationViolation", "DerivationViolation", "LeibnizReport", "LeibnizWitness",
    "EInfinityPairing", "CompatibilityReport", "render_element", "abutment_product",
]
