"""Exact arithmetic for finitely generated abelian groups.

A group is presented as ``Z^n / L`` where ``L`` is the row lattice of an
integer relation matrix.  Elements are integer coordinate vectors; homomorphisms
are integer matrices acting on column vectors (rows = target generators).

All integers are Python ints, so intermediate growth never overflows.

>>> G = PresentedGroup(2, [[2, 0]])
>>> G.invariants()
(1, (2,))
>>> G.reduce((5, -3))
(1, -3)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Vector = tuple[int, ...]
Matrix = list[list[int]]


class GroupError(Exception):
    pass


class IllDefinedHomError(GroupError):
    """The matrix does not carry source relations into the target lattice."""


class ContainmentError(GroupError):
    """A subgroup that was required to lie inside another does not."""


# ---------------------------------------------------------------------------
# integer matrices


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def transpose(A: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Transpose of an ``len(A) x ncols`` matrix (``ncols`` is needed when A is empty)."""
    return [[A[i][j] for i in range(len(A))] for j in range(ncols)]


def matmul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], inner: int, ncols: int) -> Matrix:
    out = zeros(len(A), ncols)
    for i, row in enumerate(A):
        o = out[i]
        for k in range(inner):
            a = row[k]
            if a:
                bk = B[k]
                for j in range(ncols):
                    if bk[j]:
                        o[j] += a * bk[j]
    return out


def matvec(A: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return tuple(sum(a * x for a, x in zip(row, v) if a and x) for row in A)


def _det(A: Matrix) -> int:
    # Bareiss fraction-free elimination
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def determinant(A: Sequence[Sequence[int]]) -> int:
    return _det([list(r) for r in A])


def _snf(A: Sequence[Sequence[int]], m: int, n: int):
    """Return (U, D, V, Vinv) with U*A*V = D in Smith form."""
    D = [list(r) for r in A]
    U = identity(m)
    V = identity(n)
    Vi = identity(n)

    def swap_rows(i, k):
        D[i], D[k] = D[k], D[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in D:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    def add_row(dst, src, c):  # row_dst += c * row_src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):  # col_dst += c * col_src
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]
        # inverse picks up row_src -= c * row_dst
        Vi[src] = [a - c * b for a, b in zip(Vi[src], Vi[dst])]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            piv = D[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return U, D, V, Vi


def smith_normal_form(A: Sequence[Sequence[int]], ncols: int | None = None):
    """Smith normal form ``U * A * V = D`` with unimodular ``U`` and ``V``.

    The diagonal of ``D`` is nonnegative and each entry divides the next.
    ``ncols`` must be given when ``A`` has no rows.
    """
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U, D, V, _ = _snf(A, m, n)
    return U, D, V


def diagonal(D: Sequence[Sequence[int]]) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def hermite_rows(rows: Iterable[Sequence[int]], ncols: int) -> list[Vector]:
    """Reduced row-echelon Hermite basis of the row lattice (nonzero rows only).

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``,
    which makes the basis a canonical function of the lattice.
    """
    H = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    col = 0
    while H and col < ncols:
        nz = [r for r in H if r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // p[col]
                r2 = [a - q * b for a, b in zip(r, p)]
                rest.append(r2)
            H = [r for r in H if not r[col]] + [p] + rest
            nz = [r for r in H if r[col]]
        p = nz[0]
        if p[col] < 0:
            p = [-a for a in p]
        H = [r for r in H if not r[col] and any(r)]
        out.append(p)
        col += 1
    # reduce above pivots
    for k, row in enumerate(out):
        c = next(j for j, a in enumerate(row) if a)
        for i in range(k):
            q = out[i][c] // row[c]
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], row)]
    return [tuple(r) for r in out]


def kernel_basis(A: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """Basis of ``{x in Z^ncols : A x = 0}``."""
    m = len(A)
    if ncols == 0:
        return []
    # row-reduce [A^T | I]; rows whose A^T part vanishes span the kernel
    rows = [list(col) + [int(i == k) for k in range(ncols)] for i, col in enumerate(transpose(A, ncols))]
    H = rows
    pivot_row = 0
    for col in range(m):
        while True:
            nz = [i for i in range(pivot_row, ncols) if H[i][col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(H[i][col]))
            p = nz[0]
            for i in nz[1:]:
                q = H[i][col] // H[p][col]
                H[i] = [a - q * b for a, b in zip(H[i], H[p])]
        if nz:
            H[pivot_row], H[nz[0]] = H[nz[0]], H[pivot_row]
            pivot_row += 1
    return [tuple(r[m:]) for r in H[pivot_row:]]


def solve(A: Sequence[Sequence[int]], y: Sequence[int], ncols: int) -> Vector | None:
    """An integer solution of ``A x = y`` or ``None``."""
    m = len(A)
    if ncols == 0:
        return () if not any(y) else None
    U, D, V, _ = _snf(A, m, ncols)
    c = matvec(U, y)
    z = [0] * ncols
    for i in range(m):
        d = D[i][i] if i < ncols else 0
        if d == 0:
            if c[i]:
                return None
        else:
            if c[i] % d:
                return None
            z[i] = c[i] // d
    return matvec(V, z)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class PresentedGroup:
    """``Z^ngens`` modulo the row lattice of ``relations``.

    The stored relations are the Hermite basis of the lattice, so two
    presentations of the same quotient of ``Z^ngens`` compare equal.
    """

    ngens: int
    relations: tuple[Vector, ...] = ()

    def __post_init__(self):
        rels = [tuple(int(a) for a in r) for r in self.relations]
        for r in rels:
            if len(r) != self.ngens:
                raise GroupError(f"relation {r} does not have {self.ngens} entries")
        object.__setattr__(self, "relations", tuple(hermite_rows(rels, self.ngens)))

    @classmethod
    def free(cls, n: int) -> "PresentedGroup":
        return cls(n, ())

    @classmethod
    def cyclic(cls, order: int) -> "PresentedGroup":
        return cls(1, ((order,),) if order else ())

    @classmethod
    def from_invariants(cls, rank: int, torsion: Sequence[int]) -> "PresentedGroup":
        n = rank + len(torsion)
        rels = [tuple(t if k == rank + i else 0 for k in range(n)) for i, t in enumerate(torsion)]
        return cls(n, tuple(rels))

    def reduce(self, v: Sequence[int]) -> Vector:
        """Canonical coset representative of ``v``."""
        if len(v) != self.ngens:
            raise GroupError(f"vector of length {len(v)} in group with {self.ngens} generators")
        w = list(v)
        for row in self.relations:
            c = next(j for j, a in enumerate(row) if a)
            q = w[c] // row[c]
            if q:
                w = [a - q * b for a, b in zip(w, row)]
        return tuple(w)

    def is_zero(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def basis(self) -> list[Vector]:
        return [tuple(int(i == j) for j in range(self.ngens)) for i in range(self.ngens)]

    def element(self, v: Sequence[int]) -> "GroupElement":
        return GroupElement(self.reduce(v), self)

    def invariants(self) -> tuple[int, tuple[int, ...]]:
        return invariants(self)

    def is_trivial(self) -> bool:
        return len(self.relations) == self.ngens and all(r[i] == 1 for i, r in enumerate(self.relations))

    def order(self) -> int | None:
        rank, tors = self.invariants()
        if rank:
            return None
        out = 1
        for t in tors:
            out *= t
        return out

    def __str__(self) -> str:
        return render_invariants(*self.invariants())


def invariants(G: PresentedGroup) -> tuple[int, tuple[int, ...]]:
    """(rank, invariant factors > 1, each dividing the next)."""
    if not G.relations:
        return G.ngens, ()
    _, D, _ = smith_normal_form(G.relations, G.ngens)
    d = [x for x in diagonal(D) if x]
    return G.ngens - len(d), tuple(x for x in d if x > 1)


def render_invariants(rank: int, torsion: Sequence[int]) -> str:
    parts = ["Z"] * rank + [f"Z/{t}" for t in torsion]
    return " ⊕ ".join(parts) if parts else "0"


def parse_invariants(text: str) -> tuple[int, tuple[int, ...]]:
    """Inverse of :func:`render_invariants`."""
    text = text.strip()
    if text == "0":
        return 0, ()
    rank, tors = 0, []
    for tok in text.replace("+", "⊕").split("⊕"):
        tok = tok.strip()
        if tok == "Z":
            rank += 1
        elif tok.startswith("Z/"):
            tors.append(int(tok[2:]))
        else:
            raise ValueError(f"bad group token {tok!r}")
    return rank, tuple(tors)


TRIVIAL = PresentedGroup(0, ())


@dataclass(frozen=True)
class GroupElement:
    coordinates: Vector
    parent: PresentedGroup

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if other.parent != self.parent:
            raise GroupError("elements of different groups")
        return self.parent.element(tuple(a + b for a, b in zip(self.coordinates, other.coordinates)))

    def __neg__(self) -> "GroupElement":
        return self.parent.element(tuple(-a for a in self.coordinates))

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, n: int) -> "GroupElement":
        return self.parent.element(tuple(n * a for a in self.coordinates))

    def is_zero(self) -> bool:
        return not any(self.coordinates)


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism ``source -> target`` given on generators.

    ``matrix`` has ``target.ngens`` rows and ``source.ngens`` columns.
    """

    source: PresentedGroup
    target: PresentedGroup
    matrix: tuple[Vector, ...]
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        M = tuple(tuple(int(a) for a in r) for r in self.matrix)
        if len(M) != self.target.ngens or any(len(r) != self.source.ngens for r in M):
            raise GroupError(
                f"matrix shape does not match {self.target.ngens}x{self.source.ngens}"
            )
        object.__setattr__(self, "matrix", M)
        if self.check:
            bad = self.well_definedness_failure()
            if bad is not None:
                raise IllDefinedHomError(f"relation {bad} is not sent into the target lattice")

    @classmethod
    def zero(cls, source: PresentedGroup, target: PresentedGroup) -> "GroupHom":
        return cls(source, target, tuple((0,) * source.ngens for _ in range(target.ngens)), check=False)

    @classmethod
    def identity(cls, G: PresentedGroup) -> "GroupHom":
        return cls(G, G, tuple(identity(G.ngens)), check=False)

    @classmethod
    def from_columns(cls, source, target, columns: Sequence[Sequence[int]], check=True) -> "GroupHom":
        return cls(source, target, tuple(transpose(columns, target.ngens)), check=check)

    def well_definedness_failure(self) -> Vector | None:
        for rel in self.source.relations:
            if not self.target.is_zero(matvec(self.matrix, rel)):
                return rel
        return None

    def __call__(self, v: Sequence[int]) -> Vector:
        return self.target.reduce(matvec(self.matrix, v))

    def columns(self) -> list[Vector]:
        return [self(e) for e in self.source.basis()]

    def compose(self, first: "GroupHom") -> "GroupHom":
        """``self ∘ first``."""
        if first.target != self.source:
            raise GroupError("composing homomorphisms with mismatched groups")
        M = matmul(self.matrix, first.matrix, self.source.ngens, first.source.ngens)
        return GroupHom(first.source, self.target, tuple(map(tuple, M)), check=False)

    def scaled(self, c: int) -> "GroupHom":
        return GroupHom(self.source, self.target, tuple(tuple(c * a for a in r) for r in self.matrix), check=False)

    def is_zero(self) -> bool:
        return all(not any(col) for col in self.columns())

    def reduced_matrix(self) -> list[list[int]]:
        """Matrix whose columns are canonical images of the generators."""
        return transpose(self.columns(), self.target.ngens)

    def preimage(self, y: Sequence[int]) -> Vector | None:
        """Some ``x`` with ``self(x) == y``, or ``None`` if ``y`` is not in the image."""
        cols = [list(c) for c in transpose(self.matrix, self.source.ngens)]
        cols += [list(r) for r in self.target.relations]
        A = transpose(cols, self.target.ngens)
        sol = solve(A, tuple(y), len(cols))
        return None if sol is None else self.source.reduce(sol[: self.source.ngens])


# ---------------------------------------------------------------------------
# subgroups, kernels, images, subquotients


def _span_matrix(G: PresentedGroup, gens: Sequence[Sequence[int]]) -> tuple[Matrix, int]:
    cols = [list(g) for g in gens] + [list(r) for r in G.relations]
    return transpose(cols, G.ngens), len(cols)


def in_span(G: PresentedGroup, gens: Sequence[Sequence[int]], v: Sequence[int]) -> Vector | None:
    """Coefficients ``c`` with ``sum c_i gens_i == v`` in ``G``, or ``None``."""
    A, n = _span_matrix(G, gens)
    sol = solve(A, tuple(v), n)
    return None if sol is None else sol[: len(gens)]


def is_subgroup(G: PresentedGroup, small: Sequence[Sequence[int]], big: Sequence[Sequence[int]]) -> bool:
    return all(in_span(G, big, v) is not None for v in small)


def same_subgroup(G: PresentedGroup, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> bool:
    return is_subgroup(G, A, B) and is_subgroup(G, B, A)


def canonical_subgroup(G: PresentedGroup, gens: Sequence[Sequence[int]]) -> tuple[Vector, ...]:
    """Hermite basis of ``span(gens) + relations``; equal iff the subgroups are equal."""
    return tuple(hermite_rows(list(gens) + list(G.relations), G.ngens))


def simplify(G: PresentedGroup):
    """Isomorphic presentation ``S`` with one generator per nontrivial cyclic factor.

    Returns ``(S, to_S, from_S)`` where ``to_S: G -> S`` and ``from_S: S -> G``
    are mutually inverse isomorphisms.
    """
    k = G.ngens
    R = [list(r) for r in G.relations]
    if R:
        _, D, V, Vi = _snf(R, len(R), k)
        d = diagonal(D)
    else:
        V, Vi, d = identity(k), identity(k), []
    d = d + [0] * (k - len(d))
    keep = [i for i in range(k) if d[i] != 1]
    # new coordinates y = V^T x ; old x = V^{-T} y
    S = PresentedGroup(
        len(keep),
        tuple(tuple(d[i] if t == s else 0 for t in range(len(keep))) for s, i in enumerate(keep) if d[i] > 1),
    )
    to_m = tuple(tuple(V[r][i] for r in range(k)) for i in keep)
    from_m = tuple(tuple(Vi[i][r] for i in keep) for r in range(k))
    return S, GroupHom(G, S, to_m, check=False), GroupHom(S, G, from_m, check=False)


@dataclass(frozen=True)
class Subquotient:
    """``Z / B`` for subgroups ``B ⊆ Z`` of an ambient group.

    ``lift`` has ambient-generator rows and one column per generator of
    ``group``: column ``k`` is a representative in ``Z`` of generator ``k``.
    """

    group: PresentedGroup
    ambient: PresentedGroup
    cycles: tuple[Vector, ...]
    boundaries: tuple[Vector, ...]
    lift: tuple[Vector, ...]
    _to_group: GroupHom = field(repr=False, compare=False)

    def proj(self, v: Sequence[int]) -> Vector:
        """Class in ``group`` of an ambient element ``v`` lying in ``Z``."""
        c = in_span(self.ambient, self.cycles, v)
        if c is None:
            raise ContainmentError(f"{tuple(v)} is not in the numerator subgroup")
        return self._to_group(c)

    def contains(self, v: Sequence[int]) -> bool:
        return in_span(self.ambient, self.cycles, v) is not None

    def representative(self, x: Sequence[int]) -> Vector:
        """Ambient representative of an element ``x`` of ``group``."""
        return self.ambient.reduce(matvec(self.lift, x))


def subquotient(G: PresentedGroup, Z: Sequence[Sequence[int]], B: Sequence[Sequence[int]] = ()) -> Subquotient:
    """Materialize ``Z/B`` for subgroups (generator lists) of ``G``.

    >>> G = PresentedGroup.free(2)
    >>> subquotient(G, [(2, 0), (0, 1)], [(4, 0)]).group.invariants()
    (1, (2,))
    """
    Z = [G.reduce(z) for z in Z]
    B = [G.reduce(b) for b in B]
    k = len(Z)
    A, n = _span_matrix(G, Z)
    rels = [v[:k] for v in kernel_basis(A, n)]
    for b in B:
        c = in_span(G, Z, b)
        if c is None:
            raise ContainmentError(f"boundary generator {b} does not lie in the cycle subgroup")
        rels.append(c)
    raw = PresentedGroup(k, tuple(tuple(r) for r in rels))
    S, to_s, from_s = simplify(raw)
    zmat = transpose(Z, G.ngens)
    lift = matmul(zmat, from_s.matrix, k, S.ngens)
    lift = transpose([G.reduce(col) for col in transpose(lift, S.ngens)], G.ngens)
    to_group = GroupHom(PresentedGroup.free(k), S, to_s.matrix, check=False)
    return Subquotient(S, G, tuple(Z), tuple(B), tuple(map(tuple, lift)), to_group)


def preimage_generators(f: GroupHom, S: Sequence[Sequence[int]] = ()) -> list[Vector]:
    """Generators of ``f^{-1}(span S)`` in source coordinates (includes the kernel)."""
    n = f.source.ngens
    cols = [list(c) for c in transpose(f.matrix, n)]
    cols += [[-a for a in s] for s in S]
    cols += [[-a for a in r] for r in f.target.relations]
    A = transpose(cols, f.target.ngens)
    gens = [f.source.reduce(v[:n]) for v in kernel_basis(A, len(cols))]
    return [g for g in gens if any(g)] or []


def kernel(f: GroupHom) -> tuple[PresentedGroup, GroupHom]:
    """``(K, incl)`` with ``incl: K -> f.source`` injective onto ``ker f``."""
    if f.well_definedness_failure() is not None:
        raise IllDefinedHomError("kernel of an ill-defined homomorphism")
    sq = subquotient(f.source, preimage_generators(f))
    return sq.group, GroupHom(sq.group, f.source, sq.lift, check=False)


def image(f: GroupHom) -> tuple[PresentedGroup, GroupHom]:
    """``(I, incl)`` with ``incl: I -> f.target`` injective onto ``f(source)``."""
    if f.well_definedness_failure() is not None:
        raise IllDefinedHomError("image of an ill-defined homomorphism")
    sq = subquotient(f.target, f.columns())
    return sq.group, GroupHom(sq.group, f.target, sq.lift, check=False)


def kernel_generators(f: GroupHom) -> list[Vector]:
    return preimage_generators(f)


def image_generators(f: GroupHom) -> list[Vector]:
    return [c for c in f.columns() if any(c)]


def is_exact(f: GroupHom, g: GroupHom) -> bool:
    """Whether ``im f == ker g`` for ``A --f--> B --g--> C``."""
    if f.target != g.source:
        raise GroupError("maps are not composable")
    B = f.target
    im = image_generators(f)
    return all(not any(g(v)) for v in im) and is_subgroup(B, kernel_generators(g), im)


def is_injective(f: GroupHom) -> bool:
    return not preimage_generators(f)


def is_surjective(f: GroupHom) -> bool:
    return is_subgroup(f.target, f.target.basis(), image_generators(f))


def direct_sum(groups: Sequence[PresentedGroup]) -> PresentedGroup:
    """Block-diagonal presentation of the direct sum."""
    n = sum(G.ngens for G in groups)
    rels = []
    off = 0
    for G in groups:
        for r in G.relations:
            rels.append((0,) * off + tuple(r) + (0,) * (n - off - G.ngens))
        off += G.ngens
    return PresentedGroup(n, tuple(rels))
