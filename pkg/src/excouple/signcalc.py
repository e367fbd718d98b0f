"""Sign and orientation calculus.

Orientations are ordered frames of formal coordinate vectors.  Comparing two
frames that span the same coordinates gives the parity of the permutation
between them times the number of reflected vectors.  A boundary component
is oriented outward-normal-first: the frame ``F`` of the component is
positive when ``(n_out, F)`` is positive in the ambient frame.

The module also holds the table of boundary and suspension sign conventions
and the degree calculus behind the Leibniz sign.  The engine reads its signs
from here, so changing a constant in this module changes engine output.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .couple import Bidegree, ExactCouple, page


class SignError(Exception):
    pass


class UnknownConvention(SignError):
    pass


# ---------------------------------------------------------------------------
# frames


Vec = tuple[int, str]  # (+1 or -1, coordinate name)


def frame_sign(frame: tuple[Vec, ...], reference: tuple[Vec, ...]) -> int:
    """Orientation of ``frame`` relative to ``reference`` (same coordinates, any order)."""
    names = [n for _, n in frame]
    ref = [n for _, n in reference]
    if sorted(names) != sorted(ref) or len(set(names)) != len(names):
        raise SignError(f"frames {names} and {ref} do not span the same coordinates")
    perm = [ref.index(n) for n in names]
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
    sign = -1 if inversions % 2 else 1
    for s, _ in frame:
        sign *= s
    for s, _ in reference:
        sign *= s
    return sign


def _pos(names) -> tuple[Vec, ...]:
    return tuple((1, n) for n in names)


@dataclass(frozen=True)
class OrientedCell:
    """A disk, sphere, interval, cone or product with an explicit frame.

    ``frame`` lists the coordinates at a chosen boundary point, ordered so
    that the ambient orientation is the standard one.  ``faces`` records,
    for each boundary component, its outward normal and the cell it is.
    """

    kind: str
    dim: int
    frame: tuple[Vec, ...]
    label: str
    faces: tuple[tuple[Vec, "OrientedCell"], ...] = field(default=(), repr=False)
    factors: tuple["OrientedCell", ...] = field(default=(), repr=False)

    def __post_init__(self):
        if len(self.frame) != self.dim:
            raise SignError(f"{self.label}: frame length {len(self.frame)} != dimension {self.dim}")

    def __str__(self):
        return self.label


def point(label: str) -> OrientedCell:
    return OrientedCell("point", 0, (), label)


def sphere(n: int, coord: str = "x") -> OrientedCell:
    """``S^n`` as the boundary of ``D^{n+1}`` in coordinates ``coord``.

    At the chosen point the outward normal of the disk is ``coord1`` and the
    sphere's frame is ``coord2 .. coord(n+1)``.
    """
    if n < 0:
        raise SignError("sphere dimension must be nonnegative")
    fr = _pos(f"{coord}{i}" for i in range(2, n + 2))
    return OrientedCell("sphere", n, fr, f"S^{n}")


def disk(n: int, coord: str = "x") -> OrientedCell:
    """``D^n`` with the standard frame of ``R^n``."""
    if n < 0:
        raise SignError("disk dimension must be nonnegative")
    fr = _pos(f"{coord}{i}" for i in range(1, n + 1))
    faces = ()
    if n == 1:
        # D^1 = [-1, 1]: outward normals at the two endpoints
        faces = ((( 1, f"{coord}1"), point("+1")), ((-1, f"{coord}1"), point("-1")))
    elif n >= 2:
        faces = (((1, f"{coord}1"), sphere(n - 1, coord)),)
    return OrientedCell("disk", n, fr, f"D^{n}", faces)


def interval(coord: str = "t") -> OrientedCell:
    """``I = [0, 1]`` oriented as a subspace of ``R``; basepoint ``0``."""
    faces = (((1, coord), point("1")), ((-1, coord), point("0")))
    return OrientedCell("interval", 1, ((1, coord),), "I", faces)


def cone(p: int, coord: str = "x", cone_coord: str = "t") -> OrientedCell:
    """``C S^{p-1}``, a quotient of ``S^{p-1} x I`` with the free end at ``t = 1``."""
    if p < 1:
        raise SignError("cone on S^{p-1} needs p >= 1")
    S = sphere(p - 1, coord)
    fr = S.frame + ((1, cone_coord),)
    return OrientedCell("cone", p, fr, f"CS^{p - 1}", (((1, cone_coord), S),))


def product(M: OrientedCell, N: OrientedCell) -> OrientedCell:
    """``M x N`` with the product orientation."""
    faces = []
    for n, C in M.faces:
        faces.append((n, ("left", C)))
    for n, C in N.faces:
        faces.append((n, ("right", C)))
    cell = OrientedCell("product", M.dim + N.dim, M.frame + N.frame, f"{M.label}x{N.label}",
                        factors=(M, N))
    object.__setattr__(cell, "faces", tuple(faces))
    return cell


def _face_cell(ambient: OrientedCell, face) -> OrientedCell:
    if ambient.kind != "product":
        return face
    side, C = face
    M, N = ambient.factors
    return product(C, N) if side == "left" else product(M, C)


def _face_sign(ambient: OrientedCell, normal: Vec, face_cell: OrientedCell) -> int:
    if face_cell.dim == 0:
        return frame_sign((normal,), ambient.frame)
    return frame_sign((normal,) + face_cell.frame, ambient.frame)


def boundary_sign(cell: OrientedCell) -> list[tuple[int, OrientedCell]]:
    """Boundary components with the sign of their standard orientation.

    A sign ``-1`` means the boundary orientation is opposite to the
    component's own standard orientation.
    """
    if cell.dim == 0:
        raise SignError("a point has no boundary")
    out = []
    for normal, face in cell.faces:
        C = _face_cell(cell, face)
        out.append((_face_sign(cell, normal, C), C))
    return out


def boundary_of_boundary(cell: OrientedCell) -> Counter:
    """Signed count of codimension-two faces of ``boundary(boundary(cell))``."""
    total: Counter = Counter()
    for s, C in boundary_sign(cell):
        if C.dim == 0 or not C.faces:
            continue
        for t, F in boundary_sign(C):
            total[F.label] += s * t
    return total


# ---------------------------------------------------------------------------
# convention table


@dataclass(frozen=True)
class SignConvention:
    """``sign(k) = constant * (-1)^(k + offset)``, or just ``constant`` when not graded."""

    name: str
    constant: int
    graded: bool
    offset: int = 0

    def sign(self, k: int = 0) -> int:
        if not self.graded:
            return self.constant
        return self.constant * (-1 if (k + self.offset) % 2 else 1)


CONVENTION_TABLE: dict[str, SignConvention] = {
    # kappa on a cone representative [f] is (-1)^{p-1}[f]
    "kappa-cone": SignConvention("kappa-cone", 1, True, -1),
    # boundary maps of cofiber sequences: (-1)^k times the natural composite
    "homotopy-boundary": SignConvention("homotopy-boundary", 1, True, 0),
    "homology-boundary": SignConvention("homology-boundary", 1, True, 0),
    "cohomology-boundary": SignConvention("cohomology-boundary", 1, True, 0),
    # boundary against suspension: d(sigma x) = -sigma(d x), d(x sigma) = (d x) sigma
    "left-suspension": SignConvention("left-suspension", -1, False),
    "right-suspension": SignConvention("right-suspension", 1, False),
}


def convention_sign(name: str, k: int = 0) -> int:
    try:
        conv = CONVENTION_TABLE[name]
    except KeyError:
        raise UnknownConvention(f"unknown sign convention {name!r}") from None
    return conv.sign(k)


def hurewicz_coherent(max_k: int = 8) -> bool:
    """Homotopy, homology and cohomology boundary signs agree degree by degree."""
    return all(
        convention_sign("homotopy-boundary", k) == convention_sign("homology-boundary", k)
        == convention_sign("cohomology-boundary", k)
        for k in range(max_k + 1)
    )


def canonical_boundary_sign(p: int) -> int:
    """Net sign by which a cone-boundary ``kappa`` acts on a cellular generator in degree ``p``.

    The chain-level ``kappa`` carries no sign; the homotopy ``kappa`` of a
    cone representative contributes ``(-1)^{p-1}`` and the boundary map of
    the layer cofiber sequence another ``(-1)^{p-1}``.  The product must be
    ``+1`` for ``d_1`` to send the canonical generator to the canonical
    generator.
    """
    return convention_sign("kappa-cone", p) * convention_sign("homotopy-boundary", p - 1)


# ---------------------------------------------------------------------------
# degree calculus for the product boundary


@dataclass(frozen=True)
class DegreeEntry:
    first: int
    second: int
    second_graded: bool = False

    def vector(self, p: int) -> tuple[int, int]:
        s = self.second * ((-1) ** p if self.second_graded else 1)
        return (self.first, s)


DEGREE_TABLE: dict[str, DegreeEntry] = {
    # degrees of the three pinch components of the boundary of D^p x D^q
    "jk-product": DegreeEntry(1, 1),
    "kx-y": DegreeEntry(1, 0),
    "x-ky": DegreeEntry(0, 1, True),
}


def degree_vector(term: str, p: int, q: int) -> tuple[int, int]:
    if term not in DEGREE_TABLE:
        raise SignError(f"unknown product term {term!r}")
    if p < 1 or q < 1:
        raise SignError("degrees must be at least 1")
    return DEGREE_TABLE[term].vector(p)


def degree_identity_holds(p: int, q: int) -> bool:
    """``D(jk) = D(kx-y) + (-1)^p D(x-ky)`` in ``Z^2``."""
    a = degree_vector("jk-product", p, q)
    b = degree_vector("kx-y", p, q)
    c = degree_vector("x-ky", p, q)
    e = (-1) ** p
    return a == (b[0] + e * c[0], b[1] + e * c[1])


def leibniz_sign(p: int) -> int:
    """Coefficient of ``x (kappa y)`` in ``kappa(xy)``, read off the degree table.

    Matching second coordinates of ``D(jk) = D(kx-y) + eps * D(x-ky)``
    forces ``eps = D(x-ky)_2``, which is ``(-1)^p`` with the table above.
    """
    jk = DEGREE_TABLE["jk-product"].vector(p)[1]
    kx = DEGREE_TABLE["kx-y"].vector(p)[1]
    xk = DEGREE_TABLE["x-ky"].vector(p)[1]
    if xk == 0:
        raise SignError("degree table leaves the Leibniz sign undetermined")
    eps = (jk - kx) * xk  # xk is a unit
    if eps not in (1, -1):
        raise SignError("degree table does not give a unit Leibniz sign")
    return eps


# ---------------------------------------------------------------------------
# suspension shifts


def shift_couple(couple: ExactCouple, side: str) -> ExactCouple:
    """Suspend a level-1 couple on the given side: ``p -> p + 1`` with the suspension sign on kappa."""
    if couple.level != 1:
        raise SignError("shift a level-1 couple")
    c = convention_sign(f"{side}-suspension")

    def mv(d, scale=1):
        return {Bidegree(b.p + 1, b.q): (v if scale == 1 else v.scaled(scale)) for b, v in d.items()}

    return ExactCouple(
        mv(couple.D), mv(couple.E), mv(couple.i), mv(couple.j), mv(couple.kappa, c),
        level=1, d_below=couple.d_below, d_above=couple.d_above, indexing=couple.indexing,
        provenance=("shifted", side, couple.provenance),
    )


def suspension_iso_sign(side: str, p: int) -> int:
    """Sign of the suspension isomorphism on ``E^{p,q}``: left ``(-1)^p``, right ``+1``."""
    if side == "left":
        return -1 if p % 2 else 1
    if side == "right":
        return 1
    raise SignError(f"unknown side {side!r}")


@dataclass(frozen=True)
class ShiftMismatch:
    side: str
    r: int
    at: Bidegree
    generator: int


@dataclass(frozen=True)
class ShiftReport:
    passed: bool
    pages_checked: int
    mismatches: list[ShiftMismatch]


def suspension_shift_check(couple: ExactCouple, sides=("left", "right"), max_page: int | None = None) -> ShiftReport:
    """Check that the suspension isomorphisms commute with every ``d_r``.

    For ``x`` in ``E_r^{p,q}`` this compares ``d_r'(phi x)`` with
    ``phi(d_r x)`` in the shifted couple, naming elements by ``E_1``
    representatives.
    """
    from .couple import global_stabilization_page

    N = max_page or global_stabilization_page(couple) + 1
    bad: list[ShiftMismatch] = []
    for side in sides:
        shifted = shift_couple(couple, side)
        for r in range(1, N + 1):
            P, Q = page(couple, r), page(shifted, r)
            for b in P.support():
                G = P.group(*b)
                d = P.differential(*b)
                tgt = Bidegree(b.p - 1, b.q + r)
                sb, st = Bidegree(b.p + 1, b.q), Bidegree(b.p, b.q + r)
                dq = Q.differential(*sb)
                for g, x in enumerate(G.basis()):
                    z = P.lift_to_e1(b.p, b.q, x)
                    phi_x = tuple(suspension_iso_sign(side, b.p) * v for v in Q.proj_from_e1(*sb, z))
                    lhs = dq(phi_x)
                    y = P.lift_to_e1(*tgt, d(x))
                    rhs = Q.proj_from_e1(*st, tuple(suspension_iso_sign(side, tgt.p) * v for v in y))
                    if tuple(lhs) != tuple(Q.group(*st).reduce(rhs)):
                        bad.append(ShiftMismatch(side, r, b, g))
    return ShiftReport(not bad, N, bad)

