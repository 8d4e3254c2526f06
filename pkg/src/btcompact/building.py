"""Lattice classes, local normal forms and apartment coordinates for SL_n.

Conventions
-----------
The vertex ``[L_nu]`` of the standard apartment is the class of
``L_nu = (+) O p^nu_i e_i``.  A group element ``g`` fixes the apartment point
with coordinates ``c`` iff ``val(g_ab) >= ceil(c_a - c_b)`` for all ``a, b``;
this single rule drives every parahoric membership test downstream.
Panel gaps are ``d_s = c_{s+1} - c_s``, so gaps are integral exactly on
vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DomainError, IndexSetError, NotUnimodularError, RankError
from .matrix import Matrix
from .scalar import INF, format_rational, frac_part, parse_rational, unit_part, valuation

# ---------------------------------------------------------------------------
# apartment geometry


@dataclass(frozen=True)
class ChamberPoint:
    """A point of the standard apartment, coordinates modulo constants (``c_1 = 0``)."""

    c: tuple

    def __post_init__(self):
        c = tuple(Fraction(x) for x in self.c)
        if len(c) < 2:
            raise DomainError("apartment points need n >= 2 coordinates", c=c)
        object.__setattr__(self, "c", tuple(x - c[0] for x in c))

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def in_chamber(self) -> bool:
        return all(self.c[i] <= self.c[i + 1] for i in range(self.n - 1))

    @property
    def is_vertex(self) -> bool:
        return all(x.denominator == 1 for x in self.c)

    def to_json(self) -> dict:
        return {"c": [format_rational(x) for x in self.c]}

    @classmethod
    def from_json(cls, obj) -> ChamberPoint:
        return cls(tuple(parse_rational(x) for x in obj["c"]))

    @classmethod
    def from_gaps(cls, d) -> ChamberPoint:
        c = [Fraction(0)]
        for x in d:
            c.append(c[-1] + Fraction(x))
        return cls(tuple(c))


def simple_roots(n: int) -> frozenset:
    """The index set ``S = {1, ..., n-1}``."""
    return frozenset(range(1, n))


def check_index_set(n: int, I) -> frozenset:
    I = frozenset(int(s) for s in I)
    if not I <= simple_roots(n):
        raise IndexSetError(f"{sorted(I)} is not a subset of S = {{1..{n - 1}}}", I=sorted(I), n=n)
    return I


def blocks(n: int, I) -> list:
    """Consecutive 0-based index blocks: ``i ~ i+1`` iff ``i+1 in I`` (1-based simple root)."""
    I = check_index_set(n, I)
    out = [[0]]
    for s in range(1, n):
        if s in I:
            out[-1].append(s)
        else:
            out.append([s])
    return out


def block_of(n: int, I) -> list:
    """``block_of(n, I)[i]`` is the number of the block containing index ``i``."""
    lab = []
    for k, b in enumerate(blocks(n, I)):
        lab.extend([k] * len(b))
    return lab


def panel_gaps(x: ChamberPoint) -> tuple:
    if not x.in_chamber:
        raise DomainError("point is outside the closed chamber", c=[str(v) for v in x.c])
    return tuple(x.c[s] - x.c[s - 1] for s in range(1, x.n))


def levi_project(x: ChamberPoint, I) -> dict:
    """I-indexed gaps of ``x``: its coordinates in the Levi chamber of type ``I``."""
    I = check_index_set(x.n, I)
    d = panel_gaps(x)
    return {s: d[s - 1] for s in sorted(I)}


def fixator_bound(c, a: int, b: int) -> int:
    """Least valuation allowed at entry (a, b) (0-based) for an element fixing ``c``."""
    return math.ceil(Fraction(c[a]) - Fraction(c[b]))


def fixes_point(g: Matrix, c) -> bool:
    """Fixator rule ``val(g_ab) >= ceil(c_a - c_b)`` on every entry."""
    p = g.p
    for a, row in enumerate(g.rows):
        for b, x in enumerate(row):
            if x and valuation(x, p) < fixator_bound(c, a, b):
                return False
    return True


@dataclass(frozen=True)
class HalfSpace:
    """The half-apartment ``{c_a - c_b <= bound}`` (1-based indices)."""

    a: int
    b: int
    bound: int

    def __call__(self, x) -> bool:
        c = x.c if isinstance(x, ChamberPoint) else tuple(Fraction(v) for v in x)
        return c[self.a - 1] - c[self.b - 1] <= self.bound

    contains = __call__

    def __str__(self):
        return f"c_{self.a} - c_{self.b} <= {self.bound}"


def fixed_half_space(a: int, b: int, lam, p: int) -> HalfSpace:
    """Fixed-point set in the standard apartment of ``u_ab(lam)``."""
    if a == b:
        raise IndexSetError("need a != b", a=a, b=b)
    lam = Fraction(lam)
    if lam == 0:
        raise DomainError("u_ab(0) is the identity and fixes everything")
    return HalfSpace(a, b, valuation(lam, p))


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class LatticeClass:
    """Homothety class of a full-rank lattice, stored by its canonical basis."""

    basis: Matrix

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def p(self) -> int:
        return self.basis.p

    def to_json(self) -> dict:
        return {"basis": self.basis.to_json()}


def _hermite_columns(basis: Matrix):
    """Lower-triangular column Hermite form over Z_(p); returns rows as lists."""
    p = basis.p
    n = basis.n
    a = [list(r) for r in basis.rows]
    for i in range(n):
        best, bj = INF, None
        for j in range(i, n):
            v = valuation(a[i][j], p)
            if v < best:
                best, bj = v, j
        if bj is None:
            raise RankError("basis is singular")
        if bj != i:
            for r in a:
                r[i], r[bj] = r[bj], r[i]
        u = unit_part(a[i][i], p)
        if u != 1:
            for r in a:
                r[i] = r[i] / u
        piv = a[i][i]
        for j in range(i + 1, n):
            f = a[i][j]
            if f:
                f = f / piv
                for r in a:
                    r[j] -= f * r[i]
    for i in range(1, n):
        v = valuation(a[i][i], p)
        scale = Fraction(p) ** v
        for j in range(i):
            x = a[i][j]
            rep = scale * frac_part(x / scale, p)
            if rep != x:
                q = (x - rep) / scale
                for r in range(i, n):
                    a[r][j] -= q * a[r][i]
    return a


def canonicalize_lattice(basis: Matrix) -> LatticeClass:
    """Canonical representative of the homothety class spanned by the columns of ``basis``."""
    a = _hermite_columns(basis)
    p = basis.p
    shift = min(valuation(r[0], p) for r in a)
    s = Fraction(p) ** (-shift)
    return LatticeClass(Matrix([[x * s for x in r] for r in a], p))


def apartment_vertex(nu, p: int) -> LatticeClass:
    return canonicalize_lattice(Matrix.p_diag(nu, p))


def act(g: Matrix, v: LatticeClass) -> LatticeClass:
    return canonicalize_lattice(g @ v.basis)


# ---------------------------------------------------------------------------
# Smith / Cartan / Iwasawa


def _local_smith(g: Matrix):
    """Return ``(Linv, diag_entries, Rinv)`` with ``g = Linv * diag * Rinv``, Linv, Rinv in GL_n(Z_(p))."""
    p = g.p
    n = g.n
    a = [list(r) for r in g.rows]
    one, zero = Fraction(1), Fraction(0)
    Linv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    Rinv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for t in range(n):
        best, bi, bj = INF, None, None
        for i in range(t, n):
            for j in range(t, n):
                v = valuation(a[i][j], p)
                if v < best:
                    best, bi, bj = v, i, j
        if bi is None:
            raise RankError("matrix is singular")
        if bi != t:
            a[t], a[bi] = a[bi], a[t]
            for r in Linv:
                r[t], r[bi] = r[bi], r[t]
        if bj != t:
            for r in a:
                r[t], r[bj] = r[bj], r[t]
            Rinv[t], Rinv[bj] = Rinv[bj], Rinv[t]
        piv = a[t][t]
        for i in range(t + 1, n):
            f = a[i][t]
            if f:
                f = f / piv
                a[i] = [x - f * y for x, y in zip(a[i], a[t])]
                # row_i += -f row_t  =>  Linv col_t += f col_i
                for r in Linv:
                    r[t] += f * r[i]
        for j in range(t + 1, n):
            f = a[t][j]
            if f:
                f = f / piv
                for r in a:
                    r[j] -= f * r[t]
                # col_j += -f col_t  =>  Rinv row_t += f row_j
                Rinv[t] = [x + f * y for x, y in zip(Rinv[t], Rinv[j])]
    return Linv, [a[t][t] for t in range(n)], Rinv


def smith_invariants(g: Matrix) -> tuple:
    """Elementary-divisor exponents of ``g`` over Z_(p), nondecreasing."""
    _, diag, _ = _local_smith(g)
    return tuple(valuation(x, g.p) for x in diag)


@dataclass(frozen=True)
class CartanForm:
    k1: Matrix
    nu: tuple
    k2: Matrix

    def product(self) -> Matrix:
        return self.k1 @ Matrix.p_diag(self.nu, self.k1.p) @ self.k2

    def to_json(self) -> dict:
        return {"k1": self.k1.to_json(), "nu": list(self.nu), "k2": self.k2.to_json()}


def cartan_decompose(g: Matrix, normalize: bool = False) -> CartanForm:
    """``g = k1 diag(p^nu) k2`` with ``k1, k2`` in GL_n(Z_(p)) and ``nu`` nondecreasing.

    With ``normalize=True`` the unit determinants are folded so both ``k1`` and ``k2`` lie in SL_n.
    """
    if g.det() != 1:
        raise NotUnimodularError("Cartan decomposition needs det(g) = 1", det=g.det())
    p = g.p
    Linv, diag, Rinv = _local_smith(g)
    nu = tuple(valuation(x, p) for x in diag)
    units = [unit_part(x, p) for x in diag]
    k1 = Matrix(Linv, p) @ Matrix.diag(units, p)
    k2 = Matrix(Rinv, p)
    if normalize:
        delta = k2.det()
        fold = [delta] + [1] * (g.n - 1)
        k1 = k1 @ Matrix.diag(fold, p)
        k2 = Matrix.diag([1 / delta] + [1] * (g.n - 1), p) @ k2
    return CartanForm(k1, nu, k2)


@dataclass(frozen=True)
class IwasawaForm:
    k: Matrix
    t: Matrix
    u: Matrix

    def product(self) -> Matrix:
        return self.k @ self.t @ self.u

    def to_json(self) -> dict:
        return {"k": self.k.to_json(), "t": self.t.to_json(), "u": self.u.to_json()}


def iwasawa_decompose(g: Matrix) -> IwasawaForm:
    """``g = k t u``: ``k`` in SL_n(Z_(p)), ``t`` a diagonal p-power, ``u`` lower unipotent."""
    if g.det() != 1:
        raise NotUnimodularError("Iwasawa decomposition needs det(g) = 1", det=g.det())
    p = g.p
    n = g.n
    a = [list(r) for r in g.rows]
    one, zero = Fraction(1), Fraction(0)
    Linv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for j in range(n - 1, -1, -1):
        best, bi = INF, None
        for i in range(j + 1):
            v = valuation(a[i][j], p)
            if v < best:
                best, bi = v, i
        if bi is None:
            raise RankError("matrix is singular")
        if bi != j:
            a[j], a[bi] = a[bi], a[j]
            for r in Linv:
                r[j], r[bi] = r[bi], r[j]
        piv = a[j][j]
        for i in range(j):
            f = a[i][j]
            if f:
                f = f / piv
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
                for r in Linv:
                    r[j] += f * r[i]
    diag = [a[i][i] for i in range(n)]
    units = [unit_part(x, p) for x in diag]
    nu = [valuation(x, p) for x in diag]
    k = Matrix(Linv, p) @ Matrix.diag(units, p)
    t = Matrix.p_diag(nu, p)
    u = Matrix([[a[i][j] / diag[i] for j in range(n)] for i in range(n)], p)
    return IwasawaForm(k, t, u)


# ---------------------------------------------------------------------------
# vertex coordinates


@dataclass(frozen=True)
class VertexCoords:
    """Chamber representative of a vertex.

    ``vertex == k . [L_c]``; ``permutation`` is set for vertices of the standard
    apartment and lists, for each chamber slot, the original coordinate index.
    """

    point: ChamberPoint
    k: Matrix
    permutation: Optional[tuple] = field(default=None)

    def to_json(self) -> dict:
        out = {"c": [format_rational(x) for x in self.point.c], "k": self.k.to_json()}
        out["permutation"] = None if self.permutation is None else [i + 1 for i in self.permutation]
        return out


def vertex_coords(v: LatticeClass) -> VertexCoords:
    Linv, diag, _ = _local_smith(v.basis)
    p = v.p
    nu = [valuation(x, p) for x in diag]
    units = [unit_part(x, p) for x in diag]
    k = Matrix(Linv, p) @ Matrix.diag(units, p)
    point = ChamberPoint(tuple(x - nu[0] for x in nu))
    b = v.basis
    perm = None
    if all(b[i, j] == 0 for i in range(b.n) for j in range(b.n) if i != j):
        vals = [valuation(b[i, i], p) for i in range(b.n)]
        perm = tuple(sorted(range(b.n), key=lambda i: (vals[i], i)))
    return VertexCoords(point, k, perm)


def vertex_of_point(c, p: int) -> LatticeClass:
    """Lattice class of an integral apartment point."""
    c = c.c if isinstance(c, ChamberPoint) else tuple(Fraction(x) for x in c)
    if any(x.denominator != 1 for x in c):
        raise DomainError("not a vertex", c=[str(x) for x in c])
    return apartment_vertex([int(x) for x in c], p)
