"""The Bruhat-Tits tree of SL_2 over Q with the p-adic valuation.

Vertices are lattice classes in Q^2, ends are rational lines ``[x : y]``
(or a ray spec that resolves to one), and boundary measures live on the
finite cylinder algebra of a chosen depth around a root.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .building import LatticeClass, apartment_vertex, canonicalize_lattice, smith_invariants
from .errors import DimensionError, DomainError, NotUnimodularError, ResolutionError, UnsupportedEndError
from .matrix import Matrix
from .scalar import format_rational, parse_rational, valuation
from .sequences import SequenceSpec

TreeVertex = LatticeClass


def tree_vertex(basis, p: int = 2) -> TreeVertex:
    m = basis if isinstance(basis, Matrix) else Matrix(basis, p)
    if m.n != 2:
        raise DimensionError("tree vertices are lattice classes in Q^2", n=m.n)
    return canonicalize_lattice(m)


def root(p: int = 2) -> TreeVertex:
    return apartment_vertex((0, 0), p)


def neighbors(v: TreeVertex) -> list:
    """The ``p + 1`` index-``p`` sublattice classes of ``v``."""
    b, p = v.basis, v.p
    out = [canonicalize_lattice(b @ Matrix([[1, 0], [i, p]], p)) for i in range(p)]
    out.append(canonicalize_lattice(b @ Matrix([[p, 0], [0, 1]], p)))
    return out


def distance(v: TreeVertex, w: TreeVertex) -> int:
    e = smith_invariants(v.basis.inverse() @ w.basis)
    return e[-1] - e[0]


@dataclass(frozen=True)
class TreeEnd:
    """An end given by a rational line ``[x : y]`` or by a ray ``SequenceSpec`` with n = 2."""

    proj: Optional[tuple] = None
    ray: Optional[SequenceSpec] = None

    def __post_init__(self):
        if (self.proj is None) == (self.ray is None):
            raise DomainError("an end is either a projective point or a ray spec")
        if self.proj is not None:
            x, y = (Fraction(t) for t in self.proj)
            if x == 0 and y == 0:
                raise DomainError("[0 : 0] is not a projective point")
            object.__setattr__(self, "proj", (x, y))
        elif self.ray.n != 2:
            raise DimensionError("tree rays come from n = 2 sequence specs", n=self.ray.n)

    def line(self) -> tuple:
        """The rational direction of the end."""
        if self.proj is not None:
            return self.proj
        if self.ray.a[1] <= 0:
            raise ResolutionError("bounded sequence spec does not define an end", a=list(self.ray.a))
        k = self.ray.conjugator
        return (k[0, 0], k[1, 0])

    def to_json(self) -> dict:
        if self.proj is not None:
            return {"proj": [format_rational(t) for t in self.proj]}
        return {"ray": self.ray.to_json()}

    @classmethod
    def from_json(cls, obj, p: int = 2) -> TreeEnd:
        if isinstance(obj, dict) and "proj" in obj:
            vals = obj["proj"]
            if not isinstance(vals, list) or len(vals) != 2:
                raise DomainError("proj needs two coordinates")
            return cls(proj=tuple(parse_rational(t) if isinstance(t, str) else Fraction(t) for t in vals))
        if isinstance(obj, dict) and "ray" in obj:
            return cls(ray=SequenceSpec.from_json(obj["ray"], p))
        raise DomainError("end JSON needs 'proj' or 'ray'")


def _adapted_basis(v: TreeVertex, xi: TreeEnd) -> Matrix:
    """``B W`` with ``B`` the basis of ``v`` and ``W`` in GL_2(Z_(p)) whose first column points at ``xi``."""
    b, p = v.basis, v.p
    w = b.inverse().apply(xi.line())
    s = Fraction(p) ** (-min(valuation(t, p) for t in w if t))
    w0, w1 = w[0] * s, w[1] * s
    if w0 and valuation(w0, p) == 0:
        W = Matrix([[w0, 0], [w1, 1]], p)
    else:
        W = Matrix([[w0, 1], [w1, 0]], p)
    return b @ W


def ray(v: TreeVertex, xi: TreeEnd, m: int) -> TreeVertex:
    """The ``m``-th vertex on the geodesic ray ``[v, xi)``."""
    if m < 0:
        raise DomainError("ray index must be nonnegative", m=m)
    bw = _adapted_basis(v, xi)
    return canonicalize_lattice(bw @ Matrix.p_diag((0, m), v.p))


def busemann(v: TreeVertex, xi: TreeEnd, base: TreeVertex) -> int:
    """``beta_{base, xi}(v)``; equals ``-n`` at the n-th vertex of ``[base, xi)``."""
    m = distance(base, v) + 1
    return distance(v, ray(base, xi, m)) - m


def sphere(o: TreeVertex, k: int) -> list:
    """``(id, vertex)`` pairs at distance ``k`` from ``o``; ids are dotted neighbor indices."""
    if k < 1:
        raise DomainError("cylinder depth must be at least 1", k=k)
    layer = [(str(i), w, o) for i, w in enumerate(neighbors(o))]
    for _ in range(k - 1):
        nxt = []
        for cid, w, parent in layer:
            j = 0
            for u in neighbors(w):
                if u == parent:
                    continue
                nxt.append((f"{cid}.{j}", u, w))
                j += 1
        layer = nxt
    return [(cid, w) for cid, w, _ in layer]


@dataclass(frozen=True)
class CylinderMeasure:
    """Exact masses of the depth-``depth`` cylinders seen from ``root``."""

    root: TreeVertex
    depth: int
    base: TreeVertex
    cylinders: tuple  # ((id, vertex, mass), ...)

    def mass(self, cid: str) -> Fraction:
        for i, _, m in self.cylinders:
            if i == cid:
                return m
        raise DomainError("unknown cylinder id", id=cid)

    def mass_at(self, w: TreeVertex) -> Fraction:
        for _, u, m in self.cylinders:
            if u == w:
                return m
        raise DomainError("vertex is not a depth-k cylinder vertex")

    def total(self) -> Fraction:
        return sum((m for _, _, m in self.cylinders), Fraction(0))

    def to_json(self) -> dict:
        return {"root": self.root.to_json(), "depth": self.depth, "base": self.base.to_json(),
                "masses": {i: format_rational(m) for i, _, m in self.cylinders}}


def visual_measure(v: TreeVertex, k: int, o: Optional[TreeVertex] = None) -> CylinderMeasure:
    """The stabilizer-invariant probability measure ``mu_v`` on depth-``k`` cylinders around ``o``.

    Computed from the uniform measure ``mu_o`` and the density ``q^(-beta_{o,xi}(v))``,
    refined to a depth where the density is constant on cylinders.
    """
    p = v.p
    o = root(p) if o is None else o
    q = p
    K = max(k, distance(o, v))
    base_mass = Fraction(1, (q + 1) * q ** (K - 1))
    masses = {}
    for cid, u in sphere(o, K):
        beta = distance(v, u) - K
        key = ".".join(cid.split(".")[:k])
        masses[key] = masses.get(key, Fraction(0)) + base_mass * Fraction(q) ** (-beta)
    cyls = tuple((cid, w, masses[cid]) for cid, w in sphere(o, k))
    return CylinderMeasure(o, k, v, cyls)


def cylinder_of(xi: TreeEnd, o: TreeVertex, k: int) -> TreeVertex:
    return ray(o, xi, k)


def weakstar_gap(mu: CylinderMeasure, xi: TreeEnd) -> Fraction:
    """``1 - mu(C_k(xi))``."""
    return 1 - mu.mass_at(cylinder_of(xi, mu.root, mu.depth))


def closed_form_mass(v: TreeVertex, w: TreeVertex, o: TreeVertex) -> Fraction:
    """Mass of the cylinder ``C_w`` (seen from ``o``) under ``mu_v``, by shadow geometry."""
    q = v.p
    k = distance(o, w)
    # v lies in the subtree through w iff the geodesic from o to v passes through w
    if distance(o, v) == k + distance(w, v):
        return 1 - Fraction(1, q + 1) * Fraction(q) ** (-distance(v, w))
    return Fraction(1, q + 1) * Fraction(q) ** (-(distance(v, w) - 1))


def end_stabilizer_member(xi: TreeEnd, g: Matrix, horo: bool = False) -> bool:
    """``g xi = xi``; with ``horo`` also ``g`` preserves every horosphere centred at ``xi``."""
    if g.n != 2:
        raise DimensionError("tree elements are 2 x 2", n=g.n)
    if g.det() != 1:
        raise NotUnimodularError("end stabilizers are tested on SL_2", det=g.det())
    if xi.proj is None:
        raise UnsupportedEndError("only rational projective ends are supported here")
    x, y = xi.proj
    gx, gy = g.apply((x, y))
    if gx * y - gy * x != 0:
        return False
    if not horo:
        return True
    lam = gx / x if x else gy / y
    return valuation(lam, g.p) == 0
