"""Limit groups D_{I,d}, their normalizers R_{I,d}, and parahoric fixators.

Groups are represented intensionally: a descriptor carries the combinatorial
datum (type ``I``, Levi-chamber gaps ``d``, an optional conjugator) and
answers exact membership queries.  Finite generating samples at a chosen
depth stand in for the (infinite) groups wherever a check needs elements.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .building import (ChamberPoint, block_of, blocks, canonicalize_lattice, check_index_set,
                       fixator_bound, fixes_point, simple_roots)
from .errors import DescriptorError, DomainError, IndexSetError, NotUnimodularError
from .matrix import Matrix, weyl_elements
from .norms import AdditiveNorm, norm_to_chain
from .scalar import format_rational, parse_rational, valuation

KINDS = ("D", "R", "parahoric")


@dataclass(frozen=True)
class LimitGroupDescriptor:
    """``g . G . g^-1`` where ``G`` is ``D(I, d)``, ``R(I, d)`` or the fixator of ``point``.

    ``d`` is a tuple of ``(s, d_s)`` pairs for ``s`` in ``I``.
    """

    n: int
    kind: str
    I: frozenset = frozenset()
    d: tuple = ()
    point: Optional[ChamberPoint] = None
    conjugator: Optional[Matrix] = None
    p: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DescriptorError(f"unknown descriptor kind {self.kind!r}")
        if self.kind != "parahoric" and frozenset(self.I) == simple_roots(self.n) and self.n >= 2:
            # D_{S,d} = R_{S,d} is the parahoric at the point with gaps d
            gaps = dict(self.d)
            if set(gaps) != set(range(1, self.n)):
                raise DescriptorError("gaps d must be indexed exactly by I")
            object.__setattr__(self, "point", ChamberPoint.from_gaps([gaps[s] for s in range(1, self.n)]))
            object.__setattr__(self, "kind", "parahoric")
        if self.kind == "parahoric":
            if self.point is None or self.point.n != self.n:
                raise DescriptorError("parahoric descriptor needs an n-dimensional point")
            object.__setattr__(self, "I", simple_roots(self.n))
            object.__setattr__(self, "d", ())
        else:
            I = check_index_set(self.n, self.I)
            d = tuple(sorted((int(s), Fraction(x)) for s, x in dict(self.d).items()))
            if tuple(s for s, _ in d) != tuple(sorted(I)):
                raise DescriptorError("gaps d must be indexed exactly by I", I=sorted(I), d=d)
            if any(x < 0 for _, x in d):
                raise DescriptorError("gaps must be nonnegative")
            object.__setattr__(self, "I", I)
            object.__setattr__(self, "d", d)
        if self.conjugator is not None:
            g = self.conjugator
            if g.n != self.n or g.p != self.p:
                raise DescriptorError("conjugator has the wrong size or prime")
            if g.det() != 1:
                raise NotUnimodularError("conjugator must have determinant 1")
            if g == Matrix.identity(self.n, self.p):
                object.__setattr__(self, "conjugator", None)

    # structure

    @property
    def blocks(self) -> list:
        if self.kind == "parahoric":
            return [list(range(self.n))]
        return blocks(self.n, self.I)

    @property
    def coords(self) -> tuple:
        """Reference apartment coordinates; each block starts at 0."""
        if self.kind == "parahoric":
            return self.point.c
        g = dict(self.d)
        c = []
        for blk in self.blocks:
            x = Fraction(0)
            c.append(x)
            for i in blk[1:]:
                x += g[i]  # simple root i joins indices i-1, i (0-based)
                c.append(x)
        return tuple(c)

    @property
    def conj(self) -> Matrix:
        return self.conjugator if self.conjugator is not None else Matrix.identity(self.n, self.p)

    def conjugate(self, h: Matrix) -> LimitGroupDescriptor:
        """The descriptor of ``h . G . h^-1``."""
        return LimitGroupDescriptor(self.n, self.kind, self.I, self.d, self.point, h @ self.conj, self.p)

    def with_conjugator(self, g) -> LimitGroupDescriptor:
        return LimitGroupDescriptor(self.n, self.kind, self.I, self.d, self.point, g, self.p)

    def __str__(self):
        if self.kind == "parahoric":
            core = "K[" + ",".join(format_rational(x) for x in self.point.c) + "]"
        else:
            core = f"{self.kind}_{{{','.join(map(str, sorted(self.I)))}}}({','.join(format_rational(x) for _, x in self.d)})"
        return core if self.conjugator is None else f"g.{core}.g^-1"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "I": sorted(self.I), "d": [format_rational(x) for _, x in self.d]}
        if self.kind == "parahoric":
            out["point"] = self.point.to_json()
        if self.conjugator is not None:
            out["conjugator"] = self.conjugator.to_json()
        return out

    @classmethod
    def from_json(cls, obj, p: int = 2, n: Optional[int] = None) -> LimitGroupDescriptor:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise DescriptorError("descriptor object needs a 'kind'")
        kind = obj["kind"]
        conj = obj.get("conjugator")
        conj = Matrix.from_json(conj, p) if conj is not None else None
        if kind == "parahoric":
            if "point" not in obj:
                raise DescriptorError("parahoric descriptor needs a 'point'")
            pt = ChamberPoint.from_json(obj["point"])
            return cls(pt.n, "parahoric", point=pt, conjugator=conj, p=p)
        n = obj.get("n", n if n is not None else (conj.n if conj is not None else None))
        if n is None:
            raise DescriptorError("descriptor dimension unknown; pass n")
        I = sorted(int(s) for s in obj.get("I", []))
        dv = obj.get("d", [])
        if len(dv) != len(I):
            raise DescriptorError("d must have one entry per element of I")
        d = tuple(zip(I, (parse_rational(x) for x in dv)))
        return cls(int(n), kind, frozenset(I), d, None, conj, p)


def D(n: int, I=(), d=None, p: int = 2, conjugator=None) -> LimitGroupDescriptor:
    I = frozenset(I)
    if d is None:
        d = {s: 0 for s in I}
    return LimitGroupDescriptor(n, "D", I, tuple(dict(d).items()), None, conjugator, p)


def R(n: int, I=(), d=None, p: int = 2, conjugator=None) -> LimitGroupDescriptor:
    return normalizer(D(n, I, d, p, conjugator))


def parahoric(c, p: int = 2, conjugator=None) -> LimitGroupDescriptor:
    pt = c if isinstance(c, ChamberPoint) else ChamberPoint(c)
    return LimitGroupDescriptor(pt.n, "parahoric", point=pt, conjugator=conjugator, p=p)


# ---------------------------------------------------------------------------
# membership


def _block_ok(sub: Matrix, c) -> bool:
    det = sub.det()
    return det != 0 and valuation(det, sub.p) == 0 and fixes_point(sub, c)


def member_standard(desc: LimitGroupDescriptor, h: Matrix) -> bool:
    """Membership of ``h`` in the unconjugated group of ``desc``."""
    if desc.kind == "parahoric":
        return fixes_point(h, desc.point.c)
    lab = block_of(desc.n, desc.I)
    rows = h.rows
    for a in range(desc.n):
        for b in range(desc.n):
            if lab[a] > lab[b] and rows[a][b] != 0:
                return False
    c = desc.coords
    p = h.p
    for blk in desc.blocks:
        sub = h.block(blk)
        cb = [c[i] for i in blk]
        if desc.kind == "R":
            det = sub.det()
            if det == 0:
                return False
            v = valuation(det, p)
            if v % len(blk):
                return False
            sub = sub.scale(Fraction(p) ** (-(v // len(blk))))
        if not _block_ok(sub, cb):
            return False
    return True


def member(desc: LimitGroupDescriptor, g: Matrix) -> bool:
    if g.n != desc.n:
        raise DomainError("dimension mismatch", desc=desc.n, g=g.n)
    if g.det() != 1:
        raise NotUnimodularError("membership is tested on determinant-one elements", det=g.det())
    return _member_nocheck(desc, g)


def _member_nocheck(desc, g):
    if desc.conjugator is None:
        return member_standard(desc, g)
    c = desc.conjugator
    return member_standard(desc, _inverse(c) @ g @ c)


_INV_CACHE = {}


def _inverse(m: Matrix) -> Matrix:
    inv = _INV_CACHE.get(m)
    if inv is None:
        if len(_INV_CACHE) > 4096:
            _INV_CACHE.clear()
        inv = _INV_CACHE[m] = m.inverse()
    return inv


# ---------------------------------------------------------------------------
# generators and sampling


def _units(p: int):
    return [Fraction(-1), Fraction(1 + p)]


def standard_generators(desc: LimitGroupDescriptor, depth: int = 3) -> list:
    """``(id, g, g^-1)`` triples generating the unconjugated group up to ``depth``."""
    n, p = desc.n, desc.p
    c = desc.coords
    out = []
    if desc.kind == "parahoric":
        lab = [0] * n
    else:
        lab = block_of(n, desc.I)
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            if lab[a] == lab[b]:
                k = fixator_bound(c, a, b)
                lam = Fraction(p) ** k
                out.append((f"u{a + 1}{b + 1}(p^{k})", Matrix.elementary(n, a + 1, b + 1, lam, p),
                            Matrix.elementary(n, a + 1, b + 1, -lam, p)))
            elif lab[a] < lab[b]:
                for r in range(depth + 1):
                    lam = Fraction(p) ** (-r)
                    out.append((f"u{a + 1}{b + 1}(p^{-r})", Matrix.elementary(n, a + 1, b + 1, lam, p),
                                Matrix.elementary(n, a + 1, b + 1, -lam, p)))
    for i in range(n - 1):
        for u in _units(p):
            e = [1] * n
            e[i], e[i + 1] = u, 1 / u
            ei = [1] * n
            ei[i], ei[i + 1] = 1 / u, u
            out.append((f"h{i + 1}({format_rational(u)})", Matrix.diag(e, p), Matrix.diag(ei, p)))
    if desc.kind == "R":
        blks = desc.blocks
        for j in range(len(blks) - 1):
            k1, k2 = len(blks[j]), len(blks[j + 1])
            e = [Fraction(0)] * n
            for i in blks[j]:
                e[i] = k2
            for i in blks[j + 1]:
                e[i] = -k1
            out.append((f"t{j + 1}", Matrix.p_diag(e, p), Matrix.p_diag([-x for x in e], p)))
    return out


def generators(desc: LimitGroupDescriptor, depth: int = 3) -> list:
    """Conjugated generator triples ``(id, g, g^-1)``."""
    gens = standard_generators(desc, depth)
    if desc.conjugator is None:
        return gens
    c = desc.conjugator
    ci = _inverse(c)
    return [(i, c @ g @ ci, c @ gi @ ci) for i, g, gi in gens]


def sample(desc: LimitGroupDescriptor, rng: random.Random, max_len: int = 6, depth: int = 3) -> Matrix:
    gens = generators(desc, depth)
    return random_word(gens, rng, max_len)[0]


def random_word(gens, rng: random.Random, max_len: int):
    """Product of ``1..max_len`` random generators or inverses; returns ``(matrix, word)``."""
    length = rng.randint(1, max_len)
    word = []
    g = None
    for _ in range(length):
        i = rng.randrange(len(gens))
        inv = rng.random() < 0.5
        m = gens[i][2] if inv else gens[i][1]
        word.append((gens[i][0], inv))
        g = m if g is None else g @ m
    return g, word


def outside_witness(desc: LimitGroupDescriptor) -> Matrix:
    """``u_ba(1)``: a lower elementary matrix across the first block boundary (conjugated)."""
    if desc.kind == "parahoric":
        raise DescriptorError("parahoric groups have no block boundary")
    blks = desc.blocks
    a, b = blks[0][-1], blks[1][0]
    w = Matrix.elementary(desc.n, b + 1, a + 1, 1, desc.p)
    if desc.conjugator is None:
        return w
    return desc.conjugator @ w @ _inverse(desc.conjugator)


# ---------------------------------------------------------------------------
# structural operations


def limit_of(cls, conjugator: Optional[Matrix] = None, p: int = 2) -> LimitGroupDescriptor:
    """Limit group of the parahorics along a fundamental class."""
    if conjugator is not None:
        p = conjugator.p
    if cls.bounded:
        gaps = cls.gaps
        pt = ChamberPoint.from_gaps([gaps[s] for s in range(1, cls.n)])
        return parahoric(pt, p, conjugator)
    return D(cls.n, cls.I, cls.gaps, p, conjugator)


def normalizer(desc: LimitGroupDescriptor) -> LimitGroupDescriptor:
    if desc.kind == "parahoric":
        return desc
    if desc.kind != "D":
        raise DescriptorError("normalizer is defined here for D-kind descriptors")
    return LimitGroupDescriptor(desc.n, "R", desc.I, desc.d, None, desc.conjugator, desc.p)


def zariski_type(desc: LimitGroupDescriptor) -> frozenset:
    """Type of the parabolic that is the Zariski closure; ``S`` (the whole group) for parahorics."""
    return desc.I


def _facet_vertices(c, p: int) -> frozenset:
    """Lattice classes spanning the closed facet that contains the apartment point ``c``."""
    k = len(c)
    if k == 1:
        return frozenset()
    chain = norm_to_chain(AdditiveNorm(Matrix.identity(k, p), c))
    return frozenset(canonicalize_lattice(e.lattice).basis for e in chain)


def _moves_facet(m: Matrix, c1, c2) -> bool:
    p = m.p
    v1 = _facet_vertices(c1, p)
    v2 = _facet_vertices(c2, p)
    return frozenset(canonicalize_lattice(m @ b).basis for b in v1) == v2


def same_group(x: LimitGroupDescriptor, y: LimitGroupDescriptor) -> bool:
    """Exact equality of the groups described by ``x`` and ``y``."""
    if x.n != y.n or x.p != y.p:
        return False
    if (x.kind == "parahoric") != (y.kind == "parahoric"):
        return False
    if x.kind != y.kind or x.I != y.I:
        return False
    h = _inverse(y.conj) @ x.conj
    if x.kind == "parahoric":
        return _moves_facet(h, x.coords, y.coords)
    lab = block_of(x.n, x.I)
    for a in range(x.n):
        for b in range(x.n):
            if lab[a] > lab[b] and h[a, b] != 0:
                return False
    cx, cy = x.coords, y.coords
    for blk in x.blocks:
        if len(blk) == 1:
            continue
        if not _moves_facet(h.block(blk), [cx[i] for i in blk], [cy[i] for i in blk]):
            return False
    return True


def separating_witness(x: LimitGroupDescriptor, y: LimitGroupDescriptor, depth: int = 3):
    """An element in exactly one of the two groups, as ``(side, id, matrix)``; ``None`` if none found."""
    for side, a, b in (("left", x, y), ("right", y, x)):
        cands = [(i, g) for i, g, _ in generators(a, depth)]
        if a.kind != "parahoric":
            cands.append(("outside", outside_witness(a)))
        for i, g in cands:
            if _member_nocheck(a, g) and not _member_nocheck(b, g):
                return side, i, g
    return None


# ---------------------------------------------------------------------------
# Levi factors


@dataclass(frozen=True)
class LeviGroup:
    """Limit group ``D_{J in I, d}`` of the block group ``G_I = prod SL_{k_j}`` (``J = I``: a parahoric)."""

    n: int
    I: frozenset
    J: frozenset
    d: tuple
    p: int = 2

    def __post_init__(self):
        I = check_index_set(self.n, self.I)
        J = check_index_set(self.n, self.J)
        if not J <= I:
            raise IndexSetError("J must be contained in I", I=sorted(I), J=sorted(J))
        if not I:
            raise DescriptorError("the Levi factor of type {} is trivial")
        d = tuple(sorted((int(s), Fraction(v)) for s, v in dict(self.d).items()))
        if tuple(s for s, _ in d) != tuple(sorted(J)):
            raise DescriptorError("gaps must be indexed by J")
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "d", d)

    def member(self, g: Matrix) -> bool:
        """Membership for elements of ``G_I`` (block diagonal, determinant one on every I-block)."""
        lab_i = block_of(self.n, self.I)
        for a in range(self.n):
            for b in range(self.n):
                if lab_i[a] != lab_i[b] and g[a, b] != 0:
                    return False
        for blk in blocks(self.n, self.I):
            if g.block(blk).det() != 1:
                return False
        lab_j = block_of(self.n, self.J)
        for a in range(self.n):
            for b in range(self.n):
                if lab_j[a] > lab_j[b] and g[a, b] != 0:
                    return False
        ref = D(self.n, self.J, dict(self.d), self.p) if self.J != simple_roots(self.n) else \
            parahoric(ChamberPoint.from_gaps([dict(self.d)[s] for s in range(1, self.n)]), self.p)
        c = ref.coords
        for blk in blocks(self.n, self.J):
            if not _block_ok(g.block(blk), [c[i] for i in blk]):
                return False
        return True


def phi_embed(I, inner) -> LimitGroupDescriptor:
    """Ambient limit group ``(H . T^I_cpt) x U^I`` of a Levi limit group ``H``."""
    if not isinstance(inner, LeviGroup):
        raise DescriptorError("inner group must be a Levi limit-group descriptor")
    I = frozenset(I)
    if inner.I != I:
        raise IndexSetError("inner descriptor lives in a different Levi factor", I=sorted(I), inner=sorted(inner.I))
    if inner.J == simple_roots(inner.n):
        return parahoric(ChamberPoint.from_gaps([dict(inner.d)[s] for s in range(1, inner.n)]), inner.p)
    return D(inner.n, inner.J, dict(inner.d), inner.p)


def closed_orbit(n: int, p: int = 2) -> list:
    """The ``n!`` Weyl conjugates of ``D_empty``."""
    if n < 2:
        raise DomainError("n >= 2 required")
    return [D(n, (), None, p, w) for _, w in weyl_elements(n, p)]
