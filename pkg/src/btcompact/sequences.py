"""Affine vertex sequences in the closed Weyl chamber and their classification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .building import ChamberPoint, panel_gaps, simple_roots
from .errors import DomainError
from .matrix import Matrix
from .scalar import format_rational, parse_rational


class _Undecided:
    """Finite data is consistent with neither a divergent nor a convergent verdict."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDECIDED"

    def __bool__(self):
        return False


UNDECIDED = _Undecided()


@dataclass(frozen=True)
class SequenceSpec:
    """Vertices ``v_m = k . diag(p^(a m + b)) . o`` for ``m >= 1``."""

    n: int
    a: tuple
    b: tuple
    k: Optional[Matrix] = None

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        b = tuple(int(x) for x in self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.n < 2 or len(a) != self.n or len(b) != self.n:
            raise DomainError("slope and offset need n entries", n=self.n, a=a, b=b)
        if a[0] != 0 or b[0] != 0:
            raise DomainError("normalization a_1 = b_1 = 0 required", a=a, b=b)
        for s in range(self.n - 1):
            if a[s + 1] < a[s] or (a[s + 1] == a[s] and b[s + 1] < b[s]):
                raise DomainError("sequence does not eventually stay in the closed chamber", a=a, b=b)
        if self.k is not None:
            if self.k.n != self.n:
                raise DomainError("conjugator has the wrong size", n=self.n, k=self.k.n)
            if not self.k.is_unimodular_integral():
                raise DomainError("conjugator must be integral with integral inverse")

    def nu(self, m: int) -> tuple:
        return tuple(ai * m + bi for ai, bi in zip(self.a, self.b))

    def point(self, m: int) -> ChamberPoint:
        return ChamberPoint(self.nu(m))

    def prefix(self, length: int) -> list:
        return [self.point(m) for m in range(1, length + 1)]

    @property
    def conjugator(self) -> Matrix:
        return self.k if self.k is not None else Matrix.identity(self.n)

    def gap_offsets(self) -> tuple:
        return tuple(self.b[s + 1] - self.b[s] for s in range(self.n - 1))

    def to_json(self) -> dict:
        out = {"n": self.n, "a": list(self.a), "b": list(self.b)}
        if self.k is not None:
            out["k"] = self.k.to_json()
        return out

    @classmethod
    def from_json(cls, obj, p: int = 2) -> SequenceSpec:
        if not isinstance(obj, dict) or not {"n", "a", "b"} <= set(obj):
            raise DomainError("sequence spec needs n, a, b")
        k = obj.get("k")
        k = Matrix.from_json(k, p) if k is not None else None
        return cls(int(obj["n"]), tuple(obj["a"]), tuple(obj["b"]), k)


@dataclass(frozen=True)
class FundamentalClass:
    n: int
    I: frozenset
    d: tuple  # ((s, d_s), ...) for s in I, sorted
    bounded: bool

    @property
    def gaps(self) -> dict:
        return dict(self.d)

    @property
    def facet(self) -> dict:
        """Levi-chamber facet of the limit gaps: which gaps vanish, which are integral."""
        g = self.gaps
        return {"zero": sorted(s for s, x in g.items() if x == 0),
                "integral": sorted(s for s, x in g.items() if Fraction(x).denominator == 1)}

    def to_json(self) -> dict:
        return {"I": sorted(self.I), "d": [format_rational(x) for _, x in self.d],
                "bounded": self.bounded, "facet": self.facet}


def _make_class(n, I, gaps) -> FundamentalClass:
    I = frozenset(I)
    return FundamentalClass(n, I, tuple((s, Fraction(gaps[s])) for s in sorted(I)), I == simple_roots(n))


def classify(spec: SequenceSpec) -> FundamentalClass:
    """Exact type ``I`` and limit gaps ``d`` of an affine sequence; positive slopes diverge."""
    I = [s for s in range(1, spec.n) if spec.a[s] == spec.a[s - 1]]
    offs = spec.gap_offsets()
    return _make_class(spec.n, I, {s: offs[s - 1] for s in I})


def _constant(vals) -> bool:
    return all(v == vals[0] for v in vals)


def extract_fundamental(prefix, horizon: int):
    """Finite-data analogue of extracting an I-fundamental subsequence.

    A gap is divergent when its final value exceeds ``horizon`` without being
    constant on the last ``horizon`` terms; the terms where every divergent gap
    exceeds ``horizon`` form the extracted subsequence, on whose tail the
    remaining gaps must be constant.  Anything else is ``UNDECIDED``.
    """
    if not prefix:
        raise DomainError("empty prefix")
    pts = [x if isinstance(x, ChamberPoint) else ChamberPoint(x) for x in prefix]
    n = pts[0].n
    gaps = [panel_gaps(x) for x in pts]
    h = max(1, int(horizon))
    tail = gaps[-h:]
    J = {s for s in range(1, n)
         if gaps[-1][s - 1] > h and not _constant([g[s - 1] for g in tail])}
    sub = [g for g in gaps if all(g[s - 1] > h for s in J)]
    if not sub:
        return UNDECIDED
    sub_tail = sub[-h:]
    out = {}
    for s in range(1, n):
        if s in J:
            continue
        vals = [g[s - 1] for g in sub_tail]
        if not _constant(vals):
            return UNDECIDED
        out[s] = vals[0]
    return _make_class(n, out.keys(), out)


def gaps_from_json(values) -> tuple:
    return tuple(parse_rational(x) for x in values)
