"""The closed Weyl chamber compactified as ``[0, inf]^S`` and its stratification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .building import ChamberPoint, simple_roots
from .errors import DomainError
from .limits import D, normalizer, parahoric, same_group, separating_witness
from .scalar import INF, format_rational, parse_rational
from .sequences import UNDECIDED


class _Divergent:
    def __repr__(self):
        return "DIVERGENT"

    def __bool__(self):
        return False


DIVERGENT = _Divergent()


def _coord(x):
    if x == INF or (isinstance(x, str) and x.strip().lower() in ("inf", "oo", "infinity")):
        return INF
    v = parse_rational(x) if isinstance(x, str) else Fraction(x)
    if v < 0:
        raise DomainError("chamber parameters are nonnegative", value=str(v))
    return v


@dataclass(frozen=True)
class PolyhedralPoint:
    """Chamber parameters ``d_s`` in ``[0, inf]``, one per simple root."""

    d: tuple

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(_coord(x) for x in self.d))
        if not self.d:
            raise DomainError("need at least one simple root")

    @property
    def n(self) -> int:
        return len(self.d) + 1

    def to_json(self) -> dict:
        return {"d": ["inf" if x == INF else format_rational(x) for x in self.d]}

    @classmethod
    def from_json(cls, obj) -> PolyhedralPoint:
        if not isinstance(obj, dict) or "d" not in obj:
            raise DomainError("polyhedral point needs 'd'")
        return cls(tuple(obj["d"]))


def stratum(x: PolyhedralPoint) -> frozenset:
    """``I(d) = {s : d_s < inf}``."""
    return frozenset(s for s, v in enumerate(x.d, start=1) if v != INF)


def _symbolic_limit(expr):
    import sympy

    m = sympy.Symbol("m", positive=True, integer=True)
    try:
        e = sympy.sympify(expr, locals={"m": m}) if isinstance(expr, str) else expr
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise DomainError(f"cannot parse component {expr!r}") from exc
    try:
        lim = sympy.limit(e, m, sympy.oo)
    except (NotImplementedError, ValueError, TypeError):
        return UNDECIDED
    if lim is sympy.oo:
        return INF
    if isinstance(lim, sympy.AccumBounds) or not lim.is_Rational:
        return DIVERGENT
    v = Fraction(int(lim.p), int(lim.q))
    if v < 0:
        raise DomainError("component tends to a negative value", expr=str(expr))
    return v


def _finite_limit(values, horizon: int):
    h = max(1, int(horizon))
    tail = values[-h:]
    if all(v == tail[0] for v in tail):
        return tail[0]
    if all(v != INF for v in tail) and all(a <= b for a, b in zip(tail, tail[1:])) and tail[-1] > h:
        return INF
    return UNDECIDED


def poly_limit(seq, horizon: int = 12):
    """Componentwise limit in ``[0, inf]``.

    ``seq`` is either a list of component expressions in ``m`` (strings such as
    ``"1/m"`` or ``"m"``; an expression sympy cannot settle gives
    ``UNDECIDED``), or a finite list of :class:`PolyhedralPoint`, read
    with horizon semantics.
    """
    if not seq:
        raise DomainError("empty sequence")
    if all(isinstance(x, PolyhedralPoint) for x in seq):
        k = len(seq[0].d)
        out = []
        for s in range(k):
            v = _finite_limit([x.d[s] for x in seq], horizon)
            if v is UNDECIDED:
                return UNDECIDED
            out.append(v)
        return PolyhedralPoint(tuple(out))
    out = []
    for e in seq:
        v = _symbolic_limit(e)
        if v is DIVERGENT or v is UNDECIDED:
            return v
        out.append(v)
    return PolyhedralPoint(tuple(out))


def D_map(x: PolyhedralPoint, p: int = 2):
    I = stratum(x)
    if I == simple_roots(x.n):
        return parahoric(ChamberPoint.from_gaps(x.d), p)
    return D(x.n, I, {s: x.d[s - 1] for s in I}, p)


def P_map(x: PolyhedralPoint, p: int = 2):
    return normalizer(D_map(x, p))


def facet_equal(x: PolyhedralPoint, y: PolyhedralPoint, p: int = 2) -> bool:
    return same_group(D_map(x, p), D_map(y, p))


def facet_witness(x: PolyhedralPoint, y: PolyhedralPoint, p: int = 2, depth: int = 3):
    """``None`` when the groups agree, else ``(side, generator-id, matrix)`` separating them."""
    dx, dy = D_map(x, p), D_map(y, p)
    if same_group(dx, dy):
        return None
    return separating_witness(dx, dy, depth)
