"""Goldman-Iwahori additive norms and their lattice-chain (barycentric) form."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .building import LatticeClass, canonicalize_lattice
from .errors import DomainError, RankError, RepresentationError
from .matrix import Matrix
from .scalar import INF, format_rational, valuation


class AdditiveNorm:
    """``gamma(sum lam_i b_i) = min_i (val(lam_i) - c_i)`` for an adapted basis ``b``."""

    def __init__(self, basis: Matrix, c):
        c = tuple(Fraction(x) for x in c)
        if len(c) != basis.n:
            raise RepresentationError("one weight per basis vector required", n=basis.n, weights=len(c))
        try:
            self._inv = basis.inverse()
        except RankError as exc:
            raise RepresentationError("adapted basis must be invertible") from exc
        self.basis = basis
        self.c = c

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def n(self) -> int:
        return self.basis.n

    def coordinates(self, x):
        return self._inv.apply(x)

    def __call__(self, x):
        lam = self.coordinates(x)
        p = self.p
        return min((valuation(l, p) - ci for l, ci in zip(lam, self.c) if l), default=INF)

    @property
    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.c)

    def to_json(self) -> dict:
        return {"basis": self.basis.to_json(), "c": [format_rational(x) for x in self.c]}


def norm_from_lattice(M) -> AdditiveNorm:
    """``gamma_M(x) = sup{k : x in p^k M}`` for the lattice spanned by a basis (or class)."""
    basis = M.basis if isinstance(M, LatticeClass) else M
    return AdditiveNorm(basis, [0] * basis.n)


def lattice_of_norm(gamma: AdditiveNorm) -> Matrix:
    """Basis of ``M_gamma = gamma^-1([0, inf])`` for an integral-valued norm."""
    if not gamma.is_integral:
        raise DomainError("lattice of a norm needs integral weights", c=[str(x) for x in gamma.c])
    return gamma.basis @ Matrix.p_diag([int(x) for x in gamma.c], gamma.p)


@dataclass(frozen=True)
class ChainEntry:
    lattice: Matrix
    weight: Fraction

    @property
    def cls(self) -> LatticeClass:
        return canonicalize_lattice(self.lattice)

    def norm(self) -> AdditiveNorm:
        return norm_from_lattice(self.lattice)

    def to_json(self) -> dict:
        return {"class": self.cls.to_json(), "lattice": self.lattice.to_json(),
                "weight": format_rational(self.weight)}


def norm_to_chain(gamma: AdditiveNorm) -> list:
    """Weighted lattices ``M_0 < ... < M_n`` with ``gamma = sum (c_{i+1} - c_i) gamma_{M_i}``.

    Zero-weight members are dropped; an integral-valued norm yields a single lattice.
    """
    p, n = gamma.p, gamma.n
    floors = [math.floor(x) for x in gamma.c]
    fracs = [x - f for x, f in zip(gamma.c, floors)]
    shifted = gamma.basis @ Matrix.p_diag(floors, p)
    cols = [shifted.column(j) for j in range(n)]
    levels = [Fraction(0)] + sorted(fracs) + [Fraction(1)]
    out = []
    for i in range(n + 1):
        w = levels[i + 1] - levels[i]
        if w <= 0:
            continue
        thr = levels[i]
        vecs = [col if fracs[j] <= thr else tuple(p * x for x in col) for j, col in enumerate(cols)]
        out.append(ChainEntry(Matrix(list(zip(*vecs)), p), w))
    return out


def chain_value(chain, x):
    """Evaluate the barycentre ``sum w_i gamma_{M_i}(x)``."""
    vals = [e.norm()(x) for e in chain]
    if any(v == INF for v in vals):
        return INF
    return sum((e.weight * v for e, v in zip(chain, vals)), Fraction(0))
