"""Exact n x n matrices over Q with a distinguished prime."""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .errors import DimensionError, NotUnimodularError, RankError
from .scalar import INF, PAdicScalar, ScalarConfig, format_rational, parse_rational, valuation

_ONE = Fraction(1)
_ZERO = Fraction(0)


class Matrix:
    """Immutable square matrix of Fractions; ``p`` is the prime used for valuations."""

    __slots__ = ("rows", "p", "_hash")

    def __init__(self, rows, p: int = 2):
        rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise DimensionError("matrix must be square and non-empty", shape=[len(r) for r in rows])
        self.rows = rows
        self.p = p
        self._hash = None

    @classmethod
    def _raw(cls, rows, p):
        m = cls.__new__(cls)
        m.rows = rows
        m.p = p
        m._hash = None
        return m

    # constructors

    @classmethod
    def identity(cls, n: int, p: int = 2) -> Matrix:
        return cls._raw(tuple(tuple(_ONE if i == j else _ZERO for j in range(n)) for i in range(n)), p)

    @classmethod
    def diag(cls, entries, p: int = 2) -> Matrix:
        entries = [Fraction(x) for x in entries]
        n = len(entries)
        return cls._raw(tuple(tuple(entries[i] if i == j else _ZERO for j in range(n)) for i in range(n)), p)

    @classmethod
    def p_diag(cls, exponents, p: int = 2) -> Matrix:
        """``diag(p^e_1, ..., p^e_n)``."""
        return cls.diag([Fraction(p) ** int(e) for e in exponents], p)

    @classmethod
    def elementary(cls, n: int, a: int, b: int, lam, p: int = 2) -> Matrix:
        """``u_ab(lam) = id + lam E_ab`` with 1-based indices."""
        if a == b:
            raise DimensionError("elementary matrix needs a != b", a=a, b=b)
        rows = [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]
        rows[a - 1][b - 1] = Fraction(lam)
        return cls._raw(tuple(tuple(r) for r in rows), p)

    @classmethod
    def permutation(cls, perm, p: int = 2, signed: bool = True) -> Matrix:
        """Matrix sending ``e_j`` to ``e_perm[j]`` (0-based), sign-fixed to determinant one."""
        n = len(perm)
        rows = [[_ZERO] * n for _ in range(n)]
        for j, i in enumerate(perm):
            rows[i][j] = _ONE
        if signed and _perm_sign(perm) < 0:
            rows[perm[0]][0] = -_ONE
        return cls._raw(tuple(tuple(r) for r in rows), p)

    # basic protocol

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def scalar(self, i: int, j: int) -> PAdicScalar:
        return PAdicScalar(self.rows[i][j], ScalarConfig(self.p))

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.p == other.p and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.p))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self.rows)
        return f"Matrix([{body}], p={self.p})"

    def _check(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError("dimension mismatch", left=self.n, right=other.n)
        if other.p != self.p:
            raise DimensionError("prime mismatch", left=self.p, right=other.p)
        return other

    def __matmul__(self, other) -> Matrix:
        other = self._check(other)
        cols = tuple(zip(*other.rows))
        return Matrix._raw(
            tuple(tuple(sum((a * b for a, b in zip(r, c) if a and b), _ZERO) for c in cols)
                  for r in self.rows),
            self.p,
        )

    def __add__(self, other) -> Matrix:
        other = self._check(other)
        return Matrix._raw(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.p)

    def __sub__(self, other) -> Matrix:
        other = self._check(other)
        return Matrix._raw(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)), self.p)

    def scale(self, lam) -> Matrix:
        lam = Fraction(lam)
        return Matrix._raw(tuple(tuple(lam * a for a in r) for r in self.rows), self.p)

    def transpose(self) -> Matrix:
        return Matrix._raw(tuple(zip(*self.rows)), self.p)

    def column(self, j: int):
        return tuple(r[j] for r in self.rows)

    def apply(self, vec):
        return tuple(sum(a * Fraction(x) for a, x in zip(r, vec)) for r in self.rows)

    def with_prime(self, p: int) -> Matrix:
        return Matrix._raw(self.rows, p)

    def block(self, idx) -> Matrix:
        """Principal submatrix on the 0-based index list ``idx``."""
        return Matrix._raw(tuple(tuple(self.rows[i][j] for j in idx) for i in idx), self.p)

    # exact linear algebra

    def det(self) -> Fraction:
        a = [list(r) for r in self.rows]
        n = self.n
        det = _ONE
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] != 0), None)
            if piv is None:
                return _ZERO
            if piv != c:
                a[c], a[piv] = a[piv], a[c]
                det = -det
            pv = a[c][c]
            det *= pv
            for r in range(c + 1, n):
                f = a[r][c]
                if f:
                    f /= pv
                    row_c = a[c]
                    a[r] = [x - f * y for x, y in zip(a[r], row_c)]
        return det

    def inverse(self) -> Matrix:
        n = self.n
        a = [list(r) + [_ONE if i == j else _ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] != 0), None)
            if piv is None:
                raise RankError("matrix is singular")
            a[c], a[piv] = a[piv], a[c]
            pv = a[c][c]
            if pv != 1:
                a[c] = [x / pv for x in a[c]]
            row_c = a[c]
            for r in range(n):
                if r != c:
                    f = a[r][c]
                    if f:
                        a[r] = [x - f * y for x, y in zip(a[r], row_c)]
        return Matrix._raw(tuple(tuple(r[n:]) for r in a), self.p)

    def charpoly(self):
        """Coefficients ``[1, c_1, ..., c_n]`` of ``det(x I - self)`` (Berkowitz, division free)."""
        return charpoly_coeffs(self.rows)

    # valuations

    def valuation(self, i: int, j: int):
        return valuation(self.rows[i][j], self.p)

    def min_valuation(self):
        return min((valuation(x, self.p) for r in self.rows for x in r), default=INF)

    def is_integral(self) -> bool:
        p = self.p
        return all(x.denominator % p != 0 for r in self.rows for x in r)

    def is_unimodular_integral(self) -> bool:
        """Integral with integral inverse, i.e. an element of GL_n(Z_(p))."""
        if not self.is_integral():
            return False
        d = self.det()
        return d != 0 and valuation(d, self.p) == 0

    def require_sl(self) -> Matrix:
        if self.det() != 1:
            raise NotUnimodularError("group element must have determinant 1", det=self.det())
        return self

    # serialization

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [[format_rational(x) for x in r] for r in self.rows]}

    @classmethod
    def from_json(cls, obj, p: int = 2, group: bool = False) -> Matrix:
        if isinstance(obj, dict):
            if "entries" not in obj:
                raise DimensionError("matrix object needs 'entries'")
            entries = obj["entries"]
            n_decl = obj.get("n")
        else:
            entries = obj
            n_decl = None
        if not isinstance(entries, list) or not entries or not all(isinstance(r, list) for r in entries):
            raise DimensionError("matrix entries must be a non-empty list of rows")
        n = len(entries)
        if any(len(r) != n for r in entries):
            raise DimensionError("ragged or non-square matrix", rows=[len(r) for r in entries])
        if n_decl is not None and n_decl != n:
            raise DimensionError("declared n disagrees with entries", n=n_decl, rows=n)
        m = cls([[parse_rational(x) for x in r] for r in entries], p)
        if group:
            m.require_sl()
        return m


def charpoly_coeffs(rows):
    """Berkowitz's algorithm on a list of rows over any commutative ring."""
    n = len(rows)
    poly = [1]
    for r in range(n):
        a = rows[r][r]
        R = rows[r][:r]
        v = [rows[i][r] for i in range(r)]
        col = [1, -a]
        for _ in range(r):
            col.append(-sum(x * y for x, y in zip(R, v)))
            v = [sum(rows[i][j] * v[j] for j in range(r)) for i in range(r)]
        lp = len(poly)
        poly = [sum(col[i - j] * poly[j] for j in range(max(0, i - r - 1), min(i, lp - 1) + 1))
                for i in range(r + 2)]
    return poly


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def weyl_elements(n: int, p: int = 2):
    """Signed permutation matrices of determinant one, one per element of S_n."""
    return [(perm, Matrix.permutation(perm, p)) for perm in permutations(range(n))]
