"""Distality via Newton polygons, sampled distality of generated groups, and a small catalog.

A matrix is distal when every eigenvalue has valuation 0.  For ``det = 1``
that holds iff all characteristic-polynomial coefficients are integral and
the constant term is a unit.  In SL_n this agrees with the adjoint
criterion: vanishing valuations of all eigenvalue ratios force equal
valuations, and ``det = 1`` pins them to 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .building import ChamberPoint, fixes_point
from .errors import UnknownCatalogEntry
from .limits import (LimitGroupDescriptor, closed_orbit, generators, member, parahoric, same_group,
                     standard_generators, D)
from .matrix import Matrix, charpoly_coeffs
from .scalar import INF, valuation


@dataclass(frozen=True)
class DistalReport:
    valuations: tuple  # valuations of charpoly coefficients c_1..c_n
    verdict: bool
    failing_index: object = None
    subject: object = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict,
                "valuations": ["inf" if v == INF else v for v in self.valuations],
                "failing_index": self.failing_index,
                "subject": self.subject.to_json() if isinstance(self.subject, Matrix) else self.subject}


def is_distal(g: Matrix) -> DistalReport:
    p = g.p
    coeffs = g.charpoly()[1:]
    vals = tuple(valuation(Fraction(c), p) for c in coeffs)
    fail = next((i + 1 for i, v in enumerate(vals) if v < 0), None)
    if fail is None and vals[-1] != 0:
        fail = len(vals)
    return DistalReport(vals, fail is None, fail, g)


# ---------------------------------------------------------------------------
# fast sampled check: integer arithmetic modulo p^N


def _scaled_residues(g: Matrix, M: int):
    """``(e, flat)`` with ``p^e g`` integral, reduced modulo ``M``."""
    p = g.p
    e = max(0, -g.min_valuation())
    s = p ** e
    flat = []
    for r in g.rows:
        for x in r:
            x = x * s
            flat.append(x.numerator * pow(x.denominator, -1, M) % M)
    return e, flat


def _mul(A, B, n, M):
    cols = [B[j::n] for j in range(n)]
    out = []
    for i in range(n):
        row = A[i * n:(i + 1) * n]
        for c in cols:
            out.append(sum(a * b for a, b in zip(row, c)) % M)
    return out


def _distal_mod(G, e, n, p, M) -> bool:
    rows = [G[i * n:(i + 1) * n] for i in range(n)]
    cp = charpoly_coeffs(rows)
    for l in range(1, n + 1):
        if cp[l] % (p ** (l * e)):
            return False
    return cp[n] % (p ** (n * e + 1)) != 0


@dataclass
class SampleReport:
    verdict: bool
    trials: int
    max_len: int
    seed: int
    counterexample: object = None  # list of (generator id, inverted)
    matrix: object = None
    report: object = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "trials": self.trials, "max_len": self.max_len, "seed": self.seed,
                "counterexample": None if self.counterexample is None else
                [{"gen": g, "inverse": inv} for g, inv in self.counterexample],
                "matrix": None if self.matrix is None else self.matrix.to_json(),
                "report": None if self.report is None else self.report.to_json()}


def _normalize_gens(gens):
    out = []
    for i, g in enumerate(gens):
        if isinstance(g, tuple):
            out.append(g)
        else:
            out.append((str(i), g, g.inverse()))
    return out


def sample_group_distal(gens, trials: int = 10_000, max_len: int = 8, seed: int = 0) -> SampleReport:
    """Check every letter, then random words of length ``1..max_len``, for distality."""
    gens = _normalize_gens(gens)
    n, p = gens[0][1].n, gens[0][1].p
    emax = max(max(0, -g.min_valuation(), -gi.min_valuation()) for _, g, gi in gens)
    M = p ** (n * emax * max_len + 1)
    table = []
    for gid, g, gi in gens:
        table.append((gid, _scaled_residues(g, M), _scaled_residues(gi, M), g, gi))
    lookup = {gid: (fw, bw) for gid, fw, bw, _, _ in table}
    # the single letters come first so a failing generator is reported at length 1
    letters = [[(gid, inv)] for gid, *_ in table for inv in (False, True)]
    rng = random.Random(seed)
    for t in range(trials):
        if t < len(letters):
            word = letters[t]
        else:
            word = []
            for _ in range(rng.randint(1, max_len)):
                word.append((table[rng.randrange(len(table))][0], rng.random() < 0.5))
        e, G = 0, None
        for gid, inv in word:
            ee, F = lookup[gid][1 if inv else 0]
            e += ee
            G = F if G is None else _mul(G, F, n, M)
        if not _distal_mod(G, e, n, p, M):
            exact = {gid: (g, gi) for gid, _, _, g, gi in table}
            mat = None
            for gid, inv in word:
                m = exact[gid][1 if inv else 0]
                mat = m if mat is None else mat @ m
            return SampleReport(False, t + 1, max_len, seed, word, mat, is_distal(mat))
    return SampleReport(True, trials, max_len, seed)


def enlargements(desc: LimitGroupDescriptor) -> list:
    """One-step enlargements ``(name, extra generator)``: a block-scalar p-power, a lower-block unipotent."""
    n, p = desc.n, desc.p
    if desc.kind == "parahoric":
        e = [0] * n
        e[0], e[-1] = 1, -1
        return [("torus", Matrix.p_diag(e, p))]
    r = LimitGroupDescriptor(n, "R", desc.I, desc.d, None, None, p)
    out = [(f"scalar-{gid}", g) for gid, g, _ in standard_generators(r) if gid.startswith("t")]
    blks = desc.blocks
    a, b = blks[0][-1], blks[1][0]
    out.append((f"u{b + 1}{a + 1}(1)", Matrix.elementary(n, b + 1, a + 1, 1, p)))
    c = desc.conj
    ci = c.inverse()
    return [(name, c @ g @ ci) for name, g in out]


# ---------------------------------------------------------------------------
# catalog


@dataclass
class CatalogReport:
    id: str
    n: int
    expected: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.id, "n": self.n, "expected": self.expected, "passed": self.passed,
                "details": self.details}


def monomial_generators(n: int, p: int = 2) -> list:
    """``N_i``: the block ``[[0, 1], [-1, 0]]`` at positions ``i, i+1``."""
    out = []
    for i in range(n - 1):
        rows = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        rows[i][i] = rows[i + 1][i + 1] = 0
        rows[i][i + 1], rows[i + 1][i] = 1, -1
        out.append((f"N{i + 1}", Matrix(rows, p)))
    return out


def torus_generators(n: int, p: int = 2) -> list:
    out = []
    for i in range(n - 1):
        e = [0] * n
        e[i], e[i + 1] = 1, -1
        out.append((f"s{i + 1}", Matrix.p_diag(e, p)))
        u = Fraction(1 + p)
        d = [Fraction(1)] * n
        d[i], d[i + 1] = u, 1 / u
        out.append((f"h{i + 1}", Matrix.diag(d, p)))
    return out


def _check_torus_normalizer(n, p, rng, trials):
    orbit = closed_orbit(n, p)
    gens = monomial_generators(n, p)
    witnesses = []
    fixed = []
    closed = True
    for idx, desc in enumerate(orbit):
        moved = None
        for gid, g in gens:
            img = desc.conjugate(g)
            if not any(same_group(img, o) for o in orbit):
                closed = False
            if moved is None and not same_group(img, desc):
                moved = gid
        if moved is None:
            fixed.append(idx)
        else:
            witnesses.append({"descriptor": idx, "generator": moved})
    ok = len(orbit) == _factorial(n) and not fixed and closed
    return ok, {"orbit_size": len(orbit), "fixed": fixed, "orbit_closed": closed, "witnesses": witnesses}


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _torus_fixes(desc, gens):
    return all(same_group(desc.conjugate(g), desc) for _, g in gens)


def _check_diagonal_torus(n, p, rng, trials):
    tg = torus_generators(n, p)
    orbit = closed_orbit(n, p)
    samples = [(f"orbit-{i}", d, True) for i, d in enumerate(orbit)]
    for k in range(max(4, trials // 20)):
        kind = rng.randrange(3)
        if kind == 0:
            a = rng.randrange(1, n)
            u = Matrix.elementary(n, a + 1, a, rng.choice([1, -1, p]), p)
            desc = D(n, (), None, p, u)
        elif kind == 1:
            s = rng.randrange(1, n)
            desc = D(n, {s}, {s: Fraction(rng.randrange(0, 4), 2)}, p) if n > 2 else \
                parahoric((0, rng.randrange(0, 3)), p)
        else:
            desc = parahoric(tuple(sorted(rng.randrange(0, 3) for _ in range(n))), p)
        samples.append((f"sample-{k}", desc, any(same_group(desc, o) for o in orbit)))
    bad = [name for name, desc, in_orbit in samples if _torus_fixes(desc, tg) != in_orbit]
    return not bad, {"checked": len(samples), "mismatches": bad}


def _check_unipotent(n, p, rng, trials):
    d0 = D(n, (), None, p)
    bad = []
    for t in range(trials):
        g = Matrix.identity(n, p)
        for _ in range(rng.randint(1, 4)):
            a = rng.randrange(1, n)
            b = rng.randrange(a + 1, n + 1)
            lam = Fraction(rng.choice([1, -1, 3, 5])) * Fraction(p) ** rng.randint(-3, 3)
            g = g @ Matrix.elementary(n, a, b, lam, p)
        if not (member(d0, g) and is_distal(g).verdict):
            bad.append(t)
    return not bad, {"checked": trials, "failures": bad}


def iwahori(n: int, p: int = 2) -> LimitGroupDescriptor:
    """Fixator of the standard alcove, presented as the parahoric at its barycentre."""
    return parahoric(tuple(Fraction(i, n) for i in range(n)), p)


def alcove_vertices(n: int) -> list:
    return [tuple([0] * (n - k) + [1] * k) for k in range(n)]


def _check_compact(desc, points, rng, trials):
    gens = generators(desc, 0)
    rep = sample_group_distal(gens, trials, 6, rng.randrange(2 ** 31))
    bad = []
    for t in range(trials):
        g = Matrix.identity(desc.n, desc.p)
        for _ in range(rng.randint(1, 6)):
            _, a, b = gens[rng.randrange(len(gens))]
            g = g @ (b if rng.random() < 0.5 else a)
        if not (g.is_integral() and all(fixes_point(g, c) for c in points)):
            bad.append(t)
    return rep.verdict and not bad, {"distal": rep.verdict, "fixed_points": [list(map(str, c)) for c in points],
                                     "failures": bad}


CATALOG = {
    "torus-normalizer": ("finite orbit, no fixed limit group", _check_torus_normalizer),
    "diagonal-torus": ("fixes exactly the closed-orbit limit groups", _check_diagonal_torus),
    "unipotent-U": ("contained in D_empty, distal", _check_unipotent),
    "iwahori": ("compact, fixes the standard alcove", None),
    "maximal-compact": ("compact, fixes the origin", None),
}


def catalog_check(id: str, n: int = 3, p: int = 2, seed: int = 0, trials: int = 200) -> CatalogReport:
    if id not in CATALOG:
        raise UnknownCatalogEntry(f"unknown catalog id {id!r}", known=sorted(CATALOG))
    rng = random.Random(seed)
    expected, fn = CATALOG[id]
    if id == "iwahori":
        ok, details = _check_compact(iwahori(n, p), alcove_vertices(n), rng, trials)
    elif id == "maximal-compact":
        ok, details = _check_compact(parahoric([0] * n, p), [tuple([0] * n)], rng, trials)
    else:
        ok, details = fn(n, p, rng, trials)
    details["seed"] = seed
    return CatalogReport(id, n, expected, ok, details)


# ---------------------------------------------------------------------------
# provided flags


def _rank(vectors) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    r = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            f = rows[i][col] / rows[r][col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return r


def preserves_flag(gens, flag) -> bool:
    """Each generator maps each subspace (a list of spanning vectors) into itself.

    This only verifies a flag supplied by the caller; no flag search is done.
    """
    gens = [g[1] if isinstance(g, tuple) else g for g in gens]
    for space in flag:
        if not space:
            continue
        r = _rank(space)
        for g in gens:
            if _rank(list(space) + [g.apply(v) for v in space]) != r:
                return False
    return True
