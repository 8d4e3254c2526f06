"""Finite-depth checks of Chabauty convergence ``K_{v_m} -> D``.

Exact parts (onsets, characteristic-polynomial exclusions, the precondition)
give certified verdicts.  The sampled direction-(i) check can only ever
downgrade a verdict to ``UNKNOWN``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .building import ChamberPoint
from .errors import DescriptorMismatchError, DomainError, NotUnimodularError
from .limits import (LimitGroupDescriptor, block_of, generators, limit_of, member_standard,
                     same_group, standard_generators)
from .matrix import Matrix
from .scalar import INF, valuation
from .sequences import SequenceSpec, classify


class _Never:
    def __repr__(self):
        return "NEVER"

    def __bool__(self):
        return False


NEVER = _Never()


@dataclass(frozen=True)
class Window:
    """Valuation floor ``m`` for the compact set and congruence depth ``j`` for the neighbourhood."""

    m: int = 3
    j: int = 2

    def __post_init__(self):
        if self.m < 0 or self.j < 1:
            raise DomainError("window needs m >= 0 and j >= 1", m=self.m, j=self.j)

    def contains(self, g: Matrix) -> bool:
        return g.min_valuation() >= -self.m

    def to_json(self) -> dict:
        return {"m": self.m, "j": self.j}


def onset(gen: Matrix, spec: SequenceSpec):
    """Least ``m >= 1`` from which ``gen`` lies in every ``K_{v_m}``, or ``NEVER``."""
    if gen.det() != 1:
        raise NotUnimodularError("onset needs a determinant-one element", det=gen.det())
    if gen.n != spec.n:
        raise DomainError("dimension mismatch", gen=gen.n, spec=spec.n)
    k = spec.conjugator.with_prime(gen.p)
    h = k.inverse() @ gen @ k
    p = gen.p
    lo = 1
    for a in range(spec.n):
        for b in range(spec.n):
            x = h[a, b]
            if not x:
                continue
            # valuation of entry (a, b) of t(m)^-1 h t(m) is alpha m + beta
            alpha = spec.a[b] - spec.a[a]
            beta = valuation(x, p) + spec.b[b] - spec.b[a]
            if alpha < 0 or (alpha == 0 and beta < 0):
                return NEVER
            if alpha > 0:
                lo = max(lo, math.ceil(Fraction(-beta, alpha)))
    return lo


def in_vertex_fixator(g: Matrix, spec: SequenceSpec, m: int) -> bool:
    """Direct test ``g in K_{v_m}``: the conjugate ``t(m)^-1 k^-1 g k t(m)`` is integral."""
    p = g.p
    k = spec.conjugator.with_prime(p)
    t = Matrix.p_diag(spec.nu(m), p)
    h = t.inverse() @ k.inverse() @ g @ k @ t
    return h.is_integral() and valuation(h.det(), p) == 0


def integral_charpoly(g: Matrix) -> bool:
    p = g.p
    return all(Fraction(c).denominator % p for c in g.charpoly())


def _project_standard(desc: LimitGroupDescriptor, h: Matrix):
    n, p = desc.n, h.p
    c = desc.coords
    lab = [0] * n if desc.kind == "parahoric" else block_of(n, desc.I)
    rows = [list(r) for r in h.rows]
    for a in range(n):
        for b in range(n):
            x = rows[a][b]
            if not x:
                continue
            if lab[a] > lab[b]:
                rows[a][b] = Fraction(0)
            elif lab[a] == lab[b] and valuation(x, p) < math.ceil(c[a] - c[b]):
                rows[a][b] = Fraction(0)
    g = Matrix(rows, p)
    det = g.det()
    if det == 0:
        return None
    rows[0] = [x / det for x in rows[0]]
    g = Matrix(rows, p)
    return g if member_standard(desc, g) else None


def defect_depth(g: Matrix):
    """Largest ``j`` with ``g == id mod p^j`` (``INF`` for the identity)."""
    n = g.n
    return min((valuation(g[a, b] - (1 if a == b else 0), g.p) for a in range(n) for b in range(n)),
               default=INF)


def near_member(desc: LimitGroupDescriptor, g: Matrix, j: int) -> bool:
    """Sound test of ``g in V_j . desc``: project onto the group and measure the defect."""
    if g.det() != 1:
        raise NotUnimodularError("near_member needs a determinant-one element", det=g.det())
    c = desc.conj
    ci = c.inverse()
    proj = _project_standard(desc, ci @ g @ c)
    if proj is None:
        return False
    gp = c @ proj @ ci
    return defect_depth(g @ gp.inverse()) >= j


def _expected_descriptor(spec: SequenceSpec, p: int) -> LimitGroupDescriptor:
    k = spec.k
    if k is not None:
        k = k.with_prime(p)
        det = k.det()
        k = k @ Matrix.diag([1 / det] + [1] * (spec.n - 1), p)
    return limit_of(classify(spec), k, p)


def _k_o_generators(n: int, p: int):
    out = []
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b:
                out.append((Matrix.elementary(n, a, b, 1, p), Matrix.elementary(n, a, b, -1, p)))
    for i in range(n - 1):
        u = Fraction(1 + p)
        e = [1] * n
        e[i], e[i + 1] = u, 1 / u
        out.append((Matrix.diag(e, p), Matrix.diag([1 / x for x in e], p)))
    return out


def random_k_o(n: int, p: int, rng: random.Random, max_len: int = 6) -> Matrix:
    """A random word in generators of ``SL_n(Z_(p))``."""
    gens = _k_o_generators(n, p)
    g = Matrix.identity(n, p)
    for _ in range(rng.randint(1, max_len)):
        a, b = gens[rng.randrange(len(gens))]
        g = g @ (b if rng.random() < 0.5 else a)
    return g


@dataclass
class ConvergenceReport:
    verdict: str
    onsets: dict
    exclusions: list
    spot_checks: list
    margin: object = None
    violation: object = None
    window: Window = field(default_factory=Window)
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "onsets": {k: ("NEVER" if v is NEVER else v) for k, v in self.onsets.items()},
            "exclusions": self.exclusions,
            "spot_checks": self.spot_checks,
            "margin": self.margin,
            "violation": self.violation,
            "window": self.window.to_json(),
            "seed": self.seed,
        }


def exclusion_witnesses(desc: LimitGroupDescriptor) -> list:
    """Elements of ``R \\ D`` (block-scalar p-powers) or a torus translation for parahorics."""
    n, p = desc.n, desc.p
    if desc.kind == "parahoric":
        e = [0] * n
        e[0], e[-1] = 1, -1
        ws = [("t", Matrix.p_diag(e, p))]
    else:
        r = LimitGroupDescriptor(n, "R", desc.I, desc.d, None, None, p)
        ws = [(i, g) for i, g, _ in standard_generators(r) if i.startswith("t")]
    c = desc.conj
    ci = c.inverse()
    return [(i, c @ g @ ci) for i, g in ws]


def verify_convergence(spec: SequenceSpec, desc: LimitGroupDescriptor, window: Window = Window(),
                       gen_depth: int = 3, horizon: int = 12, seed: int = 0,
                       samples: int = 8) -> ConvergenceReport:
    """Check that ``K_{v_m}`` converges to ``desc`` at finite depth."""
    if spec.n != desc.n:
        raise DescriptorMismatchError("descriptor and sequence have different n", spec=spec.n, desc=desc.n)
    expected = _expected_descriptor(spec, desc.p)
    if not same_group(expected, desc):
        raise DescriptorMismatchError("descriptor does not match the classified sequence",
                                      expected=expected.to_json(), claimed=desc.to_json())
    violation = None
    onsets = {}
    for gid, g, _ in generators(desc, gen_depth):
        o = onset(g, spec)
        onsets[gid] = o
        if o is NEVER and violation is None:
            violation = {"condition": "ii", "generator": gid, "witness": g.to_json()}

    exclusions = []
    for wid, w in exclusion_witnesses(desc):
        ok = not integral_charpoly(w)
        exclusions.append({"id": wid, "witness": w.to_json(), "certified": ok,
                           "reason": "characteristic polynomial has a coefficient of negative valuation"
                           if ok else "characteristic polynomial is integral"})
        if not ok and violation is None:
            violation = {"condition": "exclusion", "generator": wid, "witness": w.to_json()}

    rng = random.Random(seed)
    n, p = spec.n, desc.p
    k = spec.conjugator.with_prime(p)
    ki = k.inverse()
    spot = []
    for m in range(1, horizon + 1):
        t = Matrix.p_diag(spec.nu(m), p)
        conj = k @ t
        conj_i = t.inverse() @ ki
        seen = cert = 0
        for _ in range(samples):
            g = conj @ random_k_o(n, p, rng) @ conj_i
            if not window.contains(g):
                continue
            seen += 1
            cert += near_member(desc, g, window.j)
        spot.append({"m": m, "samples": seen, "certified": cert})
    margin = None
    for row in reversed(spot):
        if row["certified"] != row["samples"]:
            break
        margin = row["m"]
    spot_ok = margin is not None and margin <= max(1, horizon // 2)

    if violation is not None:
        verdict = "VIOLATED"
    elif spot_ok:
        verdict = "SATISFIED"
    else:
        verdict = "UNKNOWN"
    return ConvergenceReport(verdict, onsets, exclusions, spot, margin, violation, window, seed)


def vertex_separation(v, w, p: int = 2, j: int = 1):
    """An element of ``K_v`` not certified near ``K_w`` at depth ``j`` (or the reverse).

    Returns ``(g, side)`` with ``side`` naming the fixator that contains ``g``;
    ``(None, None)`` when ``v`` and ``w`` are the same vertex.
    """
    v = ChamberPoint(v).c
    w = ChamberPoint(w).c
    n = len(v)
    best = None
    for a in range(n):
        for b in range(n):
            if a != b and v[a] - v[b] < w[a] - w[b]:
                key = (v[a] - v[b], a, b)
                best = key if best is None or key < best else best
    if best is None:
        return None, None
    _, a, b = best
    vd, wd = int(v[a] - v[b]), int(w[a] - w[b])
    if vd < j:
        return Matrix.elementary(n, a + 1, b + 1, Fraction(p) ** vd, p), "v"
    return Matrix.elementary(n, b + 1, a + 1, Fraction(p) ** (-wd), p), "w"
