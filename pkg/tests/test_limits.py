import itertools
import random
from fractions import Fraction

import pytest

from btcompact.building import act, apartment_vertex, block_of, blocks, simple_roots
from btcompact.errors import DescriptorError, IndexSetError, NotUnimodularError
from btcompact.limits import (D, R, LeviGroup, LimitGroupDescriptor, closed_orbit, generators, limit_of,
                              member, normalizer, outside_witness, parahoric, phi_embed, random_word,
                              same_group, separating_witness, zariski_type)
from btcompact.matrix import Matrix
from btcompact.sequences import SequenceSpec, classify

from oracles import random_k_o, random_sl, seeded


def grid(n_values=(2, 3), d_values=(0, Fraction(1, 2), 1), p=2):
    for n in n_values:
        S = list(range(1, n))
        for r in range(len(S)):
            for I in itertools.combinations(S, r):
                for ds in itertools.product(d_values, repeat=len(I)):
                    yield D(n, I, dict(zip(I, ds)), p)


def test_limit_of_examples():
    d = limit_of(classify(SequenceSpec(2, (0, 1), (0, 0))))
    assert d.kind == "D" and d.I == frozenset()
    assert member(d, Matrix([[1, 5], [0, 1]])) and not member(d, Matrix([[1, 0], [1, 1]]))
    d = limit_of(classify(SequenceSpec(3, (0, 0, 1), (0, 0, 0))))
    assert d.I == {1} and d.d == ((1, 0),)
    w = Matrix([[0, 1, Fraction(1, 8)], [-1, 0, 0], [0, 0, 1]])
    assert member(d, w)
    d = limit_of(classify(SequenceSpec(3, (0, 0, 0), (0, 1, 1))))
    assert d.kind == "parahoric" and d.point.c == (0, 1, 1)


def test_member_examples():
    d0 = D(2)
    assert member(d0, Matrix([[3, Fraction(7, 4)], [0, Fraction(1, 3)]]))
    assert not member(d0, Matrix.diag([2, Fraction(1, 2)]))
    assert member(R(2), Matrix.diag([2, Fraction(1, 2)]))
    d = D(3, {1}, {1: 1})
    rng = seeded(0)
    for _ in range(30):
        u1, u2 = (Fraction(rng.choice([1, 3, -5]), rng.choice([1, 7])) for _ in range(2))
        x = Fraction(rng.randint(-9, 9), rng.choice([1, 3])) * Fraction(2) ** rng.randint(0, 2)
        y = Fraction(rng.randint(-9, 9), rng.choice([1, 3]))
        top = [[u1, x], [2 * y, u2]]
        det = u1 * u2 - x * 2 * y
        g = Matrix([top[0] + [Fraction(rng.randint(-50, 50), 8)], top[1] + [Fraction(1, 16)], [0, 0, 1 / det]])
        assert member(d, g)
    assert not member(d, Matrix([[1, 0, 0], [1, 1, 0], [0, 0, 1]]))
    assert not member(d, Matrix([[1, Fraction(1, 4), 0], [0, 1, 0], [0, 0, 1]]))
    with pytest.raises(NotUnimodularError):
        member(d, Matrix.diag([2, 1, 1]))


def test_normalizer_and_type_examples():
    assert normalizer(D(2)).kind == "R"
    assert member(normalizer(D(2)), Matrix([[4, 9], [0, Fraction(1, 4)]]))
    r = normalizer(D(3, {1}, {1: 0}))
    assert member(r, Matrix([[2, 0, 0], [0, 2, 0], [0, 0, Fraction(1, 4)]]))
    assert not member(r, Matrix([[2, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 2)]]))
    o = parahoric((0, 0))
    assert normalizer(o) is o
    with pytest.raises(DescriptorError):
        normalizer(r)
    assert zariski_type(D(3, {1}, {1: 5})) == {1}
    assert zariski_type(R(3)) == frozenset()
    assert zariski_type(o) == simple_roots(2)


def test_descriptor_validation_and_json():
    with pytest.raises(DescriptorError):
        D(3, {1}, {2: 0})
    with pytest.raises(DescriptorError):
        D(3, {1}, {1: -1})
    with pytest.raises(IndexSetError):
        D(3, {4}, {4: 0})
    with pytest.raises(DescriptorError):
        LimitGroupDescriptor(2, "X")
    with pytest.raises(NotUnimodularError):
        D(2, conjugator=Matrix.diag([2, 1]))
    # I = S names the parahoric at the point with those gaps
    assert D(3, {1, 2}, {1: 1, 2: 0}) == parahoric((0, 1, 1))
    g = random_sl(3, 2, seeded(3))
    for desc in (D(3, {2}, {2: Fraction(1, 3)}, conjugator=g), R(3), parahoric((0, Fraction(1, 2), 1))):
        assert LimitGroupDescriptor.from_json(desc.to_json(), 2) == desc


def test_normalizer_law_and_monotonicity():
    rng = random.Random(5)
    for desc in grid():
        r = normalizer(desc)
        dg = generators(desc, 2)
        rg = generators(r, 2)
        lab = block_of(desc.n, desc.I)
        for _ in range(15):
            g, _ = random_word(rg, rng, 5)
            h, _ = random_word(dg, rng, 5)
            assert member(r, g) and member(r, h)
            assert member(desc, h)
            assert all(g[a, b] == 0 for a in range(desc.n) for b in range(desc.n) if lab[a] > lab[b])
            gi = g.inverse()
            for _, x, _ in dg:
                assert member(desc, g @ x @ gi)
        w = outside_witness(desc)
        assert not member(r, w)
        wi = w.inverse()
        assert any(not member(desc, w @ x @ wi) for _, x, _ in dg)


def test_equality_is_conjugation_invariant():
    rng = random.Random(6)
    for desc in grid(n_values=(3,)):
        rg = generators(normalizer(desc), 2)
        g, _ = random_word(rg, rng, 4)
        assert same_group(desc.conjugate(g), desc)
        w = outside_witness(desc)
        assert not same_group(desc.conjugate(w), desc)
        assert separating_witness(desc.conjugate(w), desc) is not None


def test_parahoric_equality_matches_vertex_action():
    rng = seeded(7)
    p = 2
    for _ in range(40):
        c1 = tuple(sorted(rng.randint(0, 2) for _ in range(3)))
        c2 = tuple(sorted(rng.randint(0, 2) for _ in range(3)))
        g = random_k_o(3, p, rng) if rng.random() < 0.5 else Matrix.permutation(rng.sample(range(3), 3), p)
        v1 = apartment_vertex(c1, p)
        v2 = act(g, apartment_vertex(c2, p))
        assert same_group(parahoric(c1, p), parahoric(c2, p, g)) == (v1 == v2)


def test_grid_descriptors_are_pairwise_separated():
    descs = list(grid(n_values=(3,)))
    for x, y in itertools.combinations(descs, 2):
        eq = same_group(x, y)
        # descriptors in the same open facet of the Levi chamber coincide
        if eq:
            assert x.I == y.I
            continue
        side, _, w = separating_witness(x, y)
        a, b = (x, y) if side == "left" else (y, x)
        assert member(a, w) and not member(b, w)


def test_same_facet_descriptors_coincide():
    assert same_group(D(3, {1}, {1: Fraction(1, 3)}), D(3, {1}, {1: Fraction(2, 3)}))
    assert not same_group(D(3, {1}, {1: 0}), D(3, {1}, {1: 1}))
    assert not same_group(D(3, {1}, {1: 0}), R(3, {1}, {1: 0}))


def test_phi_examples():
    assert phi_embed({1}, LeviGroup(3, {1}, {1}, ((1, 2),))) == D(3, {1}, {1: 2})
    t = Fraction(1, 2)
    assert phi_embed({1}, LeviGroup(3, {1}, {1}, ((1, t),))) == D(3, {1}, {1: t})
    with pytest.raises(DescriptorError):
        phi_embed({1}, Matrix.identity(3))
    with pytest.raises(DescriptorError):
        phi_embed({1}, None)
    with pytest.raises(IndexSetError):
        LeviGroup(3, {1}, {2}, ((2, 0),))
    with pytest.raises(IndexSetError):
        phi_embed({2}, LeviGroup(3, {1}, {1}, ((1, 0),)))


def random_block_diagonal(n, I, p, rng, outer=None):
    """Random element of the block group G_I; with ``outer`` given, half the samples are
    Levi projections of words in its generators (so membership is often true)."""
    if outer is not None and rng.random() < 0.5:
        g, _ = random_word(generators(outer, 1), rng, 5)
        src = g
    else:
        src = None
    rows = [[Fraction(0)] * n for _ in range(n)]
    for blk in blocks(n, I):
        k = len(blk)
        if src is not None:
            sub = src.block(blk)
            det = sub.det()
            sub = Matrix([[x / det for x in sub.rows[0]]] + [list(r) for r in sub.rows[1:]], p)
        elif k == 1:
            sub = Matrix([[1]], p)
        else:
            sub = random_sl(k, p, rng, -2, 2) if rng.random() < 0.5 else random_k_o(k, p, rng)
        for i, a in enumerate(blk):
            for j, b in enumerate(blk):
                rows[a][b] = sub[i, j]
    return Matrix(rows, p)


def test_phi_functoriality():
    rng = seeded(9)
    n, p = 3, 2
    for I in ({1}, {2}, {1, 2}):
        for J in (set(), {1}, {2}, {1, 2}):
            if not J <= I:
                continue
            d = tuple((s, rng.choice([0, Fraction(1, 2), 1])) for s in sorted(J))
            inner = LeviGroup(n, I, J, d, p)
            outer = phi_embed(I, inner)
            hits = 0
            for _ in range(60):
                g = random_block_diagonal(n, I, p, rng, outer)
                a = inner.member(g)
                hits += a
                assert a == member(outer, g)
            assert 0 < hits < 60


def test_closed_orbit():
    o2 = closed_orbit(2)
    assert len(o2) == 2
    up = Matrix([[1, 1], [0, 1]])
    assert [member(d, up) for d in o2].count(True) == 1
    o3 = closed_orbit(3)
    assert len(o3) == 6
    for x, y in itertools.combinations(o3, 2):
        assert not same_group(x, y)
        side, _, w = separating_witness(x, y)
        a, b = (x, y) if side == "left" else (y, x)
        assert member(a, w) and not member(b, w)
    rng = seeded(10)
    for desc in o3:
        gens = generators(desc, 2)
        for _ in range(5):
            t = Matrix.diag([Fraction(2) ** rng.randint(-3, 3) * rng.choice([1, 3]) for _ in range(2)] + [1], 2)
            t = Matrix.diag([t[0, 0], t[1, 1], 1 / (t[0, 0] * t[1, 1])], 2)
            ti = t.inverse()
            assert all(member(desc, t @ g @ ti) for _, g, _ in gens)
