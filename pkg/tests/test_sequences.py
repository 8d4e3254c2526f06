from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from btcompact.building import ChamberPoint
from btcompact.errors import DomainError
from btcompact.matrix import Matrix
from btcompact.sequences import UNDECIDED, SequenceSpec, classify, extract_fundamental


def test_classify_examples():
    c = classify(SequenceSpec(3, (0, 1, 2), (0, 0, 0)))
    assert c.I == frozenset() and not c.bounded
    c = classify(SequenceSpec(3, (0, 0, 1), (0, 0, 0)))
    assert c.I == {1} and c.gaps == {1: 0}
    c = classify(SequenceSpec(3, (0, 0, 0), (0, 1, 1)))
    assert c.bounded and c.gaps == {1: 1, 2: 0}
    assert c.to_json()["d"] == ["1", "0"]


def test_spec_validation():
    with pytest.raises(DomainError):
        SequenceSpec(3, (0, 1, 0), (0, 0, 0))
    with pytest.raises(DomainError):
        SequenceSpec(2, (0, 0), (0, -1))
    with pytest.raises(DomainError):
        SequenceSpec(2, (1, 1), (0, 0))
    with pytest.raises(DomainError):
        SequenceSpec(2, (0, 1), (0, 0), Matrix.diag([2, 1]))
    s = SequenceSpec(2, (0, 1), (0, 0), Matrix([[1, 1], [0, 1]]))
    assert SequenceSpec.from_json(s.to_json()) == s


def test_extract_examples():
    pts = [ChamberPoint((0, m, 2 * m)) for m in range(1, 51)]
    assert extract_fundamental(pts, 10).I == frozenset()
    pts = [ChamberPoint((0, 1, m)) for m in range(1, 51)]
    c = extract_fundamental(pts, 10)
    assert c.I == {1} and c.gaps == {1: 1}
    pts = [ChamberPoint((0, m % 7, m)) for m in range(1, 51)]
    assert extract_fundamental(pts, 10) is UNDECIDED
    with pytest.raises(DomainError):
        extract_fundamental([], 10)


@st.composite
def specs(draw):
    n = draw(st.integers(2, 4))
    steps = [draw(st.integers(0, 2)) for _ in range(n - 1)]
    a, b = [0], [0]
    for s in steps:
        a.append(a[-1] + s)
        b.append(b[-1] + (draw(st.integers(0, 4)) if s == 0 else draw(st.integers(-4, 4))))
    return SequenceSpec(n, a, b)


@given(specs(), st.integers(3, 10))
def test_extract_agrees_with_classify(spec, horizon):
    length = max(abs(x) for x in spec.b) + horizon
    # long enough for every divergent gap to exceed the horizon on a full tail
    length = 2 * length + 4
    c = classify(spec)
    prefix = [x for x in spec.prefix(length) if x.in_chamber]
    e = extract_fundamental(prefix, horizon)
    assert e is not UNDECIDED
    assert e.I == c.I and e.gaps == c.gaps
    assert c.bounded == all(x == 0 for x in spec.a)
