"""Step-map arithmetic: backend differential and algebraic laws."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mino import _stepfn_py as pure
from mino.stepfn import BACKEND, IDENTITY, StepMap, compose_all

try:
    from mino import _stepfn as compiled
except ImportError:
    compiled = None


def seg_strategy():
    # strictly increasing starts, strictly increasing offsets
    def build(pairs):
        starts = sorted(set(p[0] for p in pairs))
        out = []
        off = 0
        for i, s in enumerate(starts):
            off += 1 + pairs[i % len(pairs)][1]
            out.extend((s, off))
        return tuple(out)

    return st.lists(
        st.tuples(st.integers(0, 30), st.integers(0, 5)), min_size=0, max_size=4
    ).map(build)


@given(seg_strategy(), st.integers(0, 60))
def test_backends_agree_on_apply(segs, x):
    if compiled is None:
        pytest.skip("compiled kernel unavailable")
    assert pure.apply(segs, x) == compiled.apply(segs, x)


@given(seg_strategy(), seg_strategy())
def test_backends_agree_on_compose(a, b):
    if compiled is None:
        pytest.skip("compiled kernel unavailable")
    assert pure.compose(a, b) == compiled.compose(a, b)


@given(seg_strategy(), seg_strategy(), st.integers(0, 80))
def test_compose_is_pointwise_composition(a, b, x):
    f = StepMap(b)
    g = StepMap(a)
    assert g.after(f)(x) == g(f(x))


@given(seg_strategy(), seg_strategy(), st.integers(0, 50))
def test_agrees_upto_matches_pointwise(a, b, bound):
    f = StepMap(a)
    g = StepMap(b)
    expected = all(f(x) == g(x) for x in range(bound + 1))
    assert f.agrees_with(g, bound) == expected


@given(seg_strategy())
def test_identity_laws(segs):
    f = StepMap(segs)
    assert f.after(IDENTITY) == f
    assert IDENTITY.after(f) == f


@given(seg_strategy(), st.integers(0, 40))
def test_monotone_strictly(segs, x):
    f = StepMap(segs)
    assert f(x) < f(x + 1)


def test_shift_and_sup_image():
    f = StepMap.shift(2, 3)
    assert [f(x) for x in range(6)] == [0, 1, 5, 6, 7, 8]
    # image sup agrees with the map off jump thresholds and drops below it
    # exactly at the jump, like ordinal sups at discontinuity points
    assert f.sup_image(2) == 2 < f(2)
    assert f.sup_image(3) == f(3) == 6
    assert f.sup_image(0) == 0
    assert StepMap.shift(4, 0) == IDENTITY


def test_compose_all_order():
    f = StepMap.shift(2, 3)
    g = StepMap.shift(5, 4)
    h = compose_all([f, g])
    assert h(2) == g(f(2)) == 9


def test_backend_name_reported():
    assert BACKEND in ("cython", "python")
