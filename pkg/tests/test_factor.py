"""Factor order and factor tree over worked inflation fixtures."""

import pytest

from conftest import mk
from mino.factor import factor_order, factor_tree, unravel
from mino.inflation import check_inflation, classify
from mino.trees import new_tree, replay


@pytest.fixture
def b2():
    return mk(5, cards={1, 2, 3, 4}, actives={3: (1, 2), 4: (1, 2), 5: (3, 4)})


@pytest.fixture
def t2(b2):
    return replay(b2, 0, (4,))


@pytest.fixture
def b3():
    return mk(6, cards={1, 2, 3, 4, 5}, actives={3: (1, 2), 4: (2, 3), 6: (4, 5)})


def test_factor_of_self(t2):
    data = factor_order(t2, t2)
    assert len(data) == 1
    assert data.prefixes[0] == t2
    ft = factor_tree(t2, t2)
    assert len(ft.tree) == 1
    assert ft.tree.model(0) == t2.model(1)


def test_single_inflation_factor(b2, t2):
    x = replay(b2, 0, (3, 5))
    data = factor_order(t2, x)
    assert len(data) == 2
    assert data.zetas == (0,)
    assert data.lams == (0, 1)
    ft = factor_tree(t2, x)
    u = ft.tree
    assert len(u) == 2
    # the factor extender is the inflationary extender, read off M^U_0
    assert u.extender_level(0) == 3
    assert u.model(0).level(3).active is not None
    assert u.model(1) == x.model(2)


def test_two_linear_inflations(b3):
    t = replay(b3, 0, (6,))
    x2 = replay(b3, 0, (3, 5))
    w = check_inflation(t, x2).witness
    xhat, what = unravel(t, x2, w)
    data = factor_order(t, x2)
    assert len(data) == 3
    assert data.preds == (None, 0, 1)  # linear order of length 3
    u = factor_tree(t, x2).tree
    assert [u.nodes[a].pred for a in range(1, 3)] == [0, 1]
    assert u.model(2) == xhat.model(len(xhat) - 1)


def test_dropping_factor_node():
    n = mk(5, cards={1, 2, 3}, actives={4: (2, 3)}, proj={4: (1, 1)})
    t1 = new_tree(n, 0)
    x = replay(n, 0, (4,))
    data = factor_order(t1, x)
    assert len(data) == 2
    assert not data.in_C(1)
    ft = factor_tree(t1, x)
    u = ft.tree
    assert u.drops_in(0, 1)
    assert u.nodes[1].drop_model
    # star data agrees with the target tree's
    assert u.nodes[1].star_model == x.nodes[1].star_model


def test_unravel_terminates(b2, t2):
    x = replay(b2, 0, (3,))
    w = check_inflation(t2, x).witness
    xhat, what = unravel(t2, x, w)
    assert not classify(t2, xhat, what).pending
    assert len(xhat) == 3  # one copy step finishes the source
