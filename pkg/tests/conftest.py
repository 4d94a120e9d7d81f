"""Shared fixture builders for the symbolic calculus tests."""

import pytest

from mino.mouse import Extender, LevelInfo, Premouse


def mk(height, cards=(1,), actives=None, proj=None, cap=2):
    """Build a premouse; defaults give non-projecting passive levels.

    cards: iterable of cardinal-flagged levels.
    actives: {level: (crit, nu)}.
    proj: {level: projecta tuple}; default (lam,) * cap.
    """
    actives = actives or {}
    proj = proj or {}
    cards = set(cards)
    levels = []
    for lam in range(1, height + 1):
        p = proj.get(lam, (lam,) * cap)
        e = None
        if lam in actives:
            crit, nu = actives[lam]
            e = Extender(lam, crit, nu)
        levels.append(LevelInfo(tuple(p), lam in cards, e))
    return Premouse(height, cap, tuple(levels))


@pytest.fixture
def m5():
    """The height-5 fixture: active at 5 with crit 1, nu 3, cardinals {1,2}."""
    return mk(5, cards={1, 2}, actives={5: (1, 3)})


@pytest.fixture
def n4_flat():
    """Height 4, no projection anywhere, passive."""
    return mk(4)


@pytest.fixture
def n4_proj():
    """Height 4 with rho_1(N|3) = 1."""
    return mk(4, proj={3: (1, 1)})
