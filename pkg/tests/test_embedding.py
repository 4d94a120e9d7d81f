"""Tree pre-embeddings: validation, lifts, minimality, standardness, steps."""

import pytest

from conftest import mk
from mino import hooks
from mino.embedding import (
    DropdownLifts,
    TreePreEmbedding,
    check_minimal,
    check_standard,
    e_inflation,
    exit_lift,
    identity_embedding,
    infl_hosts,
    one_step_copy,
    trivial_embedding,
    validate_pre_embedding,
    xi_kappa,
)
from mino.errors import EmbeddingError
from mino.mouse import segment
from mino.stepfn import IDENTITY
from mino.trees import new_tree, prefix, replay


@pytest.fixture
def b2():
    """Base with a spare small extender for inflation steps."""
    return mk(5, cards={1, 2, 3, 4}, actives={3: (1, 2), 4: (1, 2), 5: (3, 4)})


@pytest.fixture
def t2(b2):
    """Length-2 tree using the level-4 extender."""
    return replay(b2, 0, (4,))


def test_identity_embedding_valid(t2):
    pi = identity_embedding(t2)
    assert validate_pre_embedding(pi).ok
    rep = check_minimal(pi)
    assert rep.minimal and rep.exactly_bounding and rep.puta_minimal


def test_trivial_embedding_valid(t2):
    pi = trivial_embedding(t2, new_tree(t2.base, 0))
    assert validate_pre_embedding(pi).ok
    assert check_minimal(pi).minimal


def test_broken_successor_clause(b2):
    t3 = replay(b2, 0, (3, 4))
    pi = TreePreEmbedding(t3, t3, ((0, 0), (2, 2)))
    rep = validate_pre_embedding(pi)
    assert not rep.ok and rep.clause == "successor-step"


def test_inflationary_sequence_values(b2, t2):
    x1, pi1 = e_inflation(new_tree(b2, 0), trivial_embedding(t2, new_tree(b2, 0)), 3)
    assert pi1.intervals == ((0, 1),)
    assert infl_hosts(pi1, 0) == ()
    # one inflation step past gamma_0: the singleton branch host
    assert infl_hosts(pi1, 1) == (segment(b2, 3),)
    # after a copy step the sequence is carried across unchanged
    x2, pi2 = one_step_copy(x1, pi1)
    assert pi2.intervals == ((0, 1), (2, 2))
    assert infl_hosts(pi2, 2) == infl_hosts(pi2, 1)


def test_one_step_copy_of_identity_prefix(t2):
    x0 = new_tree(t2.base, 0)
    x1, pi1 = one_step_copy(x0, trivial_embedding(t2, x0))
    assert x1 == t2
    assert pi1.intervals == ((0, 0), (1, 1))
    assert validate_pre_embedding(pi1).ok
    # gamma = delta in the appended interval, by construction
    assert pi1.gamma(1) == pi1.delta(1)


def test_e_inflation_extends_first_interval(b2, t2):
    x0 = new_tree(b2, 0)
    x1, pi1 = e_inflation(x0, trivial_embedding(t2, x0), 3)
    assert len(x1) == 2
    assert pi1.intervals == ((0, 1),)
    assert validate_pre_embedding(pi1).ok
    rep = check_minimal(pi1)
    assert rep.minimal
    std = check_standard(pi1)
    assert std.ok, std.failures


def test_e_inflation_rejects_large_crit(b2, t2):
    # appending the large-crit extender: it does not measure the lifted exit
    x0 = new_tree(b2, 0)
    with pytest.raises(EmbeddingError) as ei:
        e_inflation(x0, trivial_embedding(t2, x0), 5)
    assert "exits-C" in str(ei.value)


def test_e_inflation_terminal_drop_rejected():
    # source fully embedded, inflationary step that drops: refused
    n = mk(5, cards={1, 2, 3}, actives={4: (2, 3)}, proj={4: (1, 1)})
    t1 = new_tree(n, 0)
    x0 = new_tree(n, 0)
    with pytest.raises(EmbeddingError) as ei:
        e_inflation(x0, trivial_embedding(t1, x0), 4)
    assert "terminally-dropping" in str(ei.value)


def test_standard_identity_and_copy_chain(t2):
    assert check_standard(identity_embedding(t2)).ok
    std = check_standard(trivial_embedding(t2, new_tree(t2.base, 0)))
    assert std.ok


def test_shift_lemma_dual_route(b2, t2):
    # embed (t2, 1) into an inflated target, then copy-extend and check the
    # lift map against the independently composed square
    x0 = new_tree(b2, 0)
    x1, pi1 = e_inflation(x0, trivial_embedding(t2, x0), 3)
    x2, pi2 = one_step_copy(x1, pi1)
    assert validate_pre_embedding(pi2).ok
    std = check_standard(pi2)
    assert std.ok, std.failures
    assert std.counters["shift-lemma-nodes"] >= 1
    lifts = DropdownLifts(pi2)
    g1 = pi2.gamma(1)
    u_next = lifts.lift(1, 0, g1)
    # dual route: the star square commutes on the star model's ordinals
    lhs = u_next.map.after(t2.nodes[1].star_map)
    rhs = x2.nodes[g1].star_map.after(
        lifts.lift(0, lifts.i_sub(0, x2.nodes[g1].pred), x2.nodes[g1].pred).map
    )
    assert lhs.agrees_with(rhs, t2.nodes[1].star_model.height)


def test_minimality_fails_under_hook(b2, t2):
    x0 = new_tree(b2, 0)
    x1, pi1 = e_inflation(x0, trivial_embedding(t2, x0), 3)
    host = segment(b2, 3)
    with hooks.declare_illfounded(lambda M, n, P: P == host and M == t2.exit(0)):
        rep = check_minimal(pi1)
        assert not rep.minimal
        assert "not good" in rep.detail or "pre-good" in rep.detail
        # the failure sits at delta_0, so the relaxation still applies
        assert rep.puta_minimal


def test_xi_kappa_identity(t2):
    pi = identity_embedding(t2)
    xi, u, m = xi_kappa(pi, 0, 1)
    assert xi == 0
    assert m == IDENTITY
    assert u == t2.model(0)


def test_xi_kappa_sites(b2, t2):
    from mino.stepfn import StepMap

    x0 = new_tree(b2, 0)
    x1, pi1 = e_inflation(x0, trivial_embedding(t2, x0), 3)
    # crit equality: the (mu+)-segment survives, so the site stays at gamma_0
    xi, u, m = xi_kappa(pi1, 0, 1)
    assert xi == 0 and m == IDENTITY
    # a critical point strictly above the inflation crit is moved past it
    t_big = replay(b2, 0, (5,))
    x1b, pi1b = e_inflation(x0, trivial_embedding(t_big, x0), 3)
    xi_b, u_b, m_b = xi_kappa(pi1b, 0, 3)
    assert xi_b == 1
    assert m_b == StepMap.shift(2, 1)
    assert m_b(3) == 4


def test_wrong_site_rejected(t2):
    pi = identity_embedding(t2)
    with pytest.raises(EmbeddingError):
        xi_kappa(pi, 1, 1)  # crit 1 is caught at node 0
