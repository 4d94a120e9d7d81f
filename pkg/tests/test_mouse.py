"""Mouse algebra: spec example values and lemma instances on fixtures."""

import pytest

from conftest import mk
from mino import hooks
from mino.errors import (
    DropdownError,
    PremouseError,
    SegmentError,
    SequenceError,
    StarProductError,
    UltrapowerError,
)
from mino.mouse import (
    Extender,
    LevelInfo,
    Premouse,
    cardinal_successor,
    dropdown,
    is_normal_host_seq,
    pair_le,
    segment,
    star_product,
    ultrapower,
    ultrapower_seq,
)
from mino.stepfn import IDENTITY, StepMap


# -- structure validation --------------------------------------------------


def test_invalid_premice_rejected():
    with pytest.raises(PremouseError):
        mk(3, proj={2: (1, 2)})  # projecta increasing
    with pytest.raises(PremouseError):
        mk(3, proj={2: (3, 3)})  # projectum above level
    with pytest.raises(PremouseError):
        mk(4, cards=(), actives={4: (1, 2)})  # crit not a cardinal
    with pytest.raises(PremouseError):
        Extender(3, 2, 2)  # crit < nu < index violated
    with pytest.raises(PremouseError):
        Premouse(2, 2, (LevelInfo((1, 1), True),))  # missing level


# -- segment ---------------------------------------------------------------


def test_segment_identity(m5):
    assert segment(m5, m5.height) == m5


def test_segment_passive_top(m5):
    p = segment(m5, 5, passive=True)
    assert p.height == 5
    assert p.top.active is None
    assert p.levels[:4] == m5.levels[:4]


def test_segment_restriction_derived(m5):
    # independent application of the rule: height 2, fixture's levels 1-2
    expected = mk(2, cards={1, 2})
    assert segment(m5, 2) == expected


def test_segment_out_of_range(m5):
    with pytest.raises(SegmentError):
        segment(m5, 6)
    with pytest.raises(SegmentError):
        segment(m5, 0)


# -- cardinal successor -----------------------------------------------------


def test_cardinal_successor_examples():
    m = mk(5, cards={1, 2, 4})
    assert cardinal_successor(m, 2) == 4  # read off the cardinal set
    m2 = mk(3, cards={1})
    assert cardinal_successor(m2, 1) == 3  # fallback to height
    assert cardinal_successor(m2, 0) == 1  # least cardinal above 0
    with pytest.raises(SegmentError):
        cardinal_successor(m2, 3)


# -- dropdown ----------------------------------------------------------------


def test_dropdown_degenerate(n4_flat):
    dd = dropdown(n4_flat, 0, n4_flat, 0)
    assert dd.entries == ((n4_flat, 0),)
    assert dd.k == 0


def test_dropdown_no_projection(n4_flat):
    dd = dropdown(n4_flat, 0, segment(n4_flat, 2), 0)
    assert [(p.height, d) for p, d in dd.entries] == [(2, 0), (4, 0)]


def test_dropdown_projecting_level(n4_proj):
    dd3 = dropdown(n4_proj, 0, segment(n4_proj, 3), 0)
    assert [(p.height, d) for p, d in dd3.entries] == [(3, 0), (4, 0)]
    dd2 = dropdown(n4_proj, 0, segment(n4_proj, 2), 0)
    assert [(p.height, d) for p, d in dd2.entries] == [(2, 0), (3, 0), (4, 0)]
    assert dd2.revex[0][0].height == 4


def test_dropdown_rejects_non_segment(n4_flat):
    other = mk(2, cards={1, 2})
    with pytest.raises(DropdownError):
        dropdown(n4_flat, 0, other, 0)


def test_pair_le(n4_flat):
    assert pair_le(segment(n4_flat, 2), 2, n4_flat, 0)
    assert pair_le(n4_flat, 0, n4_flat, 1)
    assert not pair_le(n4_flat, 1, n4_flat, 0)


# -- ultrapower ---------------------------------------------------------------


def test_ultrapower_zero_shift():
    # t = height(M) and index(E) = t: M with P's lower part, identity map
    m = mk(3, cards={1, 3})
    p = mk(3, cards={1, 3}, actives={3: (1, 2)})
    u, pi = ultrapower(m, 0, p)
    assert pi == IDENTITY
    assert u == m


def test_ultrapower_height5_derived(m5):
    # hand-applied stretch rule: t=2, shift 3, height 5+3=8
    m_pass = segment(m5, 5, passive=True)
    u, pi = ultrapower(m_pass, 0, m5)
    assert pi == StepMap.shift(2, 3)
    assert u.height == 8
    expected = mk(
        8,
        cards={1, 2, 5},
        proj={},
    )
    assert u == expected


def test_ultrapower_precondition_failures(m5):
    m_pass = segment(m5, 5, passive=True)
    with pytest.raises(UltrapowerError) as ei:
        ultrapower(m_pass, 0, m_pass)  # host passive
    assert ei.value.reason == "host-not-active"
    disagree = mk(5, cards={1, 3}, actives={5: (1, 3)})
    with pytest.raises(UltrapowerError) as ei:
        ultrapower(m_pass, 0, disagree)
    assert ei.value.reason == "agreement"
    low_rho = mk(4, cards={1, 2}, proj={4: (1, 1)})
    with pytest.raises(UltrapowerError) as ei:
        ultrapower(low_rho, 1, m5)
    assert ei.value.reason == "crit-vs-projectum"
    # crit at or above nu-tilde of an active target
    tiny = mk(4, cards={1, 2, 3}, actives={4: (1, 2)})
    host = mk(5, cards={1, 2, 3}, actives={5: (2, 4)})
    with pytest.raises(UltrapowerError) as ei:
        ultrapower(tiny, 0, host)
    assert ei.value.reason == "crit-vs-nu"


def test_ultrapower_agrees_with_host_strictly_below_index(m5):
    m_pass = segment(m5, 5, passive=True)
    u, _ = ultrapower(m_pass, 0, m5)
    for lam in range(1, 5):
        assert u.level(lam) == m5.level(lam)


def test_ultrapower_seq_empty_and_singleton(m5):
    m_pass = segment(m5, 5, passive=True)
    r = ultrapower_seq(m_pass, 0, ())
    assert r.final == m_pass and r.map == IDENTITY
    r1 = ultrapower_seq(m_pass, 0, (m5,))
    u, pi = ultrapower(m_pass, 0, m5)
    assert r1.final == u and r1.map == pi


def test_ultrapower_seq_two_nested_hosts():
    # composite equals the hand-composed stretch maps
    m = mk(4, cards={1, 2, 3})
    p1 = mk(4, cards={1, 2, 3}, actives={4: (1, 3)})
    r1 = ultrapower_seq(m, 0, (p1,))
    u1 = r1.final
    assert r1.map == StepMap.shift(2, 2)  # t=2, lh=4
    # second host: crit 4 = image of 2, a cardinal of u1, with (4+) = 5
    assert u1.level(4).cardinal
    t2 = cardinal_successor(u1, 4)
    assert t2 == 5
    p2 = Premouse(
        t2 + 1,
        u1.degree_cap,
        u1.levels[:t2]
        + (LevelInfo((t2 + 1, t2 + 1), False, Extender(t2 + 1, 4, t2)),),
    )
    r2 = ultrapower_seq(m, 0, (p1, p2))
    assert r2.map == StepMap.shift(t2, p2.height - t2).after(StepMap.shift(2, 2))
    # hand-derived: fix below 2, +2 from 2, one more past the second threshold
    assert [r2.map(x) for x in range(6)] == [0, 1, 4, 6, 7, 8]
    assert r2.bounded(4)
    assert not r2.bounded(1)


def test_ultrapower_seq_failure_classification(m5):
    m_pass = segment(m5, 5, passive=True)
    bad_host = mk(5, cards={1, 3}, actives={5: (1, 3)})
    with pytest.raises(SequenceError) as ei:
        ultrapower_seq(m_pass, 0, (m5, bad_host))
    assert ei.value.position == 1
    assert ei.value.kind == "not-pre-good"
    with hooks.declare_illfounded(lambda M, n, P: True):
        with pytest.raises(SequenceError) as ei:
            ultrapower_seq(m_pass, 0, (m5,))
        assert ei.value.kind == "illfounded"


# -- star products -------------------------------------------------------------


def test_star_product_trivial_sides():
    q = mk(4, cards={1, 2}, actives={4: (1, 3)})
    sp = star_product((q,), ())
    assert sp.merged == (q,)
    p = mk(4, cards={1, 2}, actives={4: (1, 3)})
    sp2 = star_product((), (p,))
    assert sp2.merged == (p,)
    assert sp2.nested == (False,)


def test_star_product_nested_absorption():
    # one Q, one P with cr(F_Q) < cr(F_P) < nu(F_Q): P nested, absorbed into Q
    q = mk(5, cards={1, 2, 5}, actives={5: (1, 4)})
    p = Premouse(
        6,
        q.degree_cap,
        tuple(q.levels[:4])
        + (
            LevelInfo((5, 5), True, None),
            LevelInfo((6, 6), False, Extender(6, 2, 5)),
        ),
    )
    sp = star_product((q,), (p,))
    assert sp.nested == (True,)
    assert sp.etas == (1,)
    assert sp.xis == (0,)
    assert len(sp.merged) == 1
    assert sp.merged[0] == ultrapower_seq(q, 0, (p,)).final


def test_star_product_unnested_small_crit():
    # P with crit below cr(F_Q): stays a separate factor
    q = mk(5, cards={1, 2, 3, 4}, actives={5: (3, 4)})
    p = Premouse(
        4,
        q.degree_cap,
        tuple(q.levels[:3]) + (LevelInfo((4, 4), False, Extender(4, 1, 2)),),
    )
    sp = star_product((q,), (p,))
    assert sp.nested == (False,)
    assert sp.xis == (1,) and sp.etas == (1,)
    assert len(sp.merged) == 2
    # enumeration is by critical point
    crits = [h.top_extender.crit for h in sp.merged]
    assert crits == sorted(crits)


def test_star_product_rejects_non_normal():
    q = mk(4, cards={1, 2}, actives={4: (1, 3)})
    with pytest.raises(StarProductError):
        star_product((q, q), ())  # duplicate: not normal (nu > crit)
    assert is_normal_host_seq((q,))
    assert not is_normal_host_seq((q, q))


# -- dropdown preservation under ultrapowers ---------------------------------


def test_dropdown_preserved_by_entrywise_ultrapower():
    # three-entry dropdown, single host good for every entry; both routes agree
    n = mk(5, cards={1, 2}, proj={4: (2, 2)})
    host = Premouse(
        4,
        n.degree_cap,
        tuple(n.levels[:3]) + (LevelInfo((4, 4), False, Extender(4, 1, 3)),),
    )
    dd = dropdown(n, 0, segment(n, 3), 0)
    assert [(p.height, d) for p, d in dd.entries] == [(3, 0), (4, 0), (5, 0)]
    ults = [ultrapower_seq(p, d, (host,)).final for p, d in dd.entries]
    assert [u.height for u in ults] == [5, 6, 7]
    lifted = dropdown(ults[-1], 0, ults[0], 0)
    assert lifted.entries == tuple((u, d) for u, (_, d) in zip(ults, dd.entries))


def test_ultrapower_ignores_degree_when_defined():
    # stratified-degree coherence degenerates to equality under the stretch rule
    m = mk(4, cards={1, 2, 3}, proj={4: (3, 2)})
    host = mk(4, cards={1, 2, 3}, actives={4: (1, 3)})
    u0, pi0 = ultrapower(m, 0, host)
    u1, pi1 = ultrapower(m, 1, host)
    u2, pi2 = ultrapower(m, 2, host)
    assert u0 == u1 == u2 and pi0 == pi1 == pi2
