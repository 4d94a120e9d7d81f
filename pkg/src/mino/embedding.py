"""Minimal tree pre-embeddings and their dropdown-lift bookkeeping.

A pre-embedding sends each source node beta to a closed target-tree interval
[gamma_beta, delta_beta]; the inflationary host sequence accumulated along
those intervals lifts source exits by degree-0 ultrapowers. The standardness
checklist verifies that every dropdown entry lifts coherently, that lifted
maps agree below critical points, and that successor steps commute with the
star maps on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from mino.errors import EmbeddingError, SequenceError, TreeError, UltrapowerError
from mino.mouse import (
    Premouse,
    cardinal_successor,
    dropdown,
    is_segment_of,
    rho_at,
    segment,
    ult_applies,
    ultrapower_seq,
)
from mino.stepfn import IDENTITY, StepMap
from mino.trees import (
    IterationTree,
    append_extender,
    branch_hosts,
    kappa_site,
    node_dropdown,
    prefix,
)

# Would-be limit-recursion branches; finite lengths never reach them, and the
# harness reports these to confirm vacuity.
limit_clause_hits = {"inflationary-sequence": 0, "interval-limit": 0}
# (mu+) fallback firings inside the embedding-agreement clause.
fallback_hits = {"cardinal-successor-at-height": 0, "index-matches-segment-top": 0}


@dataclass(frozen=True)
class TreePreEmbedding:
    source: IterationTree  # T, embedded up to theta = len(intervals)
    target: IterationTree  # X
    intervals: tuple  # of (gamma, delta) node pairs in X

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    @property
    def theta(self) -> int:
        return len(self.intervals)

    def gamma(self, b: int) -> int:
        return self.intervals[b][0]

    def delta(self, b: int) -> int:
        return self.intervals[b][1]

    def interval_nodes(self, b: int) -> tuple:
        return self.target.tree_interval(*self.intervals[b])

    def owner(self, xi: int) -> Optional[int]:
        for b in range(self.theta):
            if xi in self.interval_nodes(b):
                return b
        return None

    def chain(self) -> tuple:
        """All interval members; their host sequences are nested prefixes."""
        out = []
        for b in range(self.theta):
            out.extend(self.interval_nodes(b))
        return tuple(out)


def identity_embedding(T: IterationTree) -> TreePreEmbedding:
    return TreePreEmbedding(T, T, tuple((b, b) for b in range(len(T))))


def trivial_embedding(T: IterationTree, X: IterationTree) -> TreePreEmbedding:
    return TreePreEmbedding(T, X, ((0, 0),))


def with_target(pre: TreePreEmbedding, X: IterationTree) -> TreePreEmbedding:
    """The same interval system viewed into a longer target tree."""
    return TreePreEmbedding(pre.source, X, pre.intervals)


@dataclass(frozen=True)
class EmbeddingReport:
    ok: bool
    clause: str = ""
    detail: str = ""


def validate_pre_embedding(pre: TreePreEmbedding) -> EmbeddingReport:
    """Check the seven pre-embedding clauses; name the first failure."""
    T, X = pre.source, pre.target
    th = pre.theta
    if th == 0 or th > len(T):
        return EmbeddingReport(False, "shape", "interval count out of range")
    for b in range(th):
        g, d = pre.intervals[b]
        if not (0 <= g < len(X) and 0 <= d < len(X)) or not X.tree_le(g, d):
            return EmbeddingReport(False, "interval", f"I_{b} is not a tree interval")
    if pre.gamma(0) != 0:
        return EmbeddingReport(False, "root", "gamma_0 must be 0")
    for b in range(th - 1):
        if pre.gamma(b + 1) <= pre.gamma(b):
            return EmbeddingReport(False, "order-preserving", f"gamma not increasing at {b + 1}")
    for b0 in range(th):
        for b1 in range(th):
            if T.tree_lt(b0, b1) != X.tree_lt(pre.gamma(b0), pre.gamma(b1)):
                return EmbeddingReport(
                    False, "tree-order", f"nodes {b0},{b1} vs their images"
                )
    for b in range(th):
        if X.degree(pre.gamma(b)) != T.degree(b):
            return EmbeddingReport(False, "degree-match", f"at source node {b}")
    for b in range(th - 1):
        if pre.gamma(b + 1) != pre.delta(b) + 1:
            return EmbeddingReport(False, "successor-step", f"gamma_{b + 1} != delta_{b}+1")
    for b1 in range(1, th):
        xi = T.nodes[b1].pred
        eta = X.nodes[pre.gamma(b1)].pred
        if eta not in pre.interval_nodes(xi):
            return EmbeddingReport(False, "predecessor", f"image pred of {b1} outside I_{xi}")
        x_drop = any(
            X.nodes[c].drop_degree
            for c in X.tree_interval(pre.gamma(xi), pre.gamma(b1))[1:]
        )
        if x_drop != T.nodes[b1].drop_degree:
            return EmbeddingReport(False, "predecessor", f"degree-drop mismatch at {b1}")
    return EmbeddingReport(True)


# -- inflationary host sequences -------------------------------------------


def infl_hosts(pre: TreePreEmbedding, xi: int) -> tuple:
    """The inflationary host sequence at target node xi."""
    cache = pre._cache.setdefault("hosts", {})
    if xi in cache:
        return cache[xi]
    b = pre.owner(xi)
    if b is None:
        raise EmbeddingError(f"target node {xi} lies outside every interval")
    if xi == pre.gamma(b):
        value = () if b == 0 else infl_hosts(pre, pre.delta(b - 1))
    else:
        value = infl_hosts(pre, pre.gamma(b)) + branch_hosts(
            pre.target, pre.gamma(b), xi
        )
    cache[xi] = value
    return value


def exit_lift(pre: TreePreEmbedding, a: int, xi: int):
    """Q_{a,xi}: the degree-0 ultrapower of the source exit at a along F_xi."""
    return ultrapower_seq(pre.source.exit(a), 0, infl_hosts(pre, xi))


def lift_extender_level(pre: TreePreEmbedding, xi: int) -> int:
    """Index of the lifted copy extender at xi (top of the lifted exit)."""
    b = pre.owner(xi)
    if b is None or b + 1 >= len(pre.source):
        raise EmbeddingError(f"no source extender to lift at target node {xi}")
    return exit_lift(pre, b, xi).final.height


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    bounding: bool
    exactly_bounding: bool
    puta_minimal: bool
    detail: str = ""


def _interval_lifts_contained(pre, a):
    """Goodness of the exit hosts plus segment containment over I_a."""
    X = pre.target
    for xi in pre.interval_nodes(a):
        try:
            q = exit_lift(pre, a, xi).final
        except SequenceError as err:
            return False, f"hosts at node {xi} not good on exit {a}: {err}"
        if not is_segment_of(q, X.model(xi)):
            return False, f"lifted exit at node {xi} not a segment of the model"
    return True, ""


def _relaxed_final_interval(pre, a):
    """The conditional final-interval clause of the puta-minimal relaxation."""
    X = pre.target
    g = pre.gamma(a)
    try:
        qg = exit_lift(pre, a, g).final
    except SequenceError:
        return True  # antecedent fails; the clause holds vacuously
    if not is_segment_of(qg, X.model(g)):
        return True
    if not _is_pregood(pre.source.exit(a), 0, infl_hosts(pre, pre.delta(a))):
        return False
    for xi in pre.interval_nodes(a):
        if xi == pre.delta(a):
            continue
        try:
            q = exit_lift(pre, a, xi).final
        except SequenceError:
            return False
        if not is_segment_of(q, X.model(xi)):
            return False
    return True


def check_minimal(pre: TreePreEmbedding) -> MinimalityReport:
    """Evaluate minimality, the bounding flags, and the puta-minimal relaxation."""
    T, X = pre.source, pre.target
    th = pre.theta
    minimal = True
    puta = True
    detail = ""

    def fail(msg, puta_too=True):
        nonlocal minimal, puta, detail
        minimal = False
        if puta_too:
            puta = False
        if not detail:
            detail = msg

    for a in range(th):
        if a + 1 == len(T):
            if X.drops_in(pre.gamma(a), pre.delta(a)):
                fail(f"final interval I_{a} drops in model or degree")
            continue
        ok, msg = _interval_lifts_contained(pre, a)
        if not ok:
            if a + 1 == th and _relaxed_final_interval(pre, a):
                fail(msg, puta_too=False)
            else:
                fail(msg)
            continue
        if a + 1 < th:
            q_end = exit_lift(pre, a, pre.delta(a)).final
            lam = X.nodes[pre.delta(a)].extender_level
            if lam != q_end.height:
                fail(f"exit-copy condition fails at delta_{a}")

    bounding = exactly = minimal
    if minimal:
        for a in range(th):
            if a + 1 >= len(T):
                continue
            for xi in pre.interval_nodes(a):
                if xi + 1 >= len(X) or X.nodes[xi].extender_level is None:
                    continue
                lh = X.extender_level(xi)
                q = exit_lift(pre, a, xi).final
                if lh > q.height:
                    bounding = False
                if xi != pre.delta(a) and lh >= q.height:
                    exactly = False
    return MinimalityReport(minimal, bounding, exactly and bounding, puta, detail)


# -- dropdown lifts and the standardness checklist ---------------------------


class DropdownLifts:
    """Lazy lift data for a pre-embedding: models U, maps pi, sub-intervals."""

    def __init__(self, pre: TreePreEmbedding):
        self.pre = pre
        self._entries = {}
        self._delta_sub = {}
        self._ults = {}

    def entries(self, b: int) -> tuple:
        """Revex dropdown entries of source node b: position 0 is the model."""
        if b not in self._entries:
            self._entries[b] = node_dropdown(self.pre.source, b)
        return self._entries[b]

    def k(self, b: int) -> int:
        return len(self.entries(b)) - 1

    def domain(self):
        return tuple((b, i) for b in range(self.pre.theta) for i in range(self.k(b) + 1))

    def delta_sub(self, b: int, i: int) -> Optional[int]:
        """Largest node of I_b whose hosts are pre-good on entry (b, i)."""
        key = (b, i)
        if key not in self._delta_sub:
            M, m = self.entries(b)[i]
            best = None
            for xi in self.pre.interval_nodes(b):
                hosts = infl_hosts(self.pre, xi)
                if _is_pregood(M, m, hosts):
                    best = xi
                else:
                    break
            self._delta_sub[key] = best
        return self._delta_sub[key]

    def gamma_sub(self, b: int, i: int) -> Optional[int]:
        if i == 0:
            return self.pre.gamma(b)
        return self.delta_sub(b, i - 1)

    def sub_interval(self, b: int, i: int) -> tuple:
        g, d = self.gamma_sub(b, i), self.delta_sub(b, i)
        if g is None or d is None or not self.pre.target.tree_le(g, d):
            return ()
        return self.pre.target.tree_interval(g, d)

    def J_nodes(self, b: int, i: int) -> tuple:
        d = self.delta_sub(b, i)
        if d is None:
            return ()
        return self.pre.target.tree_interval(self.pre.gamma(b), d)

    def i_sub(self, b: int, xi: int) -> int:
        for i in range(self.k(b) + 1):
            if xi in self.sub_interval(b, i):
                return i
        raise EmbeddingError(f"node {xi} outside the sub-intervals of {b}")

    def lift(self, b: int, i: int, xi: int):
        """U_{b,i,xi} and its map pi_{b,i,xi}."""
        key = (b, i, xi)
        if key not in self._ults:
            M, m = self.entries(b)[i]
            self._ults[key] = ultrapower_seq(M, m, infl_hosts(self.pre, xi))
        return self._ults[key]

    def pre_standard(self):
        """The pre-standardness clauses; returns (ok, detail)."""
        pre = self.pre
        for b in range(pre.theta):
            kb = self.k(b)
            if self.delta_sub(b, kb) != pre.delta(b):
                return False, f"delta_({b},{kb}) != delta_{b}"
            for i in range(kb + 1):
                d = self.delta_sub(b, i)
                if d is None or d not in pre.interval_nodes(b):
                    return False, f"delta_({b},{i}) outside I_{b}"
                if i + 1 <= kb and d > self.delta_sub(b, i + 1):
                    return False, f"delta_({b},{i}) above delta_({b},{i + 1})"
        return True, ""

    def xi_kappa(self, kappa: int):
        """(b, n, xi): the least lift site whose map clears kappa."""
        pre = self.pre
        T, X = pre.source, pre.target
        b, n = kappa_site(T, kappa)
        if b + 1 == len(T) and kappa == T.model(b).height:
            return b, 0, pre.delta(b)
        d = self.delta_sub(b, n)
        nodes = self.J_nodes(b, n)
        for xi in nodes:
            if xi == d:
                return b, n, xi
            mu = self.lift(b, n, xi).map(kappa)
            s = X.tree_succ(xi, d)
            # stop once the next branch extender no longer touches the
            # (mu+)-segment; the stretch rule fixes critical points, so the
            # segment survives crit equality and the bound is non-strict
            if mu <= X.exit(s - 1).top_extender.crit:
                return b, n, xi
        raise EmbeddingError(f"no lift site for critical point {kappa}")


def _is_pregood(M: Premouse, m: int, hosts) -> bool:
    try:
        ultrapower_seq(M, m, hosts)
        return True
    except SequenceError as err:
        return err.kind == "illfounded" and err.position == len(hosts) - 1


@dataclass(frozen=True)
class StandardReport:
    ok: bool
    failures: tuple  # of (clause, detail)
    counters: dict


def check_standard(pre: TreePreEmbedding) -> StandardReport:
    """The full lift-coherence checklist over a puta-minimal embedding."""
    failures = []
    counters = {"ms-indexing-case": 0, "agreement-pairs": 0, "shift-lemma-nodes": 0}

    def fail(clause, detail):
        failures.append((clause, detail))

    T, X = pre.source, pre.target
    rep = check_minimal(pre)
    if not rep.minimal:
        fail("minimal", rep.detail)
    lifts = DropdownLifts(pre)
    ok_pre, detail = lifts.pre_standard()
    if not ok_pre:
        fail("pre-standard", detail)
        return StandardReport(False, tuple(failures), counters)

    _check_lift_clauses(pre, lifts, fail)
    _check_agreement(pre, lifts, fail, counters)
    _check_commutativity(pre, lifts, fail, counters)
    return StandardReport(not failures, tuple(failures), counters)


def _check_lift_clauses(pre: TreePreEmbedding, lifts: DropdownLifts, fail):
    T, X = pre.source, pre.target
    for (a, i) in lifts.domain():
        Mi, mi = lifts.entries(a)[i]
        for xi in lifts.J_nodes(a, i):
            try:
                u = lifts.lift(a, i, xi)
            except SequenceError as err:
                fail("dropdowns-lift", f"lift ({a},{i},{xi}) not good: {err}")
                continue
            if xi == pre.gamma(a) and i == 0:
                if (u.final, mi) != (X.model(xi), X.degree(xi)):
                    fail("dropdowns-lift", f"U_({a},0) differs from the image model")
            if not is_segment_of(u.final, X.model(xi)):
                fail("dropdowns-lift", f"U_({a},{i},{xi}) not a segment of the model")
            elif mi > X.degree(xi) and u.final == X.model(xi):
                fail("dropdowns-lift", f"U_({a},{i},{xi}) degree above the model degree")
            in_sub = xi in lifts.sub_interval(a, i) and xi != lifts.gamma_sub(a, i)
            if in_sub and (u.final, mi) != (X.model(xi), X.degree(xi)):
                fail("dropdowns-lift", f"U_({a},{i},{xi}) should equal the model")
        if i == 0:
            sub0 = lifts.sub_interval(a, 0)
            if any(X.nodes[c].drop_degree for c in sub0[1:]):
                fail("no-drop-first-subinterval", f"inside I_({a},0)")
        if i > 0:
            sub = lifts.sub_interval(a, i)
            if len(sub) > 1:
                eps = sub[1]
                drops = [c for c in sub[1:] if X.nodes[c].drop_degree]
                if drops != [eps]:
                    fail("drop-at-subinterval-entry", f"I_({a},{i}) drops at {drops}")
                else:
                    u_entry = lifts.lift(a, i, lifts.gamma_sub(a, i))
                    node = X.nodes[eps]
                    if (node.star_model, node.star_degree) != (u_entry.final, mi):
                        fail(
                            "drop-at-subinterval-entry",
                            f"star pair at {eps} differs from U_({a},{i})",
                        )
    # dropdown correspondence at exits
    for a in range(pre.theta):
        if a + 1 >= len(T):
            continue
        ka = lifts.k(a)
        try:
            q0 = exit_lift(pre, a, pre.gamma(a)).final
        except SequenceError:
            continue
        revex = dropdown(X.model(pre.gamma(a)), X.degree(pre.gamma(a)), q0, 0).revex
        lifted = tuple((lifts.lift(a, j, pre.gamma(a)).final, lifts.entries(a)[j][1]) for j in range(ka + 1))
        if revex != lifted:
            fail("dropdown-correspondence", f"at gamma_{a}")
        for i in range(ka + 1):
            for xi in lifts.sub_interval(a, i):
                if xi == lifts.gamma_sub(a, i):
                    continue
                q = exit_lift(pre, a, xi).final
                revex_xi = dropdown(X.model(xi), X.degree(xi), q, 0).revex
                lifted_xi = tuple(
                    (lifts.lift(a, j, xi).final, lifts.entries(a)[j][1])
                    for j in range(i, ka + 1)
                )
                if revex_xi != lifted_xi:
                    fail("dropdown-correspondence", f"at ({a},{i},{xi})")


def _mu_successor_segment(U: Premouse, mu: int):
    """U || (mu+)^U, counting the fallback at the height."""
    t = cardinal_successor(U, mu) if mu < U.height else U.height
    if t == U.height and (mu >= U.height or not U.level(t).cardinal):
        fallback_hits["cardinal-successor-at-height"] += 1
    return segment(U, t, passive=True)


def _check_agreement(pre: TreePreEmbedding, lifts: DropdownLifts, fail, counters):
    T, X = pre.source, pre.target
    grid = []
    for (b, i) in lifts.domain():
        for xi in lifts.J_nodes(b, i):
            grid.append((b, i, xi))
    for a in range(pre.theta):
        if a + 1 >= len(T):
            continue
        nu = T.nu_tilde(a)
        for kappa in range(1, nu):
            if kappa_site(T, kappa)[0] != a:
                continue
            i = kappa_site(T, kappa)[1]
            try:
                b0, i0, xi0 = lifts.xi_kappa(kappa)
            except EmbeddingError as err:
                fail("embedding-agreement", str(err))
                continue
            u = lifts.lift(b0, i0, xi0)
            mu = u.map(kappa)
            for (b1, i1, xi1) in grid:
                if (b1, i1, xi1) < (b0, i0, xi0):
                    continue
                counters["agreement-pairs"] += 1
                u1 = lifts.lift(b1, i1, xi1)
                if _mu_successor_segment(u.final, mu) != _mu_successor_segment(u1.final, mu):
                    fail("embedding-agreement", f"segments at mu={mu} differ: "
                         f"({b0},{i0},{xi0}) vs ({b1},{i1},{xi1})")
                if not u.map.agrees_with(u1.map, kappa):
                    fail("embedding-agreement", f"maps differ at or below {kappa}")
                if b0 < b1 and i0 == lifts.k(b0) and xi0 == pre.delta(b0):
                    ex = T.exit(b0)
                    iota = max(ex.cardinal_levels())
                    if not u.map.agrees_with(u1.map, iota - 1):
                        fail("embedding-agreement", f"maps differ below lgcd {iota}")
                    lh = ex.height
                    for d in range(lh):
                        if u.map(d) > u1.map(d):
                            fail("embedding-agreement", f"hat-map exceeds later map at {d}")
                            break
                    M1 = lifts.entries(b1)[i1][0]
                    if lh < M1.height:
                        if X.extender_level(pre.delta(b0)) > u1.map(lh):
                            fail("embedding-agreement", "lifted index above the image of lh")
                    elif lh == M1.height:
                        counters["ms-indexing-case"] += 1


def _check_commutativity(pre: TreePreEmbedding, lifts: DropdownLifts, fail, counters):
    T, X = pre.source, pre.target
    for b1 in range(1, pre.theta):
        chi = T.nodes[b1].pred
        star = (T.nodes[b1].star_model, T.nodes[b1].star_degree)
        i = next(
            (j for j, e in enumerate(lifts.entries(chi)) if e == star),
            None,
        )
        if i is None:
            fail("commutativity", f"star pair of {b1} missing from dropdown of {chi}")
            continue
        g1 = pre.gamma(b1)
        xi = X.nodes[g1].pred
        if xi not in lifts.sub_interval(chi, i):
            fail("commutativity", f"image pred {xi} outside I_({chi},{i})")
            continue
        if i > 0:
            at_entry = xi == lifts.gamma_sub(chi, i)
            if at_entry != X.nodes[g1].drop_degree:
                fail("commutativity", f"drop flag at {g1} disagrees with entry position")
        pi_next = lifts.lift(b1, 0, g1).map
        pi_site = lifts.lift(chi, i, xi).map
        lhs = pi_next.after(T.nodes[b1].star_map)
        rhs = X.nodes[g1].star_map.after(pi_site)
        bound = T.nodes[b1].star_model.height
        if not lhs.agrees_with(rhs, bound):
            fail("commutativity", f"square at source node {b1} does not commute")
        for eps in range(b1, pre.theta):
            if not T.tree_le(b1, eps):
                continue
            if T.drops_in(chi, eps):
                continue
            try:
                x_map = X.iter_map(pre.gamma(chi), pre.gamma(eps))
            except TreeError as err:
                fail("commutativity", f"image branch {chi}->{eps} drops: {err}")
                continue
            lhs2 = lifts.lift(eps, 0, pre.gamma(eps)).map.after(T.iter_map(chi, eps))
            rhs2 = x_map.after(lifts.lift(chi, 0, pre.gamma(chi)).map)
            if not lhs2.agrees_with(rhs2, T.model(chi).height):
                fail("commutativity", f"branch square {chi}->{eps} does not commute")
        # shift-lemma identity at b1
        counters["shift-lemma-nodes"] += 1
        kappa = T.exit(b1 - 1).top_extender.crit
        site = lifts.xi_kappa(kappa)
        if site[:2] != (chi, i) or site[2] != xi:
            fail("shift-lemma", f"site for crit {kappa} is {site}, expected ({chi},{i},{xi})")
            continue
        u_site = lifts.lift(chi, i, xi)
        node = X.nodes[g1]
        if (node.star_model, node.star_degree) != (u_site.final, lifts.entries(chi)[i][1]):
            fail("shift-lemma", f"star pair at {g1} differs from the lift at the site")
        omega = exit_lift(pre, b1 - 1, pre.delta(b1 - 1))
        lh_src = T.extender_level(b1 - 1)
        if not pi_next.agrees_with(omega.map, lh_src - 1):
            fail("shift-lemma", f"lift map at {b1} disagrees with the exit map below lh")


# -- propagation steps --------------------------------------------------------


def one_step_copy(X: IterationTree, pre: TreePreEmbedding):
    """Extend X by the lifted copy of the next source extender.

    pre must embed (T, a+1) with a+1 < lh(T) and delta_a the last X node;
    the new source node a+1 maps to the singleton interval at the new end.
    """
    a = pre.theta - 1
    if a + 1 >= len(pre.source):
        raise EmbeddingError("no source extender left to copy")
    d = pre.delta(a)
    if d != len(X) - 1:
        raise EmbeddingError("the final interval must end at the last node of X")
    view = with_target(pre, X)
    lam = lift_extender_level(view, d)
    X2 = append_extender(X, lam)
    intervals = pre.intervals + ((d + 1, d + 1),)
    return X2, TreePreEmbedding(pre.source, X2, intervals)


def e_inflation(X: IterationTree, pre: TreePreEmbedding, lam: int):
    """Extend X by an inflationary extender and truncate the embedding.

    The new node's predecessor must land inside some interval I_b; when the
    source still has extenders past b, the extender must apply to the lifted
    exit there (error "exits-C"); when b+1 = lh(T), the new node must not
    drop in model or degree (error "terminally-dropping").
    """
    T = pre.source
    X2 = append_extender(X, lam)
    eta1 = len(X2) - 1
    xi = X2.nodes[eta1].pred
    view = with_target(pre, X)
    b = view.owner(xi)
    if b is None:
        raise EmbeddingError(f"pred-outside-intervals: node {xi}")
    if b + 1 < len(T):
        q = exit_lift(view, b, xi).final
        err = ult_applies(q, 0, X2.exit(eta1 - 1))
        if err is not None:
            raise EmbeddingError(f"exits-C: {err.reason}")
    else:
        if X2.nodes[eta1].drop_degree:
            raise EmbeddingError("terminally-dropping")
    intervals = pre.intervals[:b] + ((pre.gamma(b), eta1),)
    return X2, TreePreEmbedding(T, X2, intervals)


def xi_kappa(pre: TreePreEmbedding, b: int, kappa: int):
    """(xi, U, pi): the least lift site for kappa, with its model and map."""
    T = pre.source
    site_b, _ = kappa_site(T, kappa)
    if site_b != b:
        raise EmbeddingError(f"critical point {kappa} is caught at node {site_b}, not {b}")
    lifts = DropdownLifts(pre)
    bb, n, xi = lifts.xi_kappa(kappa)
    u = lifts.lift(bb, n, xi)
    return xi, u.final, u.map
