"""Stack normalization, minimal comparison, and the derived strategy facts.

normalize_pair builds the unique tree X with T ~> X and X/T = U by
inserting each factor extender at its index bound and unravelling with
copy steps; the factor round-trip is re-derived and any divergence is a
hard error. Stacks fold pairwise; comparison appends least-index lifted
copies until no input is pending.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from mino.embedding import (
    TreePreEmbedding,
    check_minimal,
    infl_hosts,
    validate_pre_embedding,
)
from mino.errors import (
    BudgetError,
    CompareError,
    EmbeddingError,
    NormalizeError,
    SequenceError,
    TreeError,
)
from mino.factor import factor_order, factor_tree, unravel
from mino.inflation import (
    InflationWitness,
    check_inflation,
    classify,
    extend_inflation,
    final_hosts,
    pi_infinity,
)
from mino.mouse import Premouse, segment, ultrapower_seq
from mino.stepfn import IDENTITY, StepMap, compose_all
from mino.trees import IterationTree, branch_hosts, new_tree, append_extender, prefix


@dataclass(frozen=True)
class Stack:
    base: Premouse
    base_degree: int
    rounds: tuple  # successor-length trees, each rooted at the previous end

    def __post_init__(self):
        model, degree = self.base, self.base_degree
        for i, r in enumerate(self.rounds):
            if r.base != model or r.base_degree != degree:
                raise NormalizeError(f"round {i} is not rooted at the previous end")
            model, degree = r.model(len(r) - 1), r.degree(len(r) - 1)

    @property
    def final_model(self) -> Premouse:
        if not self.rounds:
            return self.base
        last = self.rounds[-1]
        return last.model(len(last) - 1)

    @property
    def final_degree(self) -> int:
        if not self.rounds:
            return self.base_degree
        last = self.rounds[-1]
        return last.degree(len(last) - 1)

    def drops(self, lo: int = 0, hi: Optional[int] = None) -> bool:
        """Whether some main branch of rounds [lo, hi) drops in model or degree."""
        hi = len(self.rounds) if hi is None else hi
        return any(r.main_branch_drops() for r in self.rounds[lo:hi])

    def iter_map(self, lo: int = 0, hi: Optional[int] = None) -> StepMap:
        hi = len(self.rounds) if hi is None else hi
        if self.drops(lo, hi):
            raise NormalizeError("stack branch drops in model or degree")
        return compose_all(
            r.iter_map(0, len(r) - 1) for r in self.rounds[lo:hi]
        )


def normalize_pair(T: IterationTree, U: IterationTree):
    """The unique X with T ~> X and X/T = U; returns (X, witness)."""
    if U.base != T.model(len(T) - 1) or U.base_degree != T.degree(len(T) - 1):
        raise NormalizeError("U is not rooted at the last model of T")
    X = T
    w = check_inflation(T, X).witness
    for eps in range(len(U) - 1):
        if X.model(len(X) - 1) != U.model(eps):
            raise NormalizeError(f"stage {eps}: last model differs from the round model")
        lam = U.extender_level(eps)
        zeta = len(X) - 1
        for xi in range(len(X) - 1):
            if X.extender_level(xi) >= lam:
                zeta = xi
                break
        Xp = prefix(X, zeta + 1)
        wp = check_inflation(T, Xp).witness
        X2, w2 = extend_inflation(T, Xp, wp, lam)
        X, w = unravel(T, X2, w2)
    ft = factor_tree(T, X, w)
    if ft.tree != U:
        raise NormalizeError("round-trip failed: the factor of the result is not U")
    return X, w


@dataclass(frozen=True)
class NormalizationTrace:
    stack: Stack
    ys: tuple  # Y_0 .. Y_n
    checks: tuple  # of (name, ok, detail)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def result(self) -> IterationTree:
        return self.ys[-1]


def normalize_stack(stack: Stack) -> NormalizationTrace:
    """Left fold of normalize_pair with the bookkeeping identities checked."""
    ys = [new_tree(stack.base, stack.base_degree)]
    for r in stack.rounds:
        ys.append(normalize_pair(ys[-1], r)[0])
    checks = []

    def check(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    n = len(stack.rounds)
    # terminal inflation stack: every later Y inflates every earlier one
    for b in range(n + 1):
        for g in range(b + 1, n + 1):
            res = check_inflation(ys[b], ys[g])
            if not res:
                check("inflation-stack", False, f"Y_{b} !~> Y_{g}: {res.refusal}")
                continue
            out = classify(ys[b], ys[g], res.witness)
            check("inflation-stack", out.terminal, f"Y_{g} pending over Y_{b}")
            stack_drop = stack.drops(b, g)
            check(
                "drop-pattern",
                (out.terminally_dropping is True) == stack_drop,
                f"rounds [{b},{g})",
            )
            if not stack_drop:
                check(
                    "map-identity",
                    out.pi_infinity.agrees_with(
                        stack.iter_map(b, g), ys[b].model(len(ys[b]) - 1).height
                    ),
                    f"rounds [{b},{g})",
                )
    # factor identities per round
    for i, r in enumerate(stack.rounds):
        ft = factor_tree(ys[i], ys[i + 1])
        check("factor-round", ft.tree == r, f"round {i}")
    x = ys[-1]
    check("final-model", x.model(len(x) - 1) == stack.final_model)
    check("final-degree", x.degree(len(x) - 1) == stack.final_degree)
    check(
        "main-drop",
        x.main_branch_drops() == stack.drops(),
    )
    if not stack.drops():
        check(
            "main-map",
            x.iter_map(0, len(x) - 1).agrees_with(stack.iter_map(), stack.base.height),
        )
    trace = NormalizationTrace(stack, tuple(ys), tuple(checks))
    if not trace.ok:
        raise NormalizeError(
            "; ".join(f"{n}: {d}" for n, ok, d in checks if not ok)
        )
    return trace


def step_budget(default: int) -> int:
    env = os.environ.get("MINO_STEP_BUDGET")
    return int(env) if env else default


def compare(trees, budget: Optional[int] = None):
    """Deterministic minimal comparison of a nonempty family of trees.

    At each step the pending tree with the least lifted copy index acts
    (ties to the earliest input); stops when no input is pending.
    Returns (X, witnesses).
    """
    trees = tuple(trees)
    if not trees:
        raise CompareError("nothing to compare")
    base, degree = trees[0].base, trees[0].base_degree
    if any(t.base != base or t.base_degree != degree for t in trees):
        raise CompareError("inputs are not on a common base")
    if budget is None:
        budget = step_budget(len(trees) * sum(len(t) for t in trees) + 1)
    X = new_tree(base, degree)
    ws = [_witness(t, X) for t in trees]
    steps = 0
    while True:
        last = len(X) - 1
        pending = [
            (w.copy_level(last), i)
            for i, (t, w) in enumerate(zip(trees, ws))
            if w.in_C_minus(last)
        ]
        if not pending:
            break
        steps += 1
        if steps > budget:
            raise BudgetError(f"comparison exceeded the step budget {budget}")
        lam, _ = min(pending)
        X = append_extender(X, lam)
        ws = [_witness(t, X) for t in trees]
    if not any(w.in_C(len(X) - 1) for w in ws):
        raise CompareError("no input is terminally non-dropping over the comparison")
    return X, tuple(ws)


@dataclass(frozen=True)
class RouteReport:
    ok: bool
    failures: tuple


def comparison_factor_check(T0: IterationTree, T1: IterationTree) -> RouteReport:
    """Both comparison routes: factor trees of the joint comparison against
    the padded least-disagreement comparison of the two final models."""
    failures = []

    def fail(msg):
        failures.append(msg)

    X, (w0, w1) = compare((T0, T1))
    u = [factor_tree(t, X, w).tree for t, w in ((T0, w0), (T1, w1))]
    # interleaving from the factor data: which side each inflationary step feeds
    pattern = []
    for a in range(len(X) - 1):
        acts = (w0.t[a] == 1, w1.t[a] == 1)
        if acts == (True, True):
            fail(f"step {a} copies neither input")
        elif acts != (False, False):
            pattern.append(acts)
    # independent route: least-disagreement comparison of the final models
    sides = [new_tree(T0.model(len(T0) - 1), T0.degree(len(T0) - 1)),
             new_tree(T1.model(len(T1) - 1), T1.degree(len(T1) - 1))]
    oracle_pattern = []
    guard = 0
    while True:
        guard += 1
        if guard > len(X) + 2:
            fail("oracle comparison did not settle")
            break
        p = [s.model(len(s) - 1) for s in sides]
        if p[0] == p[1]:
            break
        lam = None
        for level in range(1, min(p[0].height, p[1].height) + 1):
            if segment(p[0], level) != segment(p[1], level):
                lam = level
                break
        if lam is None:
            fail("models are segment-comparable but unequal")
            break
        e = [q.level(lam).active if lam <= q.height else None for q in p]
        if e[0] == e[1]:
            fail(f"least disagreement at {lam} is not an extender disagreement")
            break
        act = (e[0] is not None and (e[1] is None or e[0] != e[1]),
               e[1] is not None and (e[0] is None or e[1] != e[0]))
        if act == (True, True):
            fail(f"both sides active at the least disagreement {lam}")
            break
        oracle_pattern.append(act)
        for i in (0, 1):
            if act[i]:
                sides[i] = append_extender(sides[i], lam)
    else:
        pass
    if not failures:
        if pattern != oracle_pattern:
            fail(f"padding patterns differ: {pattern} vs {oracle_pattern}")
        for i in (0, 1):
            if sides[i] != u[i]:
                fail(f"route disagreement on side {i}")
    return RouteReport(not failures, tuple(failures))


@dataclass(frozen=True)
class AssocReport:
    ok: bool
    failures: tuple
    left: Optional[IterationTree] = None
    right: Optional[IterationTree] = None


def check_associativity(T0, T1, T2) -> AssocReport:
    """Both association orders of a three-round stack, plus the embedding
    transport between the two-round normalizations."""
    failures = []
    w = normalize_pair(T1, T2)[0]
    left = normalize_pair(T0, w)[0]
    x01 = normalize_pair(T0, T1)[0]
    right = normalize_pair(x01, T2)[0]
    if left != right:
        failures.append("association orders produce different trees")
    stack = Stack(T0.base, T0.base_degree, (T0, T1, T2))
    folded = normalize_stack(stack).result
    if folded != right:
        failures.append("stack fold differs from the right association")
    # transport along the identity embedding of the inner normalization
    from mino.embedding import identity_embedding

    rep = check_pres_vshc(T0, w, w, identity_embedding(w))
    if not rep.ok:
        failures.extend("transport: " + f for f in rep.failures)
    return AssocReport(not failures, tuple(failures), left, right)


@dataclass(frozen=True)
class TransportReport:
    ok: bool
    failures: tuple
    derived: Optional[TreePreEmbedding] = None


def check_pres_vshc(T, U0, U1, pi: TreePreEmbedding) -> TransportReport:
    """Derive the unique embedding between X(T,U0) and X(T,U1) carrying the
    same inflationary hosts as pi, and validate it."""
    failures = []
    if pi.source is not U0 and pi.source != U0:
        return TransportReport(False, ("embedding source is not U0",), None)
    if pi.theta != len(U0) or pi.delta(pi.theta - 1) != len(U1) - 1:
        return TransportReport(False, ("embedding does not span U0 into U1",), None)
    hosts = infl_hosts(pi, pi.delta(pi.theta - 1))
    x1 = normalize_pair(T, U1)[0]
    x0 = normalize_pair(T, U0)[0]
    intervals = []
    cur = 0
    consumed = 0
    for a in range(len(x0)):
        if a + 1 < len(x0):
            target = _largest_applicable(x0.exit(a), hosts)
        else:
            target = len(hosts)
        node = cur
        while consumed < target:
            node, consumed = _advance_host(x1, node, consumed, hosts, failures)
            if node is None:
                return TransportReport(False, tuple(failures), None)
        intervals.append((cur, node))
        cur = node + 1
        if a + 1 < len(x0) and cur >= len(x1):
            failures.append(f"target tree ends before source node {a + 1}")
            return TransportReport(False, tuple(failures), None)
    derived = TreePreEmbedding(x0, x1, tuple(intervals))
    if not validate_pre_embedding(derived).ok:
        failures.append("derived intervals are not a pre-embedding")
    elif not check_minimal(derived).minimal:
        failures.append("derived embedding is not minimal")
    else:
        got = infl_hosts(derived, derived.delta(len(x0) - 1))
        if got != hosts:
            failures.append("derived embedding carries different hosts")
    return TransportReport(not failures, tuple(failures), derived)


def _largest_applicable(exit_pm, hosts) -> int:
    for eta in range(len(hosts), -1, -1):
        try:
            ultrapower_seq(exit_pm, 0, hosts[:eta])
            return eta
        except SequenceError:
            continue
    return 0


def _advance_host(x1, node, consumed, hosts, failures):
    """Step from node along x1 to the unique child consuming hosts[consumed]."""
    want = hosts[consumed]
    children = [
        d
        for d in range(node + 1, len(x1))
        if x1.nodes[d].pred == node and x1.exit(d - 1) == want
    ]
    if len(children) != 1:
        failures.append(
            f"host {consumed} is matched by {len(children)} children of node {node}"
        )
        return None, consumed
    return children[0], consumed + 1


# -- minimal copies above a cutpoint ------------------------------------------


def is_strong_cutpoint(M: Premouse, delta: int) -> bool:
    """No active level above delta has its critical point below delta."""
    return all(
        M.level(lam).active is None or M.level(lam).active.crit >= delta
        for lam in range(delta + 1, M.height + 1)
    )


def minimal_copy(stack: Stack, U: IterationTree, delta: int) -> IterationTree:
    """Copy an above-delta tree along the stack's branch-derived hosts.

    The stack must be based below delta with a non-dropping composite
    branch; each exit of U is stretched by the concatenated main-branch
    hosts and the copied tree must reproduce U's order.
    """
    if not is_strong_cutpoint(stack.base, delta):
        raise CompareError(f"{delta} is not a strong cutpoint of the base")
    if stack.drops():
        raise CompareError("the stack's composite branch drops")
    bound = delta
    for r in stack.rounds:
        if any(r.extender_level(a) > bound for a in range(len(r) - 1)):
            raise CompareError("a round is not based below the cutpoint image")
        bound = r.iter_map(0, len(r) - 1)(bound)
    if U.base != stack.base or U.base_degree != stack.base_degree:
        raise CompareError("U is not a tree on the stack's base")
    if any(U.extender_level(a) <= delta for a in range(len(U) - 1)):
        raise CompareError("U is not above the cutpoint")
    hosts = []
    for r in stack.rounds:
        hosts.extend(branch_hosts(r, 0, len(r) - 1))
    v = new_tree(stack.final_model, stack.final_degree)
    for a in range(len(U) - 1):
        try:
            lifted = ultrapower_seq(U.exit(a), 0, tuple(hosts)).final
        except SequenceError as err:
            raise NormalizeError(f"exit {a} does not lift along the stack: {err}")
        v = append_extender(v, lifted.height)
        if v.nodes[len(v) - 1].pred != U.nodes[a + 1].pred:
            raise NormalizeError(f"copied tree order diverges at node {a + 1}")
        if v.nodes[len(v) - 1].drop_degree != U.nodes[a + 1].drop_degree:
            raise NormalizeError(f"copied drop pattern diverges at node {a + 1}")
    return v


def pullback_consistent(stack: Stack, U: IterationTree, delta: int) -> bool:
    """U inflates into the normalization of the stack extended by its copy."""
    v = minimal_copy(stack, U, delta)
    bigger = Stack(stack.base, stack.base_degree, stack.rounds + (v,))
    x = normalize_stack(bigger).result
    return bool(check_inflation(U, x))
