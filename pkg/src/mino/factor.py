"""The factor order and factor tree of a good minimal inflation.

Factor nodes sit at the inflationary extenders of the (eagerly unravelled)
target: node 0 is the root, node a+1 enters at the target node right after
the a-th inflationary extender. Each factor node owns an unravelled prefix
tree whose last model is the factor tree's model there.

Order items 1-3 and the branch item 4(a) are checked in the unravelled
tree's own coordinates; the remaining branch-agreement content is covered
by the flattening map identities and the round-trip invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from mino.embedding import DropdownLifts
from mino.errors import EmbeddingError, FactorError, NormalizeError, TreeError
from mino.inflation import (
    InflationWitness,
    check_inflation,
    classify,
    extend_inflation,
    final_hosts,
)
from mino.mouse import ultrapower_seq
from mino.trees import IterationTree, append_extender, kappa_site, new_tree, prefix


def unravel(T: IterationTree, X: IterationTree, w: InflationWitness):
    """Extend X by copy steps until non-pending; at most lh(T) appends."""
    while classify(T, X, w).pending:
        X, w = extend_inflation(T, X, w, w.copy_level(len(X) - 1))
    return X, w


@dataclass(frozen=True)
class FactorOrderData:
    source: IterationTree  # T
    target: IterationTree  # X as given
    unravelled: IterationTree  # X-hat
    witness: InflationWitness  # for T ~> X-hat
    zetas: tuple  # X-hat indices of inflationary extenders, ascending
    lams: tuple  # lam[a]: the X-hat node where factor node a enters
    eta: tuple  # per X-hat node: its factor node
    preds: tuple  # factor-order predecessor per node (None at 0)
    prefixes: tuple  # X^a: unravelled prefix trees
    prefix_witnesses: tuple
    thetas: tuple  # f(lam^a) when lam^a is in C, else None

    def __len__(self):
        return len(self.lams)

    def in_C(self, a: int) -> bool:
        return self.witness.in_C(self.lams[a])

    def factor_branch(self, b: int) -> tuple:
        out = []
        a: Optional[int] = b
        while a is not None:
            out.append(a)
            a = self.preds[a]
        return tuple(reversed(out))

    def factor_le(self, a: int, b: int) -> bool:
        return a in self.factor_branch(b)


def factor_order(T: IterationTree, X: IterationTree, w=None) -> FactorOrderData:
    if w is None:
        res = check_inflation(T, X)
        if not res:
            raise FactorError(f"not a minimal inflation: {res.refusal}")
        w = res.witness
    xhat, what = unravel(T, X, w)
    zetas = tuple(a for a in range(len(xhat) - 1) if what.t[a] == 1)
    lams = (0,) + tuple(z + 1 for z in zetas)
    eta = []
    for d in range(len(xhat)):
        branch = set(xhat.branch(d))
        entered = [a for a in range(len(lams)) if lams[a] in branch]
        eta.append(max(entered, key=lambda a: lams[a]))
    preds: list = [None]
    for a in range(1, len(lams)):
        preds.append(eta[xhat.nodes[lams[a]].pred])
    prefixes = []
    prefix_ws = []
    thetas = []
    for a in range(len(lams)):
        xp = prefix(xhat, lams[a] + 1)
        wp = check_inflation(T, xp).witness
        if what.in_C(lams[a]):
            xp, wp = unravel(T, xp, wp)
            thetas.append(what.f[lams[a]])
        else:
            thetas.append(None)
        prefixes.append(xp)
        prefix_ws.append(wp)
    data = FactorOrderData(
        T,
        X,
        xhat,
        what,
        zetas,
        lams,
        tuple(eta),
        tuple(preds),
        tuple(prefixes),
        tuple(prefix_ws),
        tuple(thetas),
    )
    problems = check_order_items(data)
    if problems:
        raise FactorError("; ".join(problems))
    return data


def check_order_items(data: FactorOrderData) -> list:
    """The factor-order lemma items in the unravelled coordinates."""
    problems = []
    xhat = data.unravelled
    # item 1: an iteration tree order (successor predecessors sit below)
    for a in range(1, len(data)):
        p = data.preds[a]
        if p is None or not (0 <= p < a):
            problems.append(f"pred of factor node {a} is {p}")
    # item 2: eta is monotone along the target tree order
    for d in range(len(xhat)):
        for c in xhat.branch(d):
            if not data.factor_le(data.eta[c], data.eta[d]):
                problems.append(f"eta not monotone along {c} <= {d}")
    # item 3: lift sites sit in the local window or strictly earlier regions
    for a in range(len(data)):
        if not data.in_C(a):
            continue
        w = data.prefix_witnesses[a]
        xp = data.prefixes[a]
        emb = w.emb(len(xp) - 1)
        lifts = DropdownLifts(emb)
        T = data.source
        for b in range(len(T)):
            top = T.model(b).height
            for kappa in range(1, top + 1):
                try:
                    if kappa_site(T, kappa)[0] != b:
                        continue
                    xi = lifts.xi_kappa(kappa)[2]
                except (TreeError, EmbeddingError):
                    continue
                if xi >= data.lams[a]:
                    continue
                if not data.factor_le(data.eta[xi], a) or data.eta[xi] == a:
                    problems.append(f"site for crit {kappa} at node {xi} misplaced")
    # item 4(a): entry points of factor successors live in the lower region
    for b in range(1, len(data)):
        a = data.preds[b]
        chi = xhat.nodes[data.lams[b]].pred
        if data.eta[chi] != a:
            problems.append(f"entry point of {b} lies in region {data.eta[chi]}, not {a}")
        fh = data.witness.f[chi] if data.witness.in_C(chi) else None
        if data.thetas[a] is not None and fh is not None and fh < data.thetas[a]:
            problems.append(f"stage at the entry point of {b} precedes theta^{a}")
        if data.thetas[b] is not None and fh is not None and fh > data.thetas[b]:
            problems.append(f"stage at the entry point of {b} exceeds theta^{b}")
    return problems


@dataclass(frozen=True)
class FactorTree:
    tree: IterationTree  # U on (last model of T, its degree)
    data: FactorOrderData


def factor_tree(T: IterationTree, X: IterationTree, w=None) -> FactorTree:
    """Build U = X/T and verify the flattening identities (hard failures)."""
    data = factor_order(T, X, w)
    xhat = data.unravelled
    base = T.model(len(T) - 1)
    u = new_tree(base, T.degree(len(T) - 1))
    for z in data.zetas:
        lam = xhat.extender_level(z)
        try:
            u = append_extender(u, lam)
        except TreeError as err:
            raise NormalizeError(f"factor extender at {z} rejected: {err}") from err
    problems = _check_flattening(data, u)
    if problems:
        raise NormalizeError("flattening failed: " + "; ".join(problems))
    return FactorTree(u, data)


def _check_flattening(data: FactorOrderData, u: IterationTree) -> list:
    problems = []
    T, xhat, what = data.source, data.unravelled, data.witness
    n = len(data)
    if len(u) != n:
        return [f"factor tree length {len(u)} != {n}"]
    # extenders and normality came from construction; check predecessors
    for a in range(1, n):
        if u.nodes[a].pred != data.preds[a]:
            problems.append(f"pred mismatch at factor node {a}")
    # item 2: drops along [0,a]_U reflect C-membership at lam^a
    for a in range(n):
        drops = u.drops_in(0, a, include_left=True)
        if drops == data.in_C(a):
            problems.append(f"drop pattern at factor node {a} disagrees with C")
    # item 3: models match the unravelled prefixes
    for a in range(n):
        xp = data.prefixes[a]
        last = len(xp) - 1
        if (u.model(a), u.degree(a)) != (xp.model(last), xp.degree(last)):
            problems.append(f"model at factor node {a} differs from the prefix tree")
    # host representation: F^a equals the inflationary exits along the branch
    hosts = {}
    for a in range(n):
        if not data.in_C(a):
            continue
        wp = data.prefix_witnesses[a]
        hosts[a] = final_hosts(wp)
        expected = tuple(
            xhat.exit(data.zetas[g]) for g in range(n - 1) if g + 1 in data.factor_branch(a)
        )
        if hosts[a] != expected:
            problems.append(f"host sequence at factor node {a} differs")
        wp_final = ultrapower_seq(
            T.model(len(T) - 1), T.degree(len(T) - 1), hosts[a]
        )
        if wp_final.final != u.model(a):
            problems.append(f"ultrapower representation fails at factor node {a}")
    # items 4-5: iteration maps match the factor maps
    for a in range(n):
        for b in range(a, n):
            if not u.tree_le(a, b):
                continue
            no_drop = not u.drops_in(a, b)
            pi_defined, pi = _factor_map(data, hosts, a, b)
            if no_drop != pi_defined:
                problems.append(f"map definedness differs on ({a},{b})")
                continue
            if pi_defined and not u.iter_map(a, b).agrees_with(
                pi, u.model(a).height
            ):
                problems.append(f"iteration map differs on ({a},{b})")
        if a > 0 and not data.in_C(a):
            node_u = u.nodes[a]
            node_x = xhat.nodes[data.lams[a]]
            if (node_u.star_model, node_u.star_degree) != (
                node_x.star_model,
                node_x.star_degree,
            ):
                problems.append(f"star data at factor node {a} differs")
            for b in range(a, n):
                if not u.tree_le(a, b) or (a < b and u.drops_in(a, b)):
                    continue
                try:
                    rhs = xhat.star_iter_map(data.lams[a], data.lams[b])
                except TreeError:
                    problems.append(f"target star map undefined on ({a},{b})")
                    continue
                lhs = u.star_iter_map(a, b)
                if not lhs.agrees_with(rhs, node_u.star_model.height):
                    problems.append(f"star map differs on ({a},{b})")
    # item 6: two-round stack vs the target's main branch
    if not classify(T, data.target, _target_witness(data)).pending:
        t_drop = T.main_branch_drops() or u.main_branch_drops()
        x_drop = data.target.main_branch_drops()
        if t_drop != x_drop:
            problems.append("stack drop pattern differs from the target's")
        elif not t_drop:
            stack_map = u.iter_map(0, n - 1).after(T.iter_map(0, len(T) - 1))
            x_map = data.target.iter_map(0, len(data.target) - 1)
            if not stack_map.agrees_with(x_map, T.base.height):
                problems.append("stack iteration map differs from the target's")
    return problems


def _target_witness(data: FactorOrderData) -> InflationWitness:
    return check_inflation(data.source, data.target).witness


def _factor_map(data: FactorOrderData, hosts, a, b):
    """(defined, map): the factor map pi^{ab} in whichever regime applies."""
    xhat = data.unravelled
    if data.in_C(a):
        if not data.in_C(b) or a not in data.factor_branch(b):
            return False, None
        ha, hb = hosts[a], hosts[b]
        if hb[: len(ha)] != ha:
            return False, None
        seq = ultrapower_seq(
            data.prefixes[a].model(len(data.prefixes[a]) - 1),
            data.prefixes[a].degree(len(data.prefixes[a]) - 1),
            hb[len(ha):],
        )
        return True, seq.map
    la, lb = data.lams[a], data.lams[b]
    if not xhat.tree_le(la, lb):
        return False, None
    if a != b and xhat.drops_in(la, lb):
        return False, None
    return True, xhat.iter_map(la, lb)
