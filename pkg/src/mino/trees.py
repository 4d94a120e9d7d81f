"""Finite maximal iteration trees over the mouse algebra.

Building a tree only ever means appending an extender choice (an active
level of the last model); predecessor, star model, degree and drop flags
are all derived from the dropdown bookkeeping, never stored as choices.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from mino import mutations
from mino.errors import TreeError, UltrapowerError
from mino.mouse import Premouse, dropdown, rho_at, segment, ultrapower
from mino.stepfn import IDENTITY, StepMap, compose_all


@dataclass(frozen=True)
class TreeNode:
    model: Premouse
    degree: int
    pred: Optional[int] = None
    drop_model: bool = False
    drop_degree: bool = False
    extender_level: Optional[int] = None  # lh of this node's extender, once chosen
    star_model: Optional[Premouse] = None
    star_degree: Optional[int] = None
    star_map: Optional[StepMap] = None  # ultrapower map onto this node's model


@dataclass(frozen=True)
class IterationTree:
    base: Premouse
    base_degree: int
    nodes: tuple

    def __len__(self):
        return len(self.nodes)

    @property
    def last(self) -> TreeNode:
        return self.nodes[-1]

    def model(self, a: int) -> Premouse:
        return self.nodes[a].model

    def degree(self, a: int) -> int:
        return self.nodes[a].degree

    def extender_level(self, a: int) -> int:
        lam = self.nodes[a].extender_level
        if lam is None:
            raise TreeError(f"node {a} has no extender")
        return lam

    def exit(self, a: int) -> Premouse:
        """ex_a: the segment of node a's model at its extender's index."""
        return segment(self.model(a), self.extender_level(a))

    def nu_tilde(self, a: int) -> int:
        return self.exit(a).top_extender.nu

    def steps(self) -> tuple:
        """The extender levels in order; replaying them rebuilds the tree."""
        return tuple(self.nodes[a].extender_level for a in range(len(self) - 1))

    # -- tree order ------------------------------------------------------

    def branch(self, b: int) -> tuple:
        """[0, b]_T as a tuple of nodes in order."""
        out = []
        a = b
        while a is not None:
            out.append(a)
            a = self.nodes[a].pred
        return tuple(reversed(out))

    def tree_le(self, a: int, b: int) -> bool:
        return a in self.branch(b)

    def tree_lt(self, a: int, b: int) -> bool:
        return a != b and self.tree_le(a, b)

    def tree_interval(self, a: int, b: int) -> tuple:
        """[a, b]_T; empty if a is not a tree predecessor of b."""
        br = self.branch(b)
        if a not in br:
            return ()
        return br[br.index(a):]

    def tree_succ(self, a: int, b: int) -> int:
        """The immediate <_T-successor of a toward b."""
        iv = self.tree_interval(a, b)
        if len(iv) < 2:
            raise TreeError(f"{a} has no successor toward {b}")
        return iv[1]

    def drops_in(self, a: int, b: int, include_left: bool = False) -> bool:
        """Whether (a, b]_T (or [a, b]_T) meets a drop in model or degree."""
        iv = self.tree_interval(a, b)
        if not iv:
            raise TreeError(f"{a} is not <=_T {b}")
        start = 0 if include_left else 1
        return any(
            self.nodes[c].drop_model or self.nodes[c].drop_degree for c in iv[start:]
        )

    def main_branch_drops(self) -> bool:
        return self.drops_in(0, len(self) - 1)

    def is_terminally_non_dropping(self) -> bool:
        return not self.main_branch_drops()

    # -- iteration maps ----------------------------------------------------

    def iter_map(self, a: int, b: int) -> StepMap:
        """i_{ab}: composite of the ultrapower maps along (a, b]_T."""
        iv = self.tree_interval(a, b)
        if not iv:
            raise TreeError(f"{a} is not <=_T {b}")
        if self.drops_in(a, b):
            raise TreeError(f"({a},{b}]_T drops in model or degree")
        return compose_all(self.nodes[c].star_map for c in iv[1:])

    def star_iter_map(self, a1: int, b: int) -> StepMap:
        """i*_{a1,b}: the star map at a1 composed with i_{a1,b}."""
        iv = self.tree_interval(a1, b)
        if not iv or self.nodes[a1].pred is None:
            raise TreeError(f"star map undefined for ({a1},{b})")
        if len(iv) > 1 and self.drops_in(a1, b):
            raise TreeError(f"({a1},{b}]_T drops in model or degree")
        return compose_all(self.nodes[c].star_map for c in iv)


def new_tree(M: Premouse, m: int) -> IterationTree:
    if not (0 <= m <= M.degree_cap):
        raise TreeError(f"degree {m} out of range 0..{M.degree_cap}")
    return IterationTree(M, m, (TreeNode(M, m),))


def node_dropdown(T: IterationTree, b: int, last_uses_extender: Optional[int] = None):
    """Reversed extended dropdown at node b: entries from the full model down.

    For the last node the cut pair is (OR, deg) unless last_uses_extender
    names the extender level about to be appended there.
    """
    node = T.nodes[b]
    if b + 1 < len(T) or (b + 1 == len(T) and last_uses_extender is not None):
        lam = node.extender_level if b + 1 < len(T) else last_uses_extender
        low, d = segment(node.model, lam), 0
    else:
        low, d = node.model, node.degree
    return dropdown(node.model, node.degree, low, d).revex


def kappa_site(T: IterationTree, kappa: int, last_uses_extender: Optional[int] = None):
    """(alpha, n): the node and dropdown position where kappa is caught.

    alpha is the least node with kappa below its exit's nu (greatest under
    the documented predecessor mutation); n the deepest dropdown entry
    projecting at or below kappa.
    """
    sites = []
    for a in range(len(T)):
        if a + 1 < len(T):
            nu = T.nu_tilde(a)
        elif last_uses_extender is not None:
            nu = T.model(a).level(last_uses_extender).active.nu
        else:
            if kappa > T.model(a).height:
                break
            sites.append(a)
            break
        if kappa < nu:
            sites.append(a)
            if not mutations.enabled(mutations.PRED_GREATEST):
                break
    if not sites:
        raise TreeError(f"no node catches critical point {kappa}")
    alpha = sites[-1]
    entries = node_dropdown(T, alpha, last_uses_extender)
    n = 0
    for i in range(len(entries) - 1, 0, -1):
        Mi, mi = entries[i]
        if rho_at(Mi, Mi.height, mi + 1) <= kappa:
            n = i
            break
    return alpha, n


def append_extender(T: IterationTree, lam: int) -> IterationTree:
    """Extend T by the extender at active level lam of the last model."""
    b = len(T) - 1
    M_last = T.model(b)
    if not (1 <= lam <= M_last.height) or M_last.level(lam).active is None:
        raise TreeError(f"level {lam} is not active in the last model")
    for a in range(b):
        if T.extender_level(a) > lam:
            raise TreeError(f"normality violated: extender at node {a} is longer")
    E = M_last.level(lam).active
    xi, n = kappa_site(T, E.crit, last_uses_extender=lam)
    entries = node_dropdown(T, xi, last_uses_extender=lam)
    star, star_deg = entries[n]
    drop_model = star.height < T.model(xi).height
    drop_degree = (star, star_deg) != (T.model(xi), T.degree(xi))
    exit_pm = segment(M_last, lam)
    try:
        U, pi = ultrapower(star, star_deg, exit_pm)
    except UltrapowerError as err:
        raise TreeError(f"ill-formed extender choice at level {lam}: {err}") from err
    nodes = T.nodes[:b] + (replace(T.nodes[b], extender_level=lam),)
    nodes += (
        TreeNode(U, star_deg, xi, drop_model, drop_degree, None, star, star_deg, pi),
    )
    return IterationTree(T.base, T.base_degree, nodes)


def replay(base: Premouse, degree: int, steps) -> IterationTree:
    T = new_tree(base, degree)
    for lam in steps:
        T = append_extender(T, lam)
    return T


def prefix(T: IterationTree, n: int) -> IterationTree:
    """T restricted to its first n nodes, the last one's extender unchosen."""
    if not (1 <= n <= len(T)):
        raise TreeError(f"prefix length {n} out of range")
    nodes = T.nodes[:n]
    if nodes[-1].extender_level is not None:
        nodes = nodes[:-1] + (replace(nodes[-1], extender_level=None),)
    return IterationTree(T.base, T.base_degree, nodes)


def branch_hosts(T: IterationTree, a: int, b: int) -> tuple:
    """Exit premice applied along (a, b]_T in application order."""
    iv = T.tree_interval(a, b)
    if not iv:
        raise TreeError(f"{a} is not <=_T {b}")
    return tuple(T.exit(c - 1) for c in iv[1:])


@dataclass(frozen=True)
class TreeReport:
    ok: bool
    detail: str = ""


def validate_tree(T: IterationTree) -> TreeReport:
    """Re-derive every node from the extender choices and diff."""
    if not T.nodes or T.nodes[0].model != T.base or T.nodes[0].degree != T.base_degree:
        return TreeReport(False, "root node does not match the base")
    try:
        fresh = replay(T.base, T.base_degree, T.steps())
    except TreeError as err:
        return TreeReport(False, f"replay failed: {err}")
    for a, (old, new) in enumerate(zip(T.nodes, fresh.nodes)):
        if old != new:
            return TreeReport(False, f"node {a} diverges on replay")
    return TreeReport(True)
