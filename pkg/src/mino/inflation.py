"""Minimal inflation: witness reconstruction, outcomes, commutativity.

A witness is rebuilt node by node: each target extender is classified as
copying (it equals the lifted copy of the next source extender) or
inflationary, and the per-node embeddings are grown by the corresponding
propagation step. Witnesses are never trusted across boundaries; they are
always reconstructed, and the uniqueness lemma makes that a free check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from mino.embedding import (
    DropdownLifts,
    TreePreEmbedding,
    e_inflation,
    exit_lift,
    infl_hosts,
    lift_extender_level,
    one_step_copy,
    trivial_embedding,
    with_target,
)
from mino.errors import (
    EmbeddingError,
    InflationError,
    NormalizeError,
    SequenceError,
)
from mino.mouse import is_segment_of, star_product
from mino.stepfn import StepMap
from mino.trees import IterationTree, append_extender, prefix

limit_clause_hits = {"f-continuity": 0, "limit-membership": 0}


@dataclass(frozen=True)
class InflationWitness:
    source: IterationTree
    target: IterationTree
    t: tuple  # per alpha < lh(X)-1: 0 copying, 1 inflationary
    C: tuple  # sorted node list
    f: tuple  # per node: f(alpha) or None outside C
    embeddings: tuple  # per node: TreePreEmbedding or None outside C

    def in_C(self, a: int) -> bool:
        return self.f[a] is not None

    def in_C_minus(self, a: int) -> bool:
        return self.in_C(a) and self.f[a] + 1 < len(self.source)

    def C_minus(self) -> tuple:
        return tuple(a for a in self.C if self.in_C_minus(a))

    def emb(self, a: int) -> TreePreEmbedding:
        e = self.embeddings[a]
        if e is None:
            raise InflationError(f"node {a} is outside C")
        return e

    def copy_level(self, a: int) -> int:
        """Index of the lifted copy extender at a (a must lie in C-minus)."""
        if not self.in_C_minus(a):
            raise InflationError(f"node {a} is not pending")
        return lift_extender_level(self.emb(a), a)


@dataclass(frozen=True)
class InflationRefusal:
    clause: str
    node: int
    detail: str = ""


@dataclass(frozen=True)
class InflationResult:
    witness: Optional[InflationWitness]
    refusal: Optional[InflationRefusal] = None

    def __bool__(self):
        return self.witness is not None


def check_inflation(T: IterationTree, X: IterationTree) -> InflationResult:
    """Decide T ~> X and return the unique witness, else the first refusal."""
    if X.base != T.base or X.base_degree != T.base_degree:
        return InflationResult(None, InflationRefusal("base", 0, "bases differ"))
    n = len(X)
    t_vals = []
    f: list = [None] * n
    embs: list = [None] * n
    f[0] = 0
    embs[0] = trivial_embedding(T, prefix(X, 1))
    for a in range(n - 1):
        lam = X.extender_level(a)
        pending = f[a] is not None and f[a] + 1 < len(T)
        copy_lh = None
        if pending:
            try:
                copy_lh = lift_extender_level(embs[a], a)
            except SequenceError as err:
                return InflationResult(
                    None, InflationRefusal("copy-lift-illfounded", a, str(err))
                )
            if lam > copy_lh:
                return InflationResult(
                    None,
                    InflationRefusal(
                        "index-bound", a, f"extender {lam} above the copy index {copy_lh}"
                    ),
                )
        if pending and lam == copy_lh:
            t_vals.append(0)
            x2, pi2 = one_step_copy(prefix(X, a + 1), embs[a])
            if x2 != prefix(X, a + 2):
                raise InflationError(f"copy step at {a} diverges from the target tree")
            f[a + 1] = f[a] + 1
            embs[a + 1] = pi2
        else:
            t_vals.append(1)
            xi = X.nodes[a + 1].pred
            member = False
            if f[xi] is not None:
                if f[xi] + 1 < len(T):
                    try:
                        q = exit_lift(
                            with_target(embs[xi], prefix(X, a + 1)), f[xi], xi
                        ).final
                        member = is_segment_of(q, X.nodes[a + 1].star_model)
                    except SequenceError:
                        member = False
                else:
                    member = not X.nodes[a + 1].drop_degree
            if member:
                try:
                    x2, pi2 = e_inflation(prefix(X, a + 1), embs[xi], lam)
                except EmbeddingError as err:
                    raise InflationError(
                        f"membership test and inflation step disagree at {a}: {err}"
                    ) from err
                if x2 != prefix(X, a + 2):
                    raise InflationError(f"inflation step at {a} diverges from the target")
                f[a + 1] = f[xi]
                embs[a + 1] = pi2
    C = tuple(a for a in range(n) if f[a] is not None)
    w = InflationWitness(T, X, tuple(t_vals), C, tuple(f), tuple(embs))
    bad = _closure_violation(w)
    if bad is not None:
        raise InflationError(bad)
    return InflationResult(w)


def _closure_violation(w: InflationWitness) -> Optional[str]:
    """Branch closure and internal agreement are theorems of the forward
    construction; a violation means the machinery itself is broken."""
    X = w.target
    for a in range(len(X)):
        br = X.branch(a)
        flags = [w.in_C(c) for c in br]
        if any(later and not earlier for earlier, later in zip(flags, flags[1:])):
            return f"C is not branch-closed at node {a}"
    for a in w.C:
        pi = w.emb(a)
        for g in range(w.f[a] + 1):
            for b in pi.interval_nodes(g):
                if not w.in_C(b) or w.f[b] != g:
                    return f"internal agreement: node {b} in I_({a};{g})"
                pj = w.emb(b)
                for eps in range(g):
                    if pj.intervals[eps] != pi.intervals[eps]:
                        return f"internal agreement: intervals at ({a},{b},{eps})"
                expected = (pi.gamma(g), b)
                if pj.intervals[g] != expected:
                    return f"internal agreement: truncated interval at ({a},{b})"
    return None


def validate_witness(T, X, w: InflationWitness) -> Optional[str]:
    """Clause-by-clause check of a supplied witness; None when it all holds."""
    fresh = check_inflation(T, X)
    if not fresh:
        return f"no witness exists: {fresh.refusal}"
    for field in ("t", "C", "f"):
        if getattr(fresh.witness, field) != getattr(w, field):
            return f"witness field {field} differs from the reconstruction"
    for a in w.C:
        if fresh.witness.emb(a).intervals != w.emb(a).intervals:
            return f"witness embedding at {a} differs"
    return None


@dataclass(frozen=True)
class InflationOutcome:
    pending: bool
    terminal: bool
    terminally_dropping: Optional[bool]
    pi_infinity: Optional[StepMap]


def classify(T, X, w: InflationWitness) -> InflationOutcome:
    a = len(X) - 1
    pending = w.in_C_minus(a)
    terminal = not pending
    dropping = None
    pi_inf = None
    if terminal:
        dropping = not w.in_C(a)
        if not dropping:
            pi_inf = pi_infinity(T, X, w)
    return InflationOutcome(pending, terminal, dropping, pi_inf)


def pi_infinity(T, X, w: InflationWitness) -> StepMap:
    a = len(X) - 1
    if not w.in_C(a) or w.in_C_minus(a):
        raise InflationError("the realization map exists only in the terminal non-dropping case")
    b = w.f[a]
    return DropdownLifts(w.emb(a)).lift(b, 0, a).map


def final_hosts(w: InflationWitness) -> tuple:
    """F_(last;last): the inflationary hosts of the final embedding."""
    a = len(w.target) - 1
    return infl_hosts(w.emb(a), a)


def extend_inflation(T, X, w: InflationWitness, lam: int):
    """Append an extender to X and rebuild the witness.

    Requires the index bound against the lifted copy extender when the last
    node is pending; any X-normal choice below it keeps the inflation.
    """
    b = len(X) - 1
    if w.in_C_minus(b) and lam > w.copy_level(b):
        raise InflationError(f"index {lam} above the copy bound {w.copy_level(b)}")
    X2 = append_extender(X, lam)
    res = check_inflation(T, X2)
    if not res:
        raise NormalizeError(f"extension lemma failed: {res.refusal}")
    return X2, res.witness


# -- commutativity of inflation stacks ---------------------------------------


@dataclass(frozen=True)
class CommReport:
    ok: bool
    failures: tuple
    witness02: Optional[InflationWitness] = None


def check_commutativity(X0, X1, X2) -> CommReport:
    """All commutativity clauses over an inflation triple, node by node."""
    failures = []

    def fail(clause, detail):
        failures.append((clause, detail))

    r01 = check_inflation(X0, X1)
    r12 = check_inflation(X1, X2)
    if not (r01 and r12):
        return CommReport(False, (("preconditions", "missing witness"),), None)
    w01, w12 = r01.witness, r12.witness
    if classify(X0, X1, w01).pending:
        return CommReport(False, (("preconditions", "X1 is X0-pending"),), None)
    r02 = check_inflation(X0, X2)
    if not r02:
        return CommReport(
            False, (("composite", f"X2 is not an inflation of X0: {r02.refusal}"),), None
        )
    w02 = r02.witness

    for a2 in range(len(X2)):
        _comm_at_node(X0, X1, X2, w01, w12, w02, a2, fail)
    _terminal_composition(X0, X1, X2, w01, w12, w02, fail)
    return CommReport(not failures, tuple(failures), w02)


def _comm_at_node(X0, X1, X2, w01, w12, w02, a2, fail):
    in02 = w02.in_C(a2)
    a1 = w12.f[a2] if w12.in_C(a2) else None
    # C1: membership and f-composition
    if in02:
        if not w12.in_C(a2):
            fail("C1", f"node {a2} in C02 but not C12")
            return
        if a1 is None or not w01.in_C(a1):
            fail("C1", f"f12({a2}) outside C01")
            return
        if w02.f[a2] != w01.f[a1]:
            fail("C1", f"f02({a2}) != f01(f12({a2}))")
    a0 = w02.f[a2] if in02 else None
    # C2: copying equivalence
    if a2 + 1 < len(X2):
        lhs = w02.in_C_minus(a2) and w02.t[a2] == 0
        rhs = (
            w12.in_C_minus(a2)
            and w12.t[a2] == 0
            and a1 is not None
            and w01.in_C_minus(a1)
            and w01.t[a1] == 0
        )
        if lhs != rhs:
            fail("C2", f"copying status differs at {a2}")
    # C3: interval images land in C02
    if w12.in_C(a2) and a1 is not None and w01.in_C(a1):
        p01 = w01.emb(a1)
        p12 = w12.emb(a2)
        if a1 + 1 == len(X1) and not in02:
            fail("C3", f"node {a2} should lie in C02 (a1 is the last X1 node)")
        for b in range(w01.f[a1] + 1):
            for xi in p01.interval_nodes(b):
                if xi <= w12.f[a2] and not w02.in_C(p12.gamma(xi)):
                    fail("C3", f"gamma12({a2};{xi}) outside C02")
            if b < w01.f[a1]:
                xi = p01.delta(b)
                if xi <= w12.f[a2] and not w02.in_C(p12.delta(xi)):
                    fail("C3", f"delta12({a2};{xi}) outside C02")
    if not in02:
        return
    # C4: gamma and map composition
    p01 = w01.emb(a1)
    p12 = w12.emb(a2)
    p02 = w02.emb(a2)
    l01 = DropdownLifts(p01)
    l12 = DropdownLifts(p12)
    l02 = DropdownLifts(p02)
    union12 = _union_nodes(p12, a1)
    if not union12 <= set(w12.C):
        fail("C4", "the I12 union is not inside C12")
    for b in range(a0 + 1):
        g1 = p01.gamma(b)
        if p02.gamma(b) != p12.gamma(g1):
            fail("C4", f"gamma02({a2};{b}) != gamma12({a2};gamma01)")
        m02 = l02.lift(b, 0, p02.gamma(b)).map
        m01 = l01.lift(b, 0, g1).map
        m12 = l12.lift(g1, 0, p12.gamma(g1)).map
        if not m02.agrees_with(m12.after(m01), X0.model(b).height):
            fail("C4", f"pi02({a2};{b}) does not factor at {b}")
        for g in p02.interval_nodes(b):
            if g not in union12:
                fail("C4", f"I02 member {g} outside the I12 union")
            fg = w12.f[g] if w12.in_C(g) else None
            if fg is None or fg not in p01.interval_nodes(b):
                fail("C4", f"f12({g}) outside I01({a2};{b})")
    # C5: sub-interval alignment, factor maps, star identity
    i01 = l01.i_sub(a0, a1)
    i12 = l12.i_sub(a1, a2)
    i02 = l02.i_sub(a0, a2)
    if i01 > i02:
        fail("C5a", f"i01={i01} > i02={i02} at {a2}")
    if i01 + i12 != i02:
        fail("C5b", f"i01+i12 != i02 at node {a2}")
    g12 = l12.gamma_sub(a1, i12)
    if i01 != l02.i_sub(a0, g12):
        fail("C5c", f"i01 != position of gamma12 in the 02 sub-intervals")
    t01 = l01.lift(a0, i01, a1).map
    t12 = l12.lift(a1, i12, a2).map
    t02 = l02.lift(a0, i02, a2).map
    no_drop = not X2.drops_in(g12, a2) if X2.tree_le(g12, a2) else False
    if (i01 == i02) != (i12 == 0) or (i12 == 0) != no_drop:
        fail("C5d", f"equality biconditionals disagree at {a2}")
    entries0 = l01.entries(a0)
    bound = entries0[i02][0].height
    if i01 == i02:
        if not t02.agrees_with(t12.after(t01), bound):
            fail("C5d", f"tau02 != tau12 o tau01 at {a2}")
    else:
        u = l01.lift(a0, i02, a1)
        m1_entry = node_dropdown_entry(X1, a1, i12)
        if m1_entry != (u.final, entries0[i02][1]):
            fail("C5e", f"X1 dropdown entry differs from the lifted entry at {a2}")
        if not t02.agrees_with(t12.after(u.map), bound):
            fail("C5e", f"tau02 != tau12 o pi01 at {a2}")
    try:
        prod = star_product(infl_hosts(p01, a1), infl_hosts(p12, a2)).merged
    except Exception as err:  # noqa: BLE001 - reported, not raised
        fail("C5f", f"star product failed at {a2}: {err}")
        return
    if prod != infl_hosts(p02, a2):
        fail("C5f", f"host sequences differ at {a2}")


def node_dropdown_entry(X, a, i):
    from mino.trees import node_dropdown

    entries = node_dropdown(X, a)
    if i >= len(entries):
        return None
    M, m = entries[i]
    return M, m


def _union_nodes(pre: TreePreEmbedding, up_to: int) -> set:
    out = set()
    for b in range(min(up_to + 1, pre.theta)):
        out.update(pre.interval_nodes(b))
    return out


def _terminal_composition(X0, X1, X2, w01, w12, w02, fail):
    o01 = classify(X0, X1, w01)
    o12 = classify(X1, X2, w12)
    o02 = classify(X0, X2, w02)
    if not (o01.terminal and o12.terminal):
        return
    if not o02.terminal:
        fail("terminal", "X2 not X0-terminal despite terminal factors")
        return
    expected_drop = o01.terminally_dropping or o12.terminally_dropping
    if o02.terminally_dropping != expected_drop:
        fail("terminal", "dropping status does not compose")
    if o02.terminally_dropping is False:
        composite = o12.pi_infinity.after(o01.pi_infinity)
        if not o02.pi_infinity.agrees_with(composite, X0.model(len(X0) - 1).height):
            fail("terminal", "realization maps do not compose")
