"""Symbolic premice over natural-number level ordinals.

A premouse is a finite stack of levels; each level carries a non-increasing
projectum tuple, a cardinal flag, and optionally an active extender indexed
at that level. Ultrapowers act by a deterministic stretch rule: fix below
the critical point's cardinal successor, translate uniformly above it. All
other modules consume this calculus only through the operations here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from mino import hooks, mutations
from mino.errors import (
    DropdownError,
    PremouseError,
    SegmentError,
    SequenceError,
    StarProductError,
    UltrapowerError,
)
from mino.stepfn import IDENTITY, StepMap


@dataclass(frozen=True)
class Extender:
    """An extender (index, crit, nu) with crit < nu < index."""

    index: int
    crit: int
    nu: int

    def __post_init__(self):
        if not (1 <= self.crit < self.nu < self.index):
            raise PremouseError(f"bad extender ({self.index}, {self.crit}, {self.nu})")


@dataclass(frozen=True)
class LevelInfo:
    projecta: tuple
    cardinal: bool
    active: Optional[Extender] = None


@dataclass(frozen=True)
class Premouse:
    height: int
    degree_cap: int
    levels: tuple  # LevelInfo for levels 1..height

    def __post_init__(self):
        validate_premouse(self)

    # -- basic accessors -------------------------------------------------

    def level(self, lam: int) -> LevelInfo:
        return self.levels[lam - 1]

    @property
    def top(self) -> LevelInfo:
        return self.levels[-1]

    @property
    def is_active(self) -> bool:
        return self.top.active is not None

    @property
    def top_extender(self) -> Optional[Extender]:
        return self.top.active

    @property
    def nu_tilde(self) -> int:
        """nu of the top extender for active premice, else the height."""
        e = self.top.active
        return e.nu if e is not None else self.height

    def rho(self, m: int) -> int:
        """Projectum of the whole premouse at degree m (stabilized past the cap)."""
        return rho_at(self, self.height, m)

    def active_levels(self):
        return tuple(
            lam for lam in range(1, self.height + 1) if self.level(lam).active is not None
        )

    def cardinal_levels(self):
        return tuple(lam for lam in range(1, self.height + 1) if self.level(lam).cardinal)

    def largest_cardinal(self) -> Optional[int]:
        flagged = self.cardinal_levels()
        return flagged[-1] if flagged else None

    def __repr__(self):
        acts = ",".join(
            f"{e.index}(cr{e.crit},nu{e.nu})"
            for e in (self.level(l).active for l in range(1, self.height + 1))
            if e is not None
        )
        return f"Premouse(h={self.height}, cards={list(self.cardinal_levels())}, E=[{acts}])"


def rho_at(M: Premouse, lam: int, m: int) -> int:
    """rho_m of the segment of M at level lam; rho_0 is the level itself."""
    if m <= 0:
        return lam
    proj = M.level(lam).projecta
    return proj[min(m, M.degree_cap) - 1]


def validate_premouse(M: Premouse) -> None:
    if M.height < 1:
        raise PremouseError("height must be at least 1")
    if M.degree_cap < 1:
        raise PremouseError("degree cap must be at least 1")
    if len(M.levels) != M.height:
        raise PremouseError("levels must cover 1..height")
    for lam, info in enumerate(M.levels, start=1):
        proj = info.projecta
        if len(proj) != M.degree_cap:
            raise PremouseError(f"level {lam}: projecta length != degree cap")
        prev = lam
        for r in proj:
            if not (1 <= r <= lam) or r > prev:
                raise PremouseError(f"level {lam}: projecta {proj} not non-increasing in [1,{lam}]")
            prev = r
        e = info.active
        if e is not None:
            if e.index != lam:
                raise PremouseError(f"level {lam}: active extender indexed at {e.index}")
            if not M.levels[e.crit - 1].cardinal:
                raise PremouseError(f"level {lam}: critical point {e.crit} not a cardinal")
            if not any(M.levels[mu - 1].cardinal for mu in range(e.crit + 1, M.height + 1)):
                raise PremouseError(f"level {lam}: no cardinal above critical point {e.crit}")


# -- segments ------------------------------------------------------------


def segment(M: Premouse, lam: int, passive: bool = False) -> Premouse:
    """The restriction M|lam, or M||lam when passive."""
    if not (1 <= lam <= M.height):
        raise SegmentError(f"level {lam} out of range 1..{M.height}")
    levels = M.levels[:lam]
    if passive and levels[-1].active is not None:
        levels = levels[:-1] + (
            LevelInfo(levels[-1].projecta, levels[-1].cardinal, None),
        )
    return Premouse(lam, M.degree_cap, levels)


def passivized(M: Premouse) -> Premouse:
    return segment(M, M.height, passive=True)


def is_segment_of(M: Premouse, N: Premouse) -> bool:
    """M = N|lam for some lam (active entry intact)."""
    return M.height <= N.height and segment(N, M.height) == M


def pair_le(M: Premouse, m: int, N: Premouse, n: int) -> bool:
    """(M,m) lies at or below (N,n) in the segment-degree order."""
    if not is_segment_of(M, N):
        return False
    return M.height < N.height or m <= n


def cardinal_successor(M: Premouse, kappa: int) -> int:
    """Least cardinal-flagged level above kappa, or the height if none."""
    if kappa >= M.height:
        raise SegmentError(f"kappa {kappa} not below height {M.height}")
    for lam in range(kappa + 1, M.height + 1):
        if M.level(lam).cardinal:
            return lam
    return M.height


def card_proper_segment_of(M: Premouse, N: Premouse) -> bool:
    """Passive M is a proper segment of N whose height N flags as a cardinal."""
    h = M.height
    if h >= N.height or not N.level(h).cardinal:
        return False
    return segment(N, h, passive=True) == passivized(M)


# -- extended dropdown ----------------------------------------------------


@dataclass(frozen=True)
class DropdownSeq:
    """Extended dropdown between segment-degree pairs, ascending."""

    entries: tuple  # of (Premouse, degree)

    def __post_init__(self):
        for (A, a), (B, b) in zip(self.entries, self.entries[1:]):
            if not pair_le(A, a, B, b) or (A, a) == (B, b):
                raise DropdownError("dropdown entries must strictly ascend")

    @property
    def revex(self) -> tuple:
        return tuple(reversed(self.entries))

    @property
    def k(self) -> int:
        return len(self.entries) - 1

    def __len__(self):
        return len(self.entries)


def _pairs_strictly_above(N: Premouse, n: int, lam0: int, m0: int):
    """Segment-degree pairs of N strictly above (N|lam0, m0), ascending, up to (N,n)."""
    for lam in range(lam0, N.height + 1):
        cap = n if lam == N.height else N.degree_cap
        first = m0 + 1 if lam == lam0 else 0
        for m in range(first, cap + 1):
            yield lam, m


def dropdown(N: Premouse, n: int, M: Premouse, m: int) -> DropdownSeq:
    """The extended dropdown from (M,m) up to (N,n).

    Successive entries are the least pairs that either reach (N,n) or
    strictly project below the previous entry's relevant projectum.
    """
    if n > N.degree_cap or m > M.degree_cap:
        raise DropdownError("degree above cap")
    if not pair_le(M, m, N, n):
        raise DropdownError("(M,m) is not a segment-degree pair below (N,n)")
    entries = [(M, m)]
    lam_i, m_i = M.height, m
    while (lam_i, m_i) != (N.height, n):
        for lam, mm in _pairs_strictly_above(N, n, lam_i, m_i):
            if (lam, mm) == (N.height, n):
                entries.append((N, n))
                lam_i, m_i = lam, mm
                break
            if rho_at(N, lam, mm + 1) < rho_at(N, lam_i, m_i + 1):
                entries.append((segment(N, lam), mm))
                lam_i, m_i = lam, mm
                break
        else:  # unreachable: (N,n) always matches the first disjunct
            raise DropdownError("no successor entry found")
    return DropdownSeq(tuple(entries))


# -- the stretch-rule ultrapower ------------------------------------------


def _map_level(info: LevelInfo, pi: StepMap) -> LevelInfo:
    e = info.active
    if e is not None:
        e = Extender(pi(e.index), pi(e.crit), pi(e.nu))
    return LevelInfo(tuple(pi(r) for r in info.projecta), info.cardinal, e)


def ult_applies(M: Premouse, n: int, P: Premouse) -> Optional[UltrapowerError]:
    """The reason Ult_n(M, top of P) is illegal, or None if it applies."""
    if not P.is_active:
        return UltrapowerError("host-not-active", f"{P!r}")
    E = P.top_extender
    kappa = E.crit
    if kappa >= M.height:
        return UltrapowerError("agreement", f"crit {kappa} not below height {M.height}")
    t = cardinal_successor(M, kappa)
    if t != cardinal_successor(P, kappa):
        return UltrapowerError("agreement", "cardinal successors of crit differ")
    if segment(M, t, passive=True) != segment(P, t, passive=True):
        return UltrapowerError("agreement", f"models differ below level {t}")
    if kappa >= rho_at(M, M.height, n):
        return UltrapowerError("crit-vs-projectum", f"crit {kappa} >= rho_{n}")
    if kappa >= M.nu_tilde:
        return UltrapowerError("crit-vs-nu", f"crit {kappa} >= nu-tilde {M.nu_tilde}")
    if hooks.illfounded(M, n, P):
        return UltrapowerError("illfounded", "declared by failure hook")
    return None


def ultrapower(M: Premouse, n: int, P: Premouse):
    """Ult_n(M, E) for the top extender E of the active host P.

    Returns (U, pi). Levels of U strictly below lh(E) come from P; from
    lh(E) upward they are M's levels from (crit+)^M on, with every internal
    ordinal pushed through the stretch map pi.
    """
    err = ult_applies(M, n, P)
    if err is not None:
        raise err
    E = P.top_extender
    t = cardinal_successor(M, E.crit)
    if mutations.enabled(mutations.STRETCH_AT_CRIT):
        t = E.crit
    lh = P.height
    pi = StepMap.shift(t, lh - t)
    levels = list(P.levels[: lh - 1])
    for lam in range(t, M.height + 1):
        levels.append(_map_level(M.level(lam), pi))
    return Premouse(lh + M.height - t, M.degree_cap, tuple(levels)), pi


@dataclass(frozen=True)
class UltSeq:
    """Result of folding ultrapower over a host sequence."""

    hosts: tuple
    models: tuple  # length len(hosts)+1
    steps: tuple  # StepMap per application
    composites: tuple  # composites[i] = steps[<i] composed, length len(hosts)+1

    @property
    def final(self) -> Premouse:
        return self.models[-1]

    @property
    def map(self) -> StepMap:
        return self.composites[-1]

    def below_bounded(self, kappa: int) -> bool:
        """cr(E_a) < sup of the image of kappa under the map so far, for all a."""
        return all(
            h.top_extender.crit < self.composites[i].sup_image(kappa)
            for i, h in enumerate(self.hosts)
        )

    def bounded(self, kappa: int) -> bool:
        return self.below_bounded(kappa + 1)


def ultrapower_seq(M: Premouse, n: int, hosts) -> UltSeq:
    """Fold ultrapower left to right; raises SequenceError at the first bad spot."""
    hosts = tuple(hosts)
    models = [M]
    steps = []
    composites = [IDENTITY]
    for i, P in enumerate(hosts):
        try:
            U, pi = ultrapower(models[-1], n, P)
        except UltrapowerError as err:
            kind = "illfounded" if err.reason == "illfounded" else "not-pre-good"
            raise SequenceError(i, kind, err.reason) from err
        models.append(U)
        steps.append(pi)
        composites.append(pi.after(composites[-1]))
    return UltSeq(hosts, tuple(models), tuple(steps), tuple(composites))


def seq_applies(M: Premouse, n: int, hosts) -> Optional[SequenceError]:
    try:
        ultrapower_seq(M, n, hosts)
    except SequenceError as err:
        return err
    return None


# -- star products ---------------------------------------------------------


def is_normal_host_seq(premice) -> bool:
    """Active premice, pairwise nu-tilde below later crits, card-segment nested."""
    premice = tuple(premice)
    if not all(P.is_active for P in premice):
        return False
    for a in range(len(premice)):
        for b in range(a + 1, len(premice)):
            if premice[a].nu_tilde > premice[b].top_extender.crit:
                return False
            if not card_proper_segment_of(premice[a], premice[b]):
                return False
    return True


@dataclass(frozen=True)
class StarProduct:
    """The merge of a host sequence with the stretches of another."""

    merged: tuple  # active premice, the product enumeration
    nested: tuple  # per index into the second sequence: True if absorbed
    etas: tuple  # per index into the first sequence
    xis: tuple

    @property
    def hosts(self) -> tuple:
        return self.merged


def _largest_pregood_prefix(Q: Premouse, hosts, crit_bound=None):
    """Largest eta with hosts[:eta] pre-good on (Q,0).

    With crit_bound set, additionally require each host's crit strictly
    below the running image of crit_bound (the unnested cutoff). Returns
    (eta, good); good is False when the prefix of length eta is pre-good
    but its last model is illfounded (failure hook only).
    """
    model = Q
    comp = IDENTITY
    for i, P in enumerate(hosts):
        if crit_bound is not None and P.top_extender.crit >= comp(crit_bound):
            return i, True
        try:
            model, pi = ultrapower(model, 0, P)
        except UltrapowerError as err:
            if err.reason == "illfounded":
                return i + 1, False
            return i, True
        comp = pi.after(comp)
    return len(hosts), True


def star_product(Qs, Ps) -> StarProduct:
    """Merge host sequences: stretched Qs plus the unnested Ps, by critical point.

    Each Q absorbs the largest prefix of Ps that is good on it and bounded
    below its nu-tilde; the Ps below its critical-point bound stay unnested.
    """
    Qs, Ps = tuple(Qs), tuple(Ps)
    if not is_normal_host_seq(Qs) or not is_normal_host_seq(Ps):
        raise StarProductError("both sequences must be normal")
    etas, xis, stretched = [], [], []
    for Q in Qs:
        # applicability already bounds each crit below the image of nu-tilde
        eta, good = _largest_pregood_prefix(Q, Ps)
        if not good:
            raise StarProductError("absorbed prefix is pre-good but not good")
        xi, _ = _largest_pregood_prefix(Q, Ps, crit_bound=Q.top_extender.crit)
        if xi > eta:
            raise StarProductError("crit-bounded prefix exceeds nu-bounded prefix")
        Qstar = ultrapower_seq(Q, 0, Ps[:eta]).final
        etas.append(eta)
        xis.append(xi)
        stretched.append(Qstar)
    nested = [any(x <= b < e for x, e in zip(xis, etas)) for b in range(len(Ps))]
    merged = list(stretched) + [P for b, P in enumerate(Ps) if not nested[b]]
    crits = [P.top_extender.crit for P in merged]
    if len(set(crits)) != len(crits):
        raise StarProductError("duplicate critical points in product")
    if mutations.enabled(mutations.STAR_BY_INDEX):
        merged.sort(key=lambda P: P.height)
    else:
        merged.sort(key=lambda P: P.top_extender.crit)
    return StarProduct(tuple(merged), tuple(nested), tuple(etas), tuple(xis))
