"""Monotone ordinal translations (abstract ultrapower maps on level ordinals).

A StepMap is a finite piecewise translation: it fixes everything below its
first threshold and shifts later ordinals by successively larger amounts.
Single ultrapowers produce one segment (fix below (kappa+)^M, shift above);
composites stay in the class, so map equality is exact and cheap.

The arithmetic lives in a small kernel with two interchangeable backends:
a Cython extension (built by setup.py) and a pure-Python fallback. Set
MINO_PURE_STEPFN=1 to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("MINO_PURE_STEPFN"):
    from mino import _stepfn_py as _backend
else:
    try:
        from mino import _stepfn as _backend  # type: ignore[attr-defined]
    except ImportError:
        from mino import _stepfn_py as _backend

BACKEND = _backend.BACKEND


class StepMap:
    """Immutable monotone piecewise translation on the natural numbers."""

    __slots__ = ("segs",)

    def __init__(self, segs=()):
        object.__setattr__(self, "segs", _backend.normalize(tuple(segs)))

    def __setattr__(self, name, value):
        raise AttributeError("StepMap is immutable")

    @classmethod
    def shift(cls, threshold: int, amount: int) -> "StepMap":
        """The map fixing x < threshold and adding amount at x >= threshold."""
        if amount < 0:
            raise ValueError("shift amount must be non-negative")
        return cls((threshold, amount) if amount else ())

    @classmethod
    def identity(cls) -> "StepMap":
        return cls(())

    def __call__(self, x: int) -> int:
        return _backend.apply(self.segs, x)

    def after(self, other: "StepMap") -> "StepMap":
        """self o other: apply other first."""
        return StepMap(_backend.compose(self.segs, other.segs))

    def is_identity(self) -> bool:
        return not self.segs

    def agrees_with(self, other: "StepMap", bound: int) -> bool:
        """Pointwise equality on [0, bound]."""
        return _backend.agrees_upto(self.segs, other.segs, bound)

    def sup_image(self, k: int) -> int:
        """Continuity-corrected sup of the image of [0, k); 0 when k <= 0.

        Equals self(k) except at a jump threshold, mirroring how ordinal
        sups see discontinuity points of transfinite maps.
        """
        if k <= 0:
            return 0
        return self(k - 1) + 1

    def __eq__(self, other):
        return isinstance(other, StepMap) and self.segs == other.segs

    def __hash__(self):
        return hash(self.segs)

    def __repr__(self):
        if not self.segs:
            return "StepMap(id)"
        parts = ", ".join(
            f"{self.segs[i]}:+{self.segs[i + 1]}" for i in range(0, len(self.segs), 2)
        )
        return f"StepMap({parts})"


IDENTITY = StepMap.identity()


def compose_all(maps) -> StepMap:
    """Composite of maps applied left to right (first element applied first)."""
    acc = IDENTITY
    for m in maps:
        acc = m.after(acc)
    return acc
