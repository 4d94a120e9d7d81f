"""Documented single-line rule mutations for sensitivity testing.

Each name flips exactly one core rule; the harness requires every mutation
to trip at least one property suite at tiny bounds. Mutations are never
enabled in normal operation.
"""

from contextlib import contextmanager

# Predecessor choice: pick the greatest admissible node instead of the least.
PRED_GREATEST = "pred-greatest"
# Stretch rule: fix only below the critical point instead of below its
# cardinal successor.
STRETCH_AT_CRIT = "stretch-at-crit"
# Star-product ordering: enumerate by extender index instead of critical point.
STAR_BY_INDEX = "star-by-index"

ALL = (PRED_GREATEST, STRETCH_AT_CRIT, STAR_BY_INDEX)

_active = set()


def enabled(name):
    return name in _active


@contextmanager
def mutate(name):
    if name not in ALL:
        raise ValueError(f"unknown mutation {name!r}")
    _active.add(name)
    try:
        yield
    finally:
        _active.discard(name)
