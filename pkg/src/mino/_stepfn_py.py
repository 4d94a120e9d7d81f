"""Pure-Python backend for monotone step-translation arithmetic.

A step translation is stored flat as (s0, o0, s1, o1, ...): strictly
increasing starts, strictly increasing offsets, implicit offset 0 below s0.
It encodes x -> x + (offset of the last segment with start <= x).
"""

BACKEND = "python"


def apply(segs, x):
    off = 0
    for i in range(0, len(segs), 2):
        if segs[i] <= x:
            off = segs[i + 1]
        else:
            break
    return x + off


def normalize(segs):
    out = []
    prev = 0
    for i in range(0, len(segs), 2):
        s, o = segs[i], segs[i + 1]
        if out and s <= out[-2]:
            raise ValueError("step map starts not strictly increasing")
        if o < prev:
            raise ValueError("step map offsets must be non-decreasing")
        if o != prev:
            out.append(s)
            out.append(o)
            prev = o
    return tuple(out)


def compose(outer, inner):
    """Flat segments of outer o inner (apply inner first)."""
    cuts = {0}
    n = len(inner)
    for i in range(0, n, 2):
        cuts.add(inner[i])
    # inner is piecewise x + o; a cut of outer at b pulls back to b - o on
    # the inner segment where that offset is in force.
    starts = [0]
    offs = [0]
    for i in range(0, n, 2):
        starts.append(inner[i])
        offs.append(inner[i + 1])
    starts.append(None)
    for j in range(len(offs)):
        lo = starts[j]
        hi = starts[j + 1]
        o = offs[j]
        for k in range(0, len(outer), 2):
            x = outer[k] - o
            if x >= lo and (hi is None or x < hi) and x >= 0:
                cuts.add(x)
    out = []
    prev = 0
    for c in sorted(cuts):
        off = apply(outer, apply(inner, c)) - c
        if off != prev:
            out.append(c)
            out.append(off)
            prev = off
    return tuple(out)


def agrees_upto(a, b, bound):
    """Pointwise equality of two normalized maps on [0, bound]."""
    cuts = {0, bound}
    for segs in (a, b):
        for i in range(0, len(segs), 2):
            if segs[i] <= bound:
                cuts.add(segs[i])
    for c in cuts:
        if apply(a, c) != apply(b, c):
            return False
    return True
