# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled backend for monotone step-translation arithmetic.

Mirrors mino._stepfn_py exactly; selected at import by mino.stepfn.
"""

BACKEND = "cython"


cdef long _apply_vec(long[::1] segs, Py_ssize_t n, long x) nogil:
    cdef long off = 0
    cdef Py_ssize_t i
    for i in range(0, n, 2):
        if segs[i] <= x:
            off = segs[i + 1]
        else:
            break
    return x + off


cdef long[::1] _as_vec(object segs, long[::1] buf):
    cdef Py_ssize_t i
    for i in range(len(segs)):
        buf[i] = segs[i]
    return buf


import array


def apply(segs, x):
    cdef Py_ssize_t n = len(segs)
    cdef long xi = x
    if n == 0:
        return x
    buf = array.array("l", segs)
    cdef long[::1] v = buf
    return _apply_vec(v, n, xi)


def normalize(segs):
    cdef Py_ssize_t n = len(segs)
    cdef long prev = 0, s, o
    cdef Py_ssize_t i
    out = []
    for i in range(0, n, 2):
        s = segs[i]
        o = segs[i + 1]
        if out and s <= out[len(out) - 2]:
            raise ValueError("step map starts not strictly increasing")
        if o < prev:
            raise ValueError("step map offsets must be non-decreasing")
        if o != prev:
            out.append(s)
            out.append(o)
            prev = o
    return tuple(out)


def compose(outer, inner):
    cdef Py_ssize_t ni = len(inner), no = len(outer)
    cdef Py_ssize_t i, j, k
    cdef long o, x, lo, off, prev
    cuts = {0}
    for i in range(0, ni, 2):
        cuts.add(inner[i])
    starts = [0]
    offs = [0]
    for i in range(0, ni, 2):
        starts.append(inner[i])
        offs.append(inner[i + 1])
    starts.append(None)
    for j in range(len(offs)):
        lo = starts[j]
        hi = starts[j + 1]
        o = offs[j]
        for k in range(0, no, 2):
            x = outer[k] - o
            if x >= lo and (hi is None or x < <long> hi) and x >= 0:
                cuts.add(x)
    out = []
    prev = 0
    ibuf = array.array("l", inner) if ni else None
    obuf = array.array("l", outer) if no else None
    cdef long[::1] iv = ibuf if ni else None
    cdef long[::1] ov = obuf if no else None
    for c in sorted(cuts):
        x = c
        if ni:
            x = _apply_vec(iv, ni, x)
        if no:
            x = _apply_vec(ov, no, x)
        off = x - <long> c
        if off != prev:
            out.append(c)
            out.append(off)
            prev = off
    return tuple(out)


def agrees_upto(a, b, bound):
    cdef Py_ssize_t na = len(a), nb = len(b)
    cdef long c, xa, xb
    cuts = {0, bound}
    for i in range(0, na, 2):
        if a[i] <= bound:
            cuts.add(a[i])
    for i in range(0, nb, 2):
        if b[i] <= bound:
            cuts.add(b[i])
    abuf = array.array("l", a) if na else None
    bbuf = array.array("l", b) if nb else None
    cdef long[::1] av = abuf if na else None
    cdef long[::1] bv = bbuf if nb else None
    for c in cuts:
        xa = _apply_vec(av, na, c) if na else c
        xb = _apply_vec(bv, nb, c) if nb else c
        if xa != xb:
            return False
    return True
