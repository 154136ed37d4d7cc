# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of :mod:`gdlog._pykernels`; identical outputs, faster."""

from libc.stdint cimport uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t STREAM_MULT = 0xD1B54A32D192ED03ULL
cdef double TWO_POW_M53 = 1.0 / 9007199254740992.0

OP_CONST = 0
OP_BIND = 1
OP_CHECK = 2


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def mix64(z):
    return _mix(<uint64_t>z)


def stream_key(seed, stream):
    if not (0 <= seed <= 0xFFFFFFFFFFFFFFFF and 0 <= stream <= 0xFFFFFFFFFFFFFFFF):
        raise ValueError("seed and stream must be unsigned 64-bit integers")
    cdef uint64_t s = seed
    cdef uint64_t t = stream
    return _mix(_mix(s) ^ (t * STREAM_MULT))


cdef class Rng:
    cdef uint64_t _key
    cdef uint64_t _counter
    cdef public object seed
    cdef public object stream

    def __init__(self, seed=0, stream=0):
        self._key = stream_key(seed, stream)
        self.seed = seed
        self.stream = stream
        self._counter = 0

    @property
    def draws(self):
        return self._counter

    cpdef object next_u64(self):
        self._counter += 1
        return _mix(self._key + self._counter * GOLDEN)

    cpdef object bits53(self):
        self._counter += 1
        return _mix(self._key + self._counter * GOLDEN) >> 11

    cpdef double random(self):
        self._counter += 1
        return <double>(_mix(self._key + self._counter * GOLDEN) >> 11) * TWO_POW_M53


cdef void _join(tuple plan, Py_ssize_t depth, list binding, dict rels,
                tuple tcodes, tuple targs, object blocked, set out) except *:
    cdef Py_ssize_t j, n, nt
    cdef long c
    cdef tuple codes, args, tup, atom
    cdef list g
    cdef bint ok
    if depth == len(plan):
        nt = len(tcodes)
        g = [None] * nt
        for j in range(nt):
            if <long>tcodes[j]:
                g[j] = binding[<Py_ssize_t>targs[j]]
            else:
                g[j] = targs[j]
        gt = tuple(g)
        if gt not in blocked:
            out.add(gt)
        return
    atom = <tuple>plan[depth]
    facts = rels.get(atom[0])
    if not facts:
        return
    codes = <tuple>atom[1]
    args = <tuple>atom[2]
    n = len(codes)
    for f in facts:
        tup = <tuple>f
        ok = True
        for j in range(n):
            c = <long>codes[j]
            if c == 1:
                binding[<Py_ssize_t>args[j]] = tup[j]
            elif c == 0:
                if tup[j] != args[j]:
                    ok = False
                    break
            elif tup[j] != binding[<Py_ssize_t>args[j]]:
                ok = False
                break
        if ok:
            _join(plan, depth + 1, binding, rels, tcodes, targs, blocked, out)


def match_rule(tuple plan, Py_ssize_t nslots, tuple tcodes, tuple targs,
               dict rels, blocked):
    cdef set out = set()
    _join(plan, 0, [None] * nslots, rels, tcodes, targs, blocked, out)
    return out
