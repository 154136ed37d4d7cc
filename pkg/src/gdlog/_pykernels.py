"""Pure-Python hot kernels: the counter-based RNG and the body-matching join.

:mod:`gdlog._ckernels` is a compiled twin of this module and must produce
bit-identical results; ``tests/test_kernels.py`` checks the two against each
other.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
STREAM_MULT = 0xD1B54A32D192ED03
TWO_POW_M53 = 1.0 / 9007199254740992.0

# op codes in compiled atoms
OP_CONST = 0
OP_BIND = 1
OP_CHECK = 2


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed, stream):
    if not (0 <= seed <= MASK64 and 0 <= stream <= MASK64):
        raise ValueError("seed and stream must be unsigned 64-bit integers")
    return mix64(mix64(seed) ^ ((stream * STREAM_MULT) & MASK64))


class Rng:
    """SplitMix64 keyed by ``(seed, stream)``.

    Output ``i`` is ``mix64(key + i * GOLDEN)``, so it depends only on the
    key and the number of draws made so far.
    """

    __slots__ = ("seed", "stream", "_key", "_counter")

    def __init__(self, seed=0, stream=0):
        self._key = stream_key(seed, stream)
        self.seed = seed
        self.stream = stream
        self._counter = 0

    @property
    def draws(self):
        return self._counter

    def next_u64(self):
        self._counter += 1
        return mix64((self._key + self._counter * GOLDEN) & MASK64)

    def bits53(self):
        """Uniform integer in ``[0, 2**53)``."""
        self._counter += 1
        return mix64((self._key + self._counter * GOLDEN) & MASK64) >> 11

    def random(self):
        """Uniform float in ``[0, 1)`` with 53 random bits."""
        self._counter += 1
        return (mix64((self._key + self._counter * GOLDEN) & MASK64) >> 11) * TWO_POW_M53


def _join(plan, depth, binding, rels, tcodes, targs, blocked, out):
    if depth == len(plan):
        g = tuple([binding[a] if c else a for c, a in zip(tcodes, targs)])
        if g not in blocked:
            out.add(g)
        return
    rel, codes, args = plan[depth]
    facts = rels.get(rel)
    if not facts:
        return
    ops = tuple(zip(range(len(codes)), codes, args))
    nxt = depth + 1
    for tup in facts:
        for j, c, a in ops:
            if c == 1:
                binding[a] = tup[j]
            elif c == 0:
                if tup[j] != a:
                    break
            elif tup[j] != binding[a]:
                break
        else:
            _join(plan, nxt, binding, rels, tcodes, targs, blocked, out)


def match_rule(plan, nslots, tcodes, targs, rels, blocked):
    """All head groundings of a rule body over ``rels`` that are not blocked.

    ``plan`` is a tuple of ``(relation, codes, args)`` per body atom; an op
    code of ``OP_CONST`` compares with the constant in ``args``,
    ``OP_BIND`` writes the fact value to slot ``args[j]`` and ``OP_CHECK``
    compares with that slot.  The head template ``(tcodes, targs)`` uses 0
    for a constant and 1 for a slot reference.  ``rels`` maps relation names
    to iterables of argument tuples; ``blocked`` is any container of
    groundings to exclude.
    """
    out = set()
    _join(plan, 0, [None] * nslots, rels, tcodes, targs, blocked, out)
    return out
