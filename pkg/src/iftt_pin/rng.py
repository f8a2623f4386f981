"""Deterministic random streams.

Everything random in this package flows through SplitMix64, a tiny
counter-based generator with a fixed, platform-independent algorithm
(Steele, Lea & Flood's mixing constants).  Streams for independent
units of work (a phase, a click, a trial) are derived by hashing the
session seed together with the unit's indices, so the n-th draw of any
stream is a pure function of ``(seed, *path, n)`` and never of call
order elsewhere in the program.  That is what makes transcripts and
simulation CSVs byte-identical across runs, platforms and Python
versions.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective avalanche."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Hash ``seed`` with a tuple of indices into an independent child seed."""
    s = seed & _MASK
    for part in path:
        s = _mix((s + _GOLDEN) & _MASK)
        s = _mix(s ^ (part & _MASK))
    return s


class SplitMix64:
    """Sequential SplitMix64 stream over a 64-bit state."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _mix(self._state)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = ((1 << 64) // bound) * bound
        while True:
            r = self.next_u64()
            if r < limit:
                return r % bound

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
