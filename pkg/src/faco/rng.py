"""Counter-based random streams shared by the construction and solver code.

Every (iteration, ant) pair gets its own stream derived from the master
seed, so results do not depend on how ants are scheduled onto workers.
The generator is splitmix64; state fits in a single uint64, which keeps
it usable inside compiled kernels where numpy Generators are not.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True, inline="always")
def mix64(z):
    z = (z + np.uint64(0x9E3779B97F4A7C15)) & _MASK
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def stream_seed(master, iteration, ant):
    """Starting state of the stream assigned to (iteration, ant)."""
    s = mix64(np.uint64(master))
    s = mix64(s ^ np.uint64(iteration))
    return mix64(s ^ np.uint64(ant))


@njit(cache=True, inline="always")
def next_u64(state):
    state = (state + _GAMMA) & _MASK
    return state, mix64(state)


@njit(cache=True, inline="always")
def next_float(state):
    """Advance and return a float in [0, 1)."""
    state, x = next_u64(state)
    return state, (x >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, inline="always")
def next_below(state, n):
    """Advance and return an int in [0, n). Modulo bias is ~n/2**64."""
    state, x = next_u64(state)
    return state, np.int64(x % np.uint64(n))


class Stream:
    """Mutable wrapper around a raw stream state, for non-kernel callers.

    The state crosses the compiled-code boundary as an explicit uint64;
    letting it box back into a Python int would make the dispatch type
    unstable (ints below 2**63 re-specialize as int64).
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int, iteration: int = 0, ant: int = 0):
        self._state = stream_seed(
            np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
            np.uint64(iteration),
            np.uint64(ant & 0xFFFFFFFFFFFFFFFF),
        )

    @property
    def state(self) -> np.uint64:
        return np.uint64(self._state)

    @state.setter
    def state(self, value) -> None:
        self._state = np.uint64(value)

    def random(self) -> float:
        self._state, x = next_float(np.uint64(self._state))
        return float(x)

    def randint_below(self, n: int) -> int:
        self._state, x = next_below(np.uint64(self._state), n)
        return int(x)
