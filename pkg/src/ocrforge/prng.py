"""Seeded deterministic pseudo-random source for the whole pipeline.

A 31-bit linear congruential generator (glibc constants) drives every
stochastic decision, so a run is a pure function of its seed.  Two layers
are exposed:

* pure functions over an immutable :class:`PrngState` — the reference
  semantics, exact integer arithmetic throughout;
* a mutable :class:`Stream` wrapper with ``random.Random``-like ergonomics,
  plus vectorized block draws for per-pixel noise.

Each sample of a dataset gets its own substream derived from the master
seed and the sample index (:func:`substream_for_sample`), which makes
generation order- and thread-count-independent.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import InvalidProbabilityError, InvalidRangeError

MULTIPLIER = 1103515245
INCREMENT = 12345
MODULUS = 2**31

# Knuth multiplicative hash constant, used to spread sample indices across
# the state space before XOR-mixing with the master seed.
_INDEX_MIX = 2654435761

_WARMUP_STEPS = 3

_TWO_PI = 2.0 * math.pi
_MIN_UNIFORM = 1.0 / MODULUS  # substituted when a raw uniform is exactly 0


@dataclass(frozen=True)
class PrngState:
    """Immutable LCG state; always reduced modulo 2^31."""

    state: int

    def __post_init__(self) -> None:
        if not 0 <= self.state < MODULUS:
            raise ValueError(f"state {self.state} outside [0, 2^31)")


def seed_state(seed: int) -> PrngState:
    """Build an initial state from an arbitrary integer seed."""
    return PrngState(seed % MODULUS)


def _advance(state: int) -> int:
    # Python ints are exact, so the ~2^61 intermediate product never loses
    # precision.
    return (MULTIPLIER * state + INCREMENT) % MODULUS


def next_uniform(state: PrngState) -> tuple[float, PrngState]:
    """Advance once and return (uniform in [0, 1), new state)."""
    nxt = _advance(state.state)
    return nxt / MODULUS, PrngState(nxt)


def uniform_range(state: PrngState, lo: float, hi: float) -> tuple[float, PrngState]:
    """Uniform value in [lo, hi); degenerate lo == hi returns lo."""
    if lo > hi:
        raise InvalidRangeError(f"uniform_range: lo {lo} > hi {hi}")
    u, state = next_uniform(state)
    return lo + u * (hi - lo), state


def int_range(state: PrngState, lo: int, hi: int) -> tuple[int, PrngState]:
    """Integer uniform on the inclusive range [lo, hi]."""
    if lo > hi:
        raise InvalidRangeError(f"int_range: lo {lo} > hi {hi}")
    v, state = uniform_range(state, lo, hi + 1)
    return min(math.floor(v), hi), state


def bernoulli(state: PrngState, p: float) -> tuple[bool, PrngState]:
    """True with probability p."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbabilityError(f"bernoulli: p {p} outside [0, 1]")
    u, state = next_uniform(state)
    return u < p, state


def gaussian(state: PrngState) -> tuple[float, PrngState]:
    """Standard normal deviate via Box-Muller; consumes exactly two uniforms."""
    u1, state = next_uniform(state)
    u2, state = next_uniform(state)
    if u1 == 0.0:
        u1 = _MIN_UNIFORM  # the LCG can emit state 0; ln(0) must be avoided
    z = math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)
    return z, state


def substream_for_sample(master_seed: int, index: int) -> PrngState:
    """Derive the per-sample stream state for a sample index.

    state0 = (seed XOR (index * 2654435761 mod 2^31)) mod 2^31, then three
    warm-up advances so neighbouring indices decorrelate.
    """
    if index < 0:
        raise ValueError(f"sample index must be >= 0, got {index}")
    mixed = ((master_seed % MODULUS) ^ ((index * _INDEX_MIX) % MODULUS)) % MODULUS
    for _ in range(_WARMUP_STEPS):
        mixed = _advance(mixed)
    return PrngState(mixed)


# --- vectorized block draws -------------------------------------------------
#
# X_{n+j} can be produced for a whole block at once from cached affine jump
# coefficients: X_{n+j+1} = (A[j]*X_n + C[j]) mod m with A[j] = a^(j+1) mod m
# and C[j] the matching increment sum.  All products stay below 2^62, inside
# int64.  The block path is bit-identical to repeated _advance in the states
# it produces (exact integer arithmetic either way).

_jump_lock = threading.Lock()
_jump_a = np.array([MULTIPLIER], dtype=np.int64)
_jump_c = np.array([INCREMENT], dtype=np.int64)


def _jump_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    global _jump_a, _jump_c
    if len(_jump_a) < n:
        with _jump_lock:
            if len(_jump_a) < n:
                grow_to = max(n, 2 * len(_jump_a))
                a = _jump_a.tolist()
                c = _jump_c.tolist()
                while len(a) < grow_to:
                    a.append((a[-1] * MULTIPLIER) % MODULUS)
                    c.append((c[-1] * MULTIPLIER + INCREMENT) % MODULUS)
                _jump_a = np.array(a, dtype=np.int64)
                _jump_c = np.array(c, dtype=np.int64)
    return _jump_a, _jump_c


def uniform_block(state: PrngState, n: int) -> tuple[np.ndarray, PrngState]:
    """n successive uniforms as a float64 array, plus the advanced state."""
    if n == 0:
        return np.empty(0, dtype=np.float64), state
    a, c = _jump_tables(n)
    states = (a[:n] * np.int64(state.state) + c[:n]) % MODULUS
    return states / float(MODULUS), PrngState(int(states[-1]))


def gaussian_block(state: PrngState, n: int) -> tuple[np.ndarray, PrngState]:
    """n Box-Muller deviates, consuming uniforms in the same (u1, u2)
    interleaved order as n scalar :func:`gaussian` calls."""
    us, state = uniform_block(state, 2 * n)
    u1 = us[0::2].copy()
    u2 = us[1::2]
    u1[u1 == 0.0] = _MIN_UNIFORM
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)
    return z, state


class Stream:
    """Mutable convenience wrapper over the pure state machine.

    Each worker owns its Stream; nothing is shared, so no locking. All
    methods advance the wrapped state in place.
    """

    __slots__ = ("state",)

    def __init__(self, state: PrngState | int):
        self.state = state if isinstance(state, PrngState) else seed_state(state)

    @classmethod
    def for_sample(cls, master_seed: int, index: int) -> "Stream":
        return cls(substream_for_sample(master_seed, index))

    def uniform(self) -> float:
        u, self.state = next_uniform(self.state)
        return u

    def uniform_range(self, lo: float, hi: float) -> float:
        v, self.state = uniform_range(self.state, lo, hi)
        return v

    def int_range(self, lo: int, hi: int) -> int:
        v, self.state = int_range(self.state, lo, hi)
        return v

    def bernoulli(self, p: float) -> bool:
        v, self.state = bernoulli(self.state, p)
        return v

    def gaussian(self) -> float:
        z, self.state = gaussian(self.state)
        return z

    def uniform_array(self, n: int) -> np.ndarray:
        arr, self.state = uniform_block(self.state, n)
        return arr

    def gaussian_array(self, n: int) -> np.ndarray:
        arr, self.state = gaussian_block(self.state, n)
        return arr
