"""Counter-based random streams.

Every random draw in the benchmark is keyed by (seed, domain tag, indices)
through a Philox counter, so regenerating any single sample never depends on
how many samples were drawn before it, in what order, or on how work was
split across processes.
"""

import numpy as np

# Domain tags keep unrelated draws on non-overlapping counter blocks.
TAG_DATASET_SAMPLE = 1
TAG_EVAL_SAMPLE = 2
TAG_SOBOL_SCRAMBLE = 3

_MASK64 = (1 << 64) - 1


def stream(seed: int, tag: int, i0: int = 0, i1: int = 0) -> np.random.Generator:
    """Independent generator for one (seed, tag, i0, i1) slot.

    The indices live in the Philox counter words, so distinct slots are
    disjoint by construction rather than by hashing.
    """
    counter = np.array([0, i0 & _MASK64, i1 & _MASK64, tag & _MASK64], dtype=np.uint64)
    key = np.array([seed & _MASK64, 0x9E3779B97F4A7C15], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))


def random_digits(rng: np.random.Generator, n: int = 6) -> str:
    return "".join(str(d) for d in rng.integers(0, 10, size=n))
