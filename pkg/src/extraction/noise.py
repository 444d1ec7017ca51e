"""Keyed randomness for reproducible extraction.

Every random quantity is a pure function of the run seed plus a key
(stage, purpose, and a user id or gram). Gram noise is derived from the
gram's token strings, so neither thread count, iteration order, nor token
interning order can change a draw.
"""

import hashlib
import math
from typing import Sequence

import numpy as np
from scipy import special, stats

from ..corpus.tokens import NGram, TokenTable

EXACT_BINOMIAL_LIMIT = 10**6

_FIELD_SEP = b"\x1f"
_MANTISSA_BITS = 52


def _key_digest(*parts: object, digest_size: int = 16) -> "hashlib._Hash":
    h = hashlib.blake2b(digest_size=digest_size)
    for part in parts:
        data = str(part).encode("utf-8")
        h.update(len(data).to_bytes(4, "little"))
        h.update(data)
    return h


def stream(seed: int, stage: int, purpose: str, *keys: object) -> np.random.Generator:
    """Independent generator for one (seed, stage, purpose, keys) combination.

    Args:
        seed: Run seed
        stage: Extraction stage (the level k for DPNE)
        purpose: What the draws are for, e.g. ``"cap"`` or ``"spurious"``
        keys: Further identifiers such as a user id

    Returns:
        numpy Generator seeded from a BLAKE2b digest of the key
    """
    digest = _key_digest("stream", seed, stage, purpose, *keys).digest()
    return np.random.default_rng(np.random.SeedSequence(int.from_bytes(digest, "little")))


class GramNoise:
    """Standard normal noise keyed by (seed, stage, gram).

    A gram's draw is Phi^-1 of a uniform built from the top 52 bits of a
    BLAKE2b hash of its token strings. The uniform lies strictly inside
    (0, 1), so the draw is always finite.
    """

    def __init__(self, seed: int, stage: int, tokens: TokenTable, purpose: str = "release"):
        self.seed = seed
        self.stage = stage
        self.tokens = tokens
        self._prefix = _key_digest("noise", seed, stage, purpose, digest_size=8)

    def uniform(self, gram: NGram) -> float:
        h = self._prefix.copy()
        h.update(_FIELD_SEP.join(w.encode("utf-8") for w in self.tokens.words(gram)))
        bits = int.from_bytes(h.digest(), "little") >> (64 - _MANTISSA_BITS)
        return (bits + 0.5) / float(1 << _MANTISSA_BITS)

    def normal(self, gram: NGram) -> float:
        return float(special.ndtri(self.uniform(gram)))

    def normals(self, grams: Sequence[NGram]) -> np.ndarray:
        """Draws for many grams at once, aligned with ``grams``."""
        uniforms = np.fromiter(
            (self.uniform(g) for g in grams), dtype=float, count=len(grams)
        )
        return special.ndtri(uniforms)


def sample_binomial(n: int, q: float, rng: np.random.Generator) -> int:
    """Binomial(n, q) draw from a single uniform.

    Uses the exact inverse CDF for n <= 10^6 and a normal approximation with
    continuity correction above that.

    Args:
        n: Number of trials, >= 0
        q: Success probability in [0, 1]
        rng: Source of the uniform

    Returns:
        Number of successes
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    if n == 0 or q == 0.0:
        return 0
    if q == 1.0:
        return int(n)

    u = rng.random()
    while u == 0.0:
        u = rng.random()

    if n <= EXACT_BINOMIAL_LIMIT:
        return int(stats.binom.ppf(u, n, q))

    mean = n * q
    sd = math.sqrt(n * q * (1.0 - q))
    # smallest x with Phi((x + 0.5 - mean) / sd) >= u
    x = math.ceil(mean + sd * float(special.ndtri(u)) - 0.5)
    return int(min(max(x, 0), n))
