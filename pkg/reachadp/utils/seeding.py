import hashlib

import numpy as np

from reachadp.exceptions import ValidationError

# Stream tags, so that each use of randomness gets its own generator
BASIS = 1
SCENARIOS = 2
POLICY = 3
ROLLOUT = 4
VIOLATION = 5
INITIAL_CONDITIONS = 6
OBSTACLES = 7


def derive_rng(master, *keys):
    """
    Generator seeded by ``master`` and a tuple of non-negative integer keys.

    The same ``(master, *keys)`` always gives the same stream, and streams
    for different keys are independent (``numpy.random.SeedSequence``).
    """
    entropy = [int(master)] + [int(k) for k in keys]
    if any(e < 0 for e in entropy):
        raise ValidationError(f"Seeds must be non-negative, got {entropy}")
    return np.random.default_rng(entropy)


def point_key(x):
    """64-bit integer digest of a point, used to seed per-state decisions."""
    data = np.ascontiguousarray(np.asarray(x, dtype="float64")).tobytes()
    return int.from_bytes(hashlib.sha256(data).digest()[:8], "little")
