import numpy as np
import pytest

from logpot.setgeom import normalize


def conformal_green_interval(z, a=-2.0, b=2.0):
    """Green's function of [a, b] from the exterior map z -> w, z = w + 1/w on [-2, 2]."""
    z = 4.0 * (np.asarray(z, dtype=complex) - 0.5 * (a + b)) / (b - a)
    w = 0.5 * (z + np.sqrt(z - 2) * np.sqrt(z + 2))
    return np.log(np.abs(w))


def random_union(rng, n_max=4, lo=-3.0, hi=3.0):
    k = int(rng.integers(1, n_max + 1))
    pts = np.sort(rng.uniform(lo, hi, 2 * k))
    # keep intervals and gaps of reasonable size
    pts = lo + np.cumsum(np.diff(np.concatenate([[lo], pts])) + 0.05)
    return normalize(pts.reshape(-1, 2))


def random_subset(rng, E):
    """A random union contained in E (random shrink of a random subfamily)."""
    parts = []
    for a, b in E.intervals:
        if parts and rng.random() < 0.3:
            continue
        u, v = np.sort(rng.uniform(0, 1, 2))
        parts.append((a + 0.5 * u * (b - a), b - 0.5 * (1 - v) * (b - a)))
    if not parts:
        a, b = E.intervals[0]
        parts.append((a, 0.5 * (a + b)))
    return normalize(parts)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
