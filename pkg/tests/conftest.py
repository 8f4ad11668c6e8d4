import numpy as np
import pytest

from clinbias.gender import GenderDirection, GenderPair


def make_direction(vec) -> GenderDirection:
    """GenderDirection around an arbitrary unit vector, with dummy diagnostics."""
    g = np.asarray(vec, dtype=np.float64)
    g = g / np.linalg.norm(g)
    return GenderDirection(
        g=g,
        pairs_used=(GenderPair("she", "he"),),
        pairs_skipped=(),
        eigenvalue_ratio=0.0,
        degenerate=False,
        source_kind="static",
    )


@pytest.fixture
def rng():
    return np.random.default_rng(42)
