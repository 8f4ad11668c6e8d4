"""Dense vector math: cosine, mean pooling, pair centering, top principal component."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_SEED = 42
POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
# Relative gap below which the top eigenpair is considered ill-defined.
DEGENERACY_RTOL = 1e-9


class ZeroVectorError(ValueError):
    """A vector with zero norm was passed where a direction is required."""


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge; carries the iteration count."""

    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"power iteration did not converge after {iterations} iterations")


def _as_matrix(rows: Iterable[Sequence[float]] | np.ndarray) -> np.ndarray:
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1].

    Raises ZeroVectorError if either vector has zero norm; the caller
    decides whether that means skip or fail.
    """
    u = np.asarray(a, dtype=np.float64)
    v = np.asarray(b, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"vector length mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine undefined for zero-norm vector")
    return float(np.clip(float(np.dot(u, v)) / (nu * nv), -1.0, 1.0))


def mean_pool(vectors: Sequence[Sequence[float]]) -> np.ndarray:
    """Component-wise arithmetic mean of a nonempty list of equal-length vectors."""
    if len(vectors) == 0:
        raise ValueError("mean_pool of an empty list")
    m = _as_matrix(vectors)
    return m.mean(axis=0)


def pair_center(pairs: Sequence[tuple[Sequence[float], Sequence[float]]]) -> np.ndarray:
    """Center each (u, v) pair about its midpoint.

    Emits rows u - m and v - m with m = (u + v) / 2, so the output has
    2 * len(pairs) rows and exact zero row-mean.
    """
    if len(pairs) == 0:
        raise ValueError("pair_center of an empty pair list")
    rows = []
    dim = None
    for u, v in pairs:
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        if u.shape != v.shape or u.ndim != 1:
            raise ValueError(f"pair dimension mismatch: {u.shape} vs {v.shape}")
        if dim is None:
            dim = u.shape[0]
        elif u.shape[0] != dim:
            raise ValueError(f"pair dimension mismatch: expected {dim}, got {u.shape[0]}")
        mid = (u + v) / 2.0
        rows.append(u - mid)
        rows.append(v - mid)
    return _as_matrix(np.vstack(rows))


@dataclass(frozen=True)
class TopComponent:
    """Dominant eigenpair of m^T m plus convergence/degeneracy diagnostics."""

    vector: np.ndarray
    eigenvalue: float
    runner_up_eigenvalue: float
    iterations: int
    degenerate: bool

    @property
    def eigenvalue_ratio(self) -> float:
        """runner-up / top eigenvalue; close to 1 means the direction is ill-defined."""
        if self.eigenvalue == 0.0:
            return 1.0
        return self.runner_up_eigenvalue / self.eigenvalue


def _power_iterate(
    cov: np.ndarray,
    rng: np.random.Generator,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, float, int]:
    """Dominant unit eigenvector of a symmetric PSD matrix."""
    n = cov.shape[0]
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    for it in range(1, max_iter + 1):
        y = cov @ x
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            # start vector fell in the nullspace; redraw
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            continue
        x_new = y / ny
        # cov is PSD, so iterates settle without sign flips; abs guards rounding
        if abs(float(np.dot(x, x_new))) >= 1.0 - tol:
            lam = float(x_new @ cov @ x_new)
            return x_new, lam, it
        x = x_new
    raise PowerIterationError(max_iter)


def top_component(
    rows: Iterable[Sequence[float]] | np.ndarray,
    seed: int = DEFAULT_SEED,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
) -> TopComponent:
    """Top principal direction of a row matrix via power iteration on m^T m.

    The returned vector has unit norm; its sign is unspecified at this layer.
    The runner-up eigenvalue is estimated by one deflation step and feeds the
    degeneracy flag (top two eigenvalues within DEGENERACY_RTOL relative).
    """
    m = _as_matrix(rows)
    if m.shape[0] < 2:
        raise ValueError(f"need at least 2 rows for a principal component, got {m.shape[0]}")
    if not np.any(m):
        raise ValueError("all-zero matrix has no principal component")
    cov = m.T @ m
    rng = np.random.default_rng(seed)
    vec, lam, iterations = _power_iterate(cov, rng, tol, max_iter)

    if cov.shape[0] == 1:
        runner_up = 0.0
    else:
        deflated = cov - lam * np.outer(vec, vec)
        # Deflated matrix may have tiny negative ripple; clamp for the ratio.
        try:
            _, lam2, _ = _power_iterate(deflated, rng, tol, max_iter)
        except PowerIterationError:
            # Good-enough Rayleigh estimate: degeneracy check only needs the scale.
            x = rng.standard_normal(cov.shape[0])
            x /= np.linalg.norm(x)
            for _ in range(100):
                y = deflated @ x
                ny = float(np.linalg.norm(y))
                if ny == 0.0:
                    break
                x = y / ny
            lam2 = float(x @ deflated @ x)
        runner_up = max(float(lam2), 0.0)

    degenerate = abs(lam - runner_up) <= DEGENERACY_RTOL * max(abs(lam), 1e-300)
    return TopComponent(
        vector=vec,
        eigenvalue=lam,
        runner_up_eigenvalue=runner_up,
        iterations=iterations,
        degenerate=degenerate,
    )


def principal_component(
    rows: Iterable[Sequence[float]] | np.ndarray,
    seed: int = DEFAULT_SEED,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
) -> np.ndarray:
    """Unit-norm top eigenvector of m^T m (sign unspecified)."""
    return top_component(rows, seed=seed, tol=tol, max_iter=max_iter).vector
