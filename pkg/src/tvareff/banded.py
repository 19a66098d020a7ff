"""Symmetric banded LDL^T factorization, solve, and selected inversion.

Storage is lower-banded: ``ab[r, j]`` holds ``M[j + r, j]`` for
``r = 0..bw`` with entries past the matrix edge ignored. All kernels are
numba-compiled; the selected inverse (Takahashi recursion) returns the
inverse restricted to the same band, which is exactly the set of entries
needed for per-period covariance blocks and for the cross-period terms
of the variance re-estimation. Cost is O(N * bw^2) per call, never
O(N^2), so these routines stay cheap inside bootstrap loops.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .exceptions import NumericalError

__all__ = [
    "factor_banded",
    "solve_factored",
    "selected_inverse",
    "band_to_dense",
    "dense_to_band",
    "CONDITION_LIMIT",
]

# Factor diagonal spread beyond this ratio is treated as numerically singular.
CONDITION_LIMIT = 1.0e12


@njit(cache=True)
def _ldlt_kernel(ab):  # pragma: no cover - exercised via factor_banded
    bw = ab.shape[0] - 1
    n = ab.shape[1]
    low = np.zeros((bw + 1, n))
    d = np.zeros(n)
    for j in range(n):
        s = ab[0, j]
        kmin = j - bw
        if kmin < 0:
            kmin = 0
        for k in range(kmin, j):
            ljk = low[j - k, k]
            s -= ljk * ljk * d[k]
        d[j] = s
        if s <= 0.0 or not np.isfinite(s):
            return low, d, j
        imax = j + bw
        if imax > n - 1:
            imax = n - 1
        for i in range(j + 1, imax + 1):
            acc = ab[i - j, j]
            kmin2 = i - bw
            if kmin2 < 0:
                kmin2 = 0
            for k in range(kmin2, j):
                acc -= low[i - k, k] * low[j - k, k] * d[k]
            low[i - j, j] = acc / s
    return low, d, -1


@njit(cache=True)
def _solve_kernel(low, d, rhs):  # pragma: no cover
    bw = low.shape[0] - 1
    n = low.shape[1]
    x = rhs.copy()
    for i in range(n):
        s = x[i]
        kmin = i - bw
        if kmin < 0:
            kmin = 0
        for k in range(kmin, i):
            s -= low[i - k, k] * x[k]
        x[i] = s
    for i in range(n):
        x[i] /= d[i]
    for i in range(n - 1, -1, -1):
        s = x[i]
        kmax = i + bw
        if kmax > n - 1:
            kmax = n - 1
        for k in range(i + 1, kmax + 1):
            s -= low[k - i, i] * x[k]
        x[i] = s
    return x


@njit(cache=True)
def _takahashi_kernel(low, d):  # pragma: no cover
    bw = low.shape[0] - 1
    n = low.shape[1]
    z = np.zeros((bw + 1, n))
    for i in range(n - 1, -1, -1):
        jmax = i + bw
        if jmax > n - 1:
            jmax = n - 1
        for j in range(jmax, i - 1, -1):
            s = 0.0
            for k in range(i + 1, jmax + 1):
                lki = low[k - i, i]
                if lki != 0.0:
                    if k >= j:
                        s += lki * z[k - j, j]
                    else:
                        s += lki * z[j - k, k]
            if i == j:
                z[0, i] = 1.0 / d[i] - s
            else:
                z[j - i, i] = -s
    return z


def factor_banded(ab: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """LDL^T factorization of a symmetric positive definite banded matrix.

    Parameters
    ----------
    ab : ndarray, shape (bw + 1, n)
        Lower-banded storage of the matrix.

    Returns
    -------
    low, d : ndarray
        Unit-lower factor in the same band layout (implicit unit diagonal)
        and the factor diagonal.

    Raises
    ------
    NumericalError
        If a pivot is non-positive (matrix not positive definite) or the
        pivot spread exceeds `CONDITION_LIMIT`, naming the offending
        column so callers can map it back to a period/coefficient.
    """
    ab = np.ascontiguousarray(ab, dtype=np.float64)
    low, d, bad = _ldlt_kernel(ab)
    if bad >= 0:
        raise NumericalError(
            f"normal equations not positive definite at column {bad} "
            f"(pivot {d[bad]:.3e}); the system is singular or indefinite"
        )
    dmax = float(np.max(d))
    dmin = float(np.min(d))
    if dmax / dmin > CONDITION_LIMIT:
        j = int(np.argmin(d))
        raise NumericalError(
            f"normal equations numerically singular: condition estimate "
            f"{dmax / dmin:.3e} exceeds {CONDITION_LIMIT:.1e} (worst column {j})"
        )
    return low, d


def solve_factored(low: np.ndarray, d: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve M x = rhs given the banded LDL^T factor of M."""
    return _solve_kernel(low, d, np.ascontiguousarray(rhs, dtype=np.float64))


def selected_inverse(low: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Entries of M^{-1} on the band of M, in the same lower-banded layout.

    Implements the Takahashi recursion: with M = L D L^T,
    ``Z = D^{-1} L^{-1} + (I - L^T) Z`` closes over the band, so the band
    of the inverse is computable from the factor alone in O(n * bw^2).
    """
    return _takahashi_kernel(low, d)


def band_to_dense(ab: np.ndarray, symmetric: bool = True) -> np.ndarray:
    """Expand lower-banded storage to a dense matrix (test helper)."""
    bw = ab.shape[0] - 1
    n = ab.shape[1]
    out = np.zeros((n, n))
    for r in range(bw + 1):
        for j in range(0, n - r):
            out[j + r, j] = ab[r, j]
            if symmetric and r > 0:
                out[j, j + r] = ab[r, j]
    return out


def dense_to_band(m: np.ndarray, bw: int) -> np.ndarray:
    """Extract the lower band of a dense symmetric matrix (test helper)."""
    n = m.shape[0]
    ab = np.zeros((bw + 1, n))
    for r in range(bw + 1):
        for j in range(0, n - r):
            ab[r, j] = m[j + r, j]
    return ab
