"""Banded matrix storage with a partial-pivoting LU.

Storage follows the LAPACK general-band layout: entry ``A[i, j]`` lives at
``bands[ku + i - j, j]``. The factorisation (``gbtf2``-style) keeps ``kl``
extra rows on top for pivoting fill-in, so a factor can be reused for any
number of right-hand sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np


class SingularMatrixError(np.linalg.LinAlgError):
    def __init__(self, index: int):
        super().__init__(f"matrix is singular: zero pivot at index {index}")
        self.index = index


@dataclass(frozen=True)
class BandedMatrix:
    n: int
    kl: int
    ku: int
    bands: np.ndarray

    def __post_init__(self):
        if self.bands.shape != (self.kl + self.ku + 1, self.n):
            raise ValueError(
                f"band storage has shape {self.bands.shape}, "
                f"expected {(self.kl + self.ku + 1, self.n)}"
            )
        if self.n > 1 and (self.kl >= self.n or self.ku >= self.n):
            raise ValueError("bandwidths must be smaller than the dimension")

    @classmethod
    def zeros(cls, n: int, kl: int, ku: int) -> "BandedMatrix":
        return cls(n, kl, ku, np.zeros((kl + ku + 1, n)))

    @classmethod
    def from_dense(cls, a: np.ndarray, kl: int, ku: int) -> "BandedMatrix":
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix must be square")
        bands = np.zeros((kl + ku + 1, n))
        for i in range(n):
            for j in range(max(0, i - kl), min(n, i + ku + 1)):
                bands[ku + i - j, j] = a[i, j]
        outside = a.copy()
        outside[cls(n, kl, ku, bands).band_mask()] = 0.0
        if np.any(outside != 0.0):
            raise ValueError("matrix has entries outside the requested band")
        return cls(n, kl, ku, bands)

    def band_mask(self) -> np.ndarray:
        i, j = np.indices((self.n, self.n))
        return (j - i <= self.ku) & (i - j <= self.kl)

    def __getitem__(self, ij):
        i, j = ij
        if -self.kl <= j - i <= self.ku:
            return self.bands[self.ku + i - j, j]
        return 0.0

    def __setitem__(self, ij, value):
        i, j = ij
        if not -self.kl <= j - i <= self.ku:
            raise IndexError(f"({i}, {j}) lies outside the band")
        self.bands[self.ku + i - j, j] = value

    def set_row(self, i: int, start: int, coeffs) -> None:
        for k, c in enumerate(coeffs):
            self[i, start + k] = c

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for i in range(self.n):
            for j in range(max(0, i - self.kl), min(self.n, i + self.ku + 1)):
                out[i, j] = self.bands[self.ku + i - j, j]
        return out

    def __matmul__(self, v):
        return banded_matvec(self, v)

    def scaled_sum(self, alpha: float, other: "BandedMatrix", beta: float) -> "BandedMatrix":
        """Return ``alpha*self + beta*other`` on the union of both bands."""
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        kl, ku = max(self.kl, other.kl), max(self.ku, other.ku)
        out = BandedMatrix.zeros(self.n, kl, ku)
        out.bands[ku - self.ku : ku + self.kl + 1] += alpha * self.bands
        out.bands[ku - other.ku : ku + other.kl + 1] += beta * other.bands
        return out


@dataclass(frozen=True)
class BandedLU:
    n: int
    kl: int
    ku: int
    factors: np.ndarray  # (2*kl + ku + 1, n)
    ipiv: np.ndarray

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.n:
            raise ValueError(f"rhs has length {rhs.shape[0]}, expected {self.n}")
        x = np.ascontiguousarray(rhs, dtype=np.float64).copy()
        if x.ndim == 1:
            _gbtrs(self.factors, self.ipiv, self.kl, self.ku, x)
        else:
            for k in range(x.shape[1]):
                col = np.ascontiguousarray(x[:, k])
                _gbtrs(self.factors, self.ipiv, self.kl, self.ku, col)
                x[:, k] = col
        return x


@numba.njit(cache=True)
def _gbtf2(ab, kl, ku, ipiv):
    n = ab.shape[1]
    kv = ku + kl
    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        jp = 0
        best = abs(ab[kv, j])
        for r in range(1, km + 1):
            v = abs(ab[kv + r, j])
            if v > best:
                best = v
                jp = r
        ipiv[j] = j + jp
        if ab[kv + jp, j] == 0.0:
            return j
        ju = max(ju, min(j + ku + jp, n - 1))
        if jp != 0:
            for c in range(j, ju + 1):
                tmp = ab[kv + j + jp - c, c]
                ab[kv + j + jp - c, c] = ab[kv + j - c, c]
                ab[kv + j - c, c] = tmp
        if km > 0:
            piv = ab[kv, j]
            for r in range(1, km + 1):
                ab[kv + r, j] /= piv
            for c in range(j + 1, ju + 1):
                ujc = ab[kv + j - c, c]
                if ujc != 0.0:
                    for r in range(1, km + 1):
                        ab[kv + j + r - c, c] -= ab[kv + r, j] * ujc
    return -1


@numba.njit(cache=True)
def _gbtrs(ab, ipiv, kl, ku, b):
    n = ab.shape[1]
    kv = ku + kl
    for j in range(n - 1):
        km = min(kl, n - 1 - j)
        p = ipiv[j]
        if p != j:
            tmp = b[p]
            b[p] = b[j]
            b[j] = tmp
        bj = b[j]
        for r in range(1, km + 1):
            b[j + r] -= ab[kv + r, j] * bj
    for j in range(n - 1, -1, -1):
        b[j] /= ab[kv, j]
        bj = b[j]
        for i in range(max(0, j - kv), j):
            b[i] -= ab[kv + i - j, j] * bj


@numba.njit(cache=True)
def _gbmv(bands, kl, ku, x, out):
    n = x.shape[0]
    for i in range(n):
        s = 0.0
        for j in range(max(0, i - kl), min(n, i + ku + 1)):
            s += bands[ku + i - j, j] * x[j]
        out[i] = s


def banded_lu(m: BandedMatrix) -> BandedLU:
    ab = np.zeros((2 * m.kl + m.ku + 1, m.n))
    ab[m.kl :] = m.bands
    ipiv = np.zeros(m.n, dtype=np.int64)
    bad = _gbtf2(ab, m.kl, m.ku, ipiv)
    if bad >= 0:
        raise SingularMatrixError(int(bad))
    return BandedLU(m.n, m.kl, m.ku, ab, ipiv)


def banded_matvec(m: BandedMatrix, v) -> np.ndarray:
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.shape != (m.n,):
        raise ValueError(f"vector has shape {v.shape}, expected ({m.n},)")
    out = np.empty(m.n)
    _gbmv(m.bands, m.kl, m.ku, v, out)
    return out


def dense_oracle_solve(a, rhs) -> np.ndarray:
    """Textbook Gaussian elimination with partial pivoting (test oracle)."""
    a = np.array(a, dtype=float)
    x = np.array(rhs, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or x.shape[0] != n:
        raise ValueError("dimension mismatch")
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            raise SingularMatrixError(k)
        if p != k:
            a[[k, p]] = a[[p, k]]
            x[[k, p]] = x[[p, k]]
        m = a[k + 1 :, k] / a[k, k]
        a[k + 1 :, k:] -= np.outer(m, a[k, k:])
        x[k + 1 :] -= np.multiply.outer(m, x[k])
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x
