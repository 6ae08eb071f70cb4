"""Dense complex linear algebra substrate shared by every module.

Conventions fixed here and relied on everywhere else:

* Matrices are dense ``numpy`` arrays of dtype ``complex128`` (real inputs are
  promoted).  All entries must be finite.
* Vectorization is **row-major**: ``vectorize(A)[i * cols + j] == A[i, j]``.
  With this choice ``vectorize(A @ X @ B) == kron(A, B.T) @ vectorize(X)`` and
  ``Tr(F† X) == vectorize(F).conj() @ vectorize(X)``.
* Numerical rank uses the relative threshold ``rtol * sigma_max`` on singular
  values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_cmat",
    "as_cvec",
    "dagger",
    "hs_inner",
    "hs_norm",
    "max_abs",
    "vectorize",
    "devectorize",
    "rank_range",
    "numerical_rank",
    "haar_unitary",
    "cmat_to_json",
    "cmat_from_json",
]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative thresholds for approximate identities.

    ``atol`` guards entrywise equalities, ``rtol`` guards rank decisions and
    inversion quality (as a fraction of the largest singular value).
    """

    atol: float = 1e-10
    rtol: float = 1e-8

    def __post_init__(self) -> None:
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be nonnegative")


DEFAULT_TOL = Tolerance()


def as_cmat(a, *, square: bool = False) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array, validating shape."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={m.ndim}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix entries must be finite")
    return m


def as_cvec(v) -> np.ndarray:
    """Coerce ``v`` to a finite 1-D complex array."""
    w = np.asarray(v, dtype=complex)
    if w.ndim != 1:
        raise DimensionError(f"expected a vector, got ndim={w.ndim}")
    if not (np.all(np.isfinite(w.real)) and np.all(np.isfinite(w.imag))):
        raise ValueError("vector entries must be finite")
    return w


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a† b)``.

    Conjugate-linear in the first argument and linear in the second, so
    ``hs_inner(x, x)`` is real and nonnegative.

    Raises:
        DimensionError: if the operands do not share a shape.
    """
    am = as_cmat(a)
    bm = as_cmat(b)
    if am.shape != bm.shape:
        raise DimensionError(f"shape mismatch: {am.shape} vs {bm.shape}")
    return complex(np.vdot(am, bm))


def hs_norm(a) -> float:
    """Hilbert-Schmidt (Frobenius) norm ``sqrt(Tr(a† a))``."""
    return float(np.linalg.norm(as_cmat(a)))


def max_abs(a) -> float:
    """Largest entry magnitude; the max norm used by every residual check."""
    arr = np.asarray(a)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def vectorize(a) -> np.ndarray:
    """Row-major stacking of a matrix into a vector."""
    return as_cmat(a).reshape(-1).copy()


def devectorize(v, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Inverse of :func:`vectorize`.

    Without an explicit ``shape`` the length must be a perfect square and a
    square matrix is returned.
    """
    w = as_cvec(v)
    if shape is None:
        d = math.isqrt(w.size)
        if d * d != w.size:
            raise DimensionError(f"length {w.size} is not a perfect square")
        shape = (d, d)
    if shape[0] * shape[1] != w.size:
        raise DimensionError(f"cannot reshape length {w.size} to {shape}")
    return w.reshape(shape).copy()


def rank_range(a, tol: Tolerance = DEFAULT_TOL) -> tuple[int, np.ndarray, np.ndarray]:
    """Numerical rank, orthonormal range basis and Moore-Penrose inverse.

    Singular values at or below ``tol.rtol * sigma_max`` are treated as zero.
    A zero matrix yields rank 0, an empty basis and a zero pseudo-inverse.

    Returns:
        ``(rank, range_basis, pseudo_inverse)`` where ``range_basis`` holds
        ``rank`` orthonormal columns spanning the image of ``a`` and the
        pseudo-inverse satisfies the four Moore-Penrose identities.
    """
    m = as_cmat(a)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    cut = tol.rtol * s[0] if s.size and s[0] > 0 else 0.0
    rank = int(np.sum(s > cut))
    basis = u[:, :rank]
    if rank:
        pinv = (vh[:rank].conj().T / s[:rank]) @ u[:, :rank].conj().T
    else:
        pinv = np.zeros((m.shape[1], m.shape[0]), dtype=complex)
    return rank, basis, pinv


def numerical_rank(a, tol: Tolerance = DEFAULT_TOL) -> int:
    """Rank of ``a`` under the package-wide singular-value threshold."""
    m = as_cmat(a)
    s = np.linalg.svd(m, compute_uv=False)
    cut = tol.rtol * s[0] if s.size and s[0] > 0 else 0.0
    return int(np.sum(s > cut))


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases.conj()


def cmat_to_json(a) -> dict:
    """Serialize a complex matrix as ``{"rows", "cols", "re", "im"}``.

    Entries are flattened row-major; the format is shared by every module.
    """
    m = as_cmat(a)
    flat = m.reshape(-1)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def cmat_from_json(data: dict) -> np.ndarray:
    """Parse the matrix format produced by :func:`cmat_to_json`."""
    try:
        rows, cols = int(data["rows"]), int(data["cols"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix record: {exc}") from exc
    if re.shape != (rows * cols,) or im.shape != (rows * cols,):
        raise DimensionError("entry count does not match rows * cols")
    return as_cmat((re + 1j * im).reshape(rows, cols))
