"""Dense complex linear algebra on bipartite C^n (x) C^n operators.

Product-basis ordering is lexicographic with the first factor major:
``|i> (x) |j>`` sits at index ``i*n + j``.  Every matrix in the package is a
plain ``numpy.ndarray`` of dtype complex128; vectors are 1-d arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10


class DimensionError(ValueError):
    """Raised when operand shapes do not fit the requested operation."""


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # column i pairs with values[i]

    def min_vector(self) -> np.ndarray:
        return self.vectors[:, 0]


@dataclass(frozen=True)
class SpanRank:
    rank: int
    singular_values: np.ndarray  # descending

    @property
    def gap(self) -> float:
        """Ratio sigma_rank / sigma_{rank+1}; ``inf`` when the span is full."""
        s = self.singular_values
        if self.rank == 0:
            return 0.0
        if self.rank >= len(s) or s[self.rank] == 0.0:
            return float("inf")
        return float(s[self.rank - 1] / s[self.rank])


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf")
    return a


def _local_dim(m: np.ndarray, n: int) -> None:
    if m.shape != (n * n, n * n):
        raise DimensionError(f"expected a {n*n}x{n*n} matrix for n={n}, got {m.shape}")


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def ket(index: int, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[index % n] = 1.0
    return v


def outer(u, v=None) -> np.ndarray:
    """``|u><v|`` (``|u><u|`` when ``v`` is omitted)."""
    u = np.asarray(u, dtype=complex)
    v = u if v is None else np.asarray(v, dtype=complex)
    return np.outer(u, v.conj())


def partial_transpose(m, n: int) -> np.ndarray:
    """Transpose on the second tensor factor (the Gamma of ``A + B^Gamma``)."""
    m = as_matrix(m)
    _local_dim(m, n)
    t = m.reshape(n, n, n, n)  # (i, k, j, l) for row (i,k), column (j,l)
    return t.transpose(0, 3, 2, 1).reshape(n * n, n * n)


def partial_trace(m, n: int, which: str = "first") -> np.ndarray:
    """Trace out the ``"first"`` or ``"second"`` tensor factor."""
    m = as_matrix(m)
    _local_dim(m, n)
    t = m.reshape(n, n, n, n)
    if which == "first":
        return np.einsum("ikil->kl", t)
    if which == "second":
        return np.einsum("ikjk->ij", t)
    raise ValueError(f"which must be 'first' or 'second', got {which!r}")


def hadamard(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"Hadamard product of {a.shape} and {b.shape}")
    return a * b


def hermiticity_residual(m) -> float:
    m = as_matrix(m)
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    return hermiticity_residual(m) <= tol * scale


def hermitian_eigen(m) -> EigenResult:
    m = as_matrix(m)
    if not is_hermitian(m):
        raise ValueError("hermitian_eigen needs a Hermitian matrix")
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    return EigenResult(values=values, vectors=vectors)


def min_eigenvalue(m) -> float:
    return float(hermitian_eigen(m).values[0])


def svd_rank(vectors: Sequence | np.ndarray, rel_tol: float = 1e-8) -> SpanRank:
    """Numerical rank of a family of vectors (rows of the stacked matrix)."""
    rows = np.asarray(list(vectors) if not isinstance(vectors, np.ndarray) else vectors,
                      dtype=complex)
    if rows.size == 0:
        raise ValueError("svd_rank of an empty family")
    if rows.ndim != 2:
        raise DimensionError("vectors must share one dimension")
    s = np.linalg.svd(rows, compute_uv=False)
    rank = int(np.sum(s > rel_tol * s[0])) if s[0] > 0 else 0
    return SpanRank(rank=rank, singular_values=s)


def det(m) -> complex:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("determinant of a non-square matrix")
    return complex(np.linalg.det(m))


# -- JSON interchange -------------------------------------------------------

def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    rows, cols = int(doc["rows"]), int(doc["cols"])
    re, im = doc["re"], doc.get("im", [0.0] * len(doc["re"]))
    if len(re) != rows * cols or len(im) != rows * cols:
        raise DimensionError("entry count does not match rows*cols")
    return (np.asarray(re, float) + 1j * np.asarray(im, float)).reshape(rows, cols)


def vector_from_json(doc: dict) -> np.ndarray:
    return matrix_from_json(doc).reshape(-1)


def stack_products(pairs: Iterable[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    return np.array([np.kron(p, q) for p, q in pairs])
