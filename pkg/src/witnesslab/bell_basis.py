"""Weyl operators, generalized Bell states and covariance diagnostics.

``U_{mk}|l> = w^{m l} |l + k>`` with ``w = exp(2 pi i / n)``; the Bell states
are ``|psi_{kl}> = (1 (x) U_{kl}) |psi^+_n>``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import as_matrix, outer


def omega(n: int) -> complex:
    return complex(np.exp(2j * np.pi / n))


def weyl(n: int, m: int, k: int) -> np.ndarray:
    """Column ``l`` holds ``w^{m l}`` in row ``(l + k) mod n``."""
    w = omega(n)
    u = np.zeros((n, n), dtype=complex)
    for l in range(n):
        u[(l + k) % n, l] = w ** ((m * l) % n)
    return u


def max_entangled(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError("n must be at least 2")
    v = np.zeros(n * n, dtype=complex)
    v[[k * n + k for k in range(n)]] = 1.0 / np.sqrt(n)
    return v


def max_entangled_projector(n: int) -> np.ndarray:
    return outer(max_entangled(n))


def bell_state(n: int, k: int, l: int) -> np.ndarray:
    return np.kron(np.eye(n), weyl(n, k, l)) @ max_entangled(n)


def bell_projector(n: int, k: int, l: int) -> np.ndarray:
    return outer(bell_state(n, k, l))


def bell_basis(n: int) -> np.ndarray:
    """Rows are the ``n^2`` Bell states, ordered by label ``(k, l)`` with ``k`` major."""
    return np.array([bell_state(n, k, l) for k in range(n) for l in range(n)])


def band_projector(n: int, k: int) -> np.ndarray:
    """``sum_m |m, m+k><m, m+k|``, the sum of Bell projectors with shift ``k``.

    This is ``sum_m P_{mk}`` (all phases at fixed shift); with it the compact
    form of the witness reproduces the entrywise definition.
    """
    p = np.zeros((n * n, n * n), dtype=complex)
    for m in range(n):
        idx = m * n + (m + k) % n
        p[idx, idx] = 1.0
    return p


@dataclass(frozen=True)
class BellTable:
    coefficients: np.ndarray  # coefficients[k, l] = <psi_kl|X|psi_kl>
    offdiag_residual: float   # max |<psi_kl|X|psi_rs>| over distinct labels


def bell_coefficients(x, n: int) -> BellTable:
    x = as_matrix(x)
    basis = bell_basis(n)
    g = basis.conj() @ x @ basis.T
    diag = np.real(np.diag(g)).reshape(n, n)
    off = g - np.diag(np.diag(g))
    return BellTable(coefficients=diag, offdiag_residual=float(np.max(np.abs(off))))


def bell_diagonal_operator(coefficients) -> np.ndarray:
    c = np.asarray(coefficients)
    n = c.shape[0]
    return sum(c[k, l] * bell_projector(n, k, l) for k in range(n) for l in range(n))


def diagonal_unitary(phases) -> np.ndarray:
    return np.diag(np.exp(1j * np.asarray(phases, dtype=float)))


def covariance_residual(x, phases) -> float:
    """Frobenius norm of ``(U (x) U*) X (U (x) U*)^dag - X`` for ``U = diag(e^{i phi})``."""
    x = as_matrix(x)
    u = diagonal_unitary(phases)
    v = np.kron(u, u.conj())
    return float(np.linalg.norm(v @ x @ v.conj().T - x))
