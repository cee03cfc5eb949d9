"""Block positivity on product vectors: contractions, see-saw search, zero loci.

A negative see-saw value is a certificate (the violating product vector is
stored and its expectation recomputed independently).  A non-negative result
is only evidence: global minimisation over product vectors is not convex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensor_core import DimensionError, SpanRank, as_matrix, svd_rank
from .witness_factory import FamilyParam, family_params

ZERO_TOL = 1e-10
SPAN_REL_TOL = 1e-8
CERT_TOL = 1e-9
DEDUP_TOL = 1e-6

BLOCK_POSITIVE = "BlockPositive(heuristic)"
NOT_BLOCK_POSITIVE = "NotBlockPositive(certified)"


@dataclass(frozen=True)
class ProductVector:
    psi: np.ndarray
    phi: np.ndarray
    label: str = ""

    def __post_init__(self):
        for name in ("psi", "phi"):
            v = np.asarray(getattr(self, name), dtype=complex)
            norm = np.linalg.norm(v)
            if not abs(norm - 1.0) <= 1e-12:
                raise ValueError(f"{name} must be a unit vector (norm {norm})")
            object.__setattr__(self, name, v)

    @classmethod
    def normalized(cls, psi, phi, label: str = "") -> "ProductVector":
        psi = np.asarray(psi, dtype=complex)
        phi = np.asarray(phi, dtype=complex)
        return cls(psi / np.linalg.norm(psi), phi / np.linalg.norm(phi), label)

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.psi, self.phi)

    def to_dict(self) -> dict:
        return {"psi_re": self.psi.real.tolist(), "psi_im": self.psi.imag.tolist(),
                "phi_re": self.phi.real.tolist(), "phi_im": self.phi.imag.tolist()}


def _local_dim(w: np.ndarray) -> int:
    n = int(round(math.sqrt(w.shape[0])))
    if w.shape != (n * n, n * n):
        raise DimensionError(f"operator of shape {w.shape} is not on C^n (x) C^n")
    return n


def product_expectation(w, pv: ProductVector) -> float:
    w = as_matrix(w)
    v = pv.vector
    if v.shape[0] != w.shape[0]:
        raise DimensionError("product vector does not match the operator dimension")
    return float(np.real(v.conj() @ w @ v))


def contract_first(w, psi) -> np.ndarray:
    """``M`` with ``<phi|M|phi> = <psi (x) phi|W|psi (x) phi>`` for every ``phi``."""
    w = as_matrix(w)
    n = _local_dim(w)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (n,):
        raise DimensionError("psi does not match the first factor")
    return np.einsum("i,ikjl,j->kl", psi.conj(), w.reshape(n, n, n, n), psi)


def contract_second(w, phi) -> np.ndarray:
    """``M`` with ``<psi|M|psi> = <psi (x) phi|W|psi (x) phi>`` for every ``psi``."""
    w = as_matrix(w)
    n = _local_dim(w)
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (n,):
        raise DimensionError("phi does not match the second factor")
    return np.einsum("k,ikjl,l->ij", phi.conj(), w.reshape(n, n, n, n), phi)


def choi_map_apply(w, x, side: str = "first") -> np.ndarray:
    """Positive map encoded by ``W``.

    ``side="first"``:  ``Phi(X) = Tr_1((X^T (x) 1) W)``, so ``W = sum e_ij (x) Phi(e_ij)``.
    ``side="second"``: ``Phi(X) = Tr_2((1 (x) X^T) W)``, the map obtained by
    contracting the second factor; the determinant formulas for the n = 4
    classes are written for this one.
    """
    w = as_matrix(w)
    n = _local_dim(w)
    x = as_matrix(x)
    if x.shape != (n, n):
        raise DimensionError(f"map input must be {n}x{n}")
    t = w.reshape(n, n, n, n)
    if side == "first":
        return np.einsum("ij,ikjl->kl", x, t)
    if side == "second":
        return np.einsum("kl,ikjl->ij", x, t)
    raise ValueError(f"side must be 'first' or 'second', got {side!r}")


# -- see-saw -----------------------------------------------------------------

@dataclass
class CertReport:
    min_value: float
    argmin: ProductVector
    starts: int
    iterations_per_start: int
    seed: int
    verdict: str
    tol: float
    recomputed_value: float
    trace: np.ndarray | None = field(default=None, repr=False)

    @property
    def block_positive(self) -> bool:
        return self.verdict == BLOCK_POSITIVE

    def to_dict(self) -> dict:
        return {
            "schema": "witnesslab.cert/1",
            "min_value": self.min_value,
            "recomputed_value": self.recomputed_value,
            "argmin": self.argmin.to_dict(),
            "starts": self.starts,
            "iterations_per_start": self.iterations_per_start,
            "seed": self.seed,
            "tol": self.tol,
            "verdict": self.verdict,
        }


def random_unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def seesaw_batch(w, psi0: np.ndarray, iters: int = 500, conv_tol: float = 1e-15):
    """Alternating minimal-eigenvector updates for a batch of starting ``psi``.

    Returns ``(values, psi, phi, trace, iterations)`` where ``trace[t, s]`` is the
    objective of start ``s`` after sweep ``t``.
    """
    w = as_matrix(w)
    n = _local_dim(w)
    t = w.reshape(n, n, n, n)
    psi = np.array(psi0, dtype=complex)
    trace = []
    prev = np.full(psi.shape[0], np.inf)
    for _ in range(iters):
        m_phi = np.einsum("si,ikjl,sj->skl", psi.conj(), t, psi)
        _, vecs = np.linalg.eigh(m_phi)
        phi = vecs[:, :, 0]
        m_psi = np.einsum("sk,ikjl,sl->sij", phi.conj(), t, phi)
        vals, vecs = np.linalg.eigh(m_psi)
        psi = vecs[:, :, 0]
        cur = vals[:, 0]
        trace.append(cur)
        if np.all(prev - cur <= conv_tol * np.maximum(1.0, np.abs(cur))):
            break
        prev = cur
    return cur, psi, phi, np.array(trace), len(trace)


def seesaw_minimize(w, starts: int = 200, iters: int = 500, seed: int = 0,
                    tol: float = CERT_TOL, keep_trace: bool = False) -> CertReport:
    if starts < 1:
        raise ValueError("starts must be >= 1")
    w = as_matrix(w)
    n = _local_dim(w)
    rng = np.random.default_rng(seed)
    vals, psi, phi, trace, used = seesaw_batch(w, random_unit_vectors(rng, starts, n), iters)
    best = int(np.argmin(vals))
    pv = ProductVector.normalized(psi[best], phi[best])
    recomputed = product_expectation(w, pv)
    verdict = NOT_BLOCK_POSITIVE if recomputed < -tol else BLOCK_POSITIVE
    return CertReport(min_value=float(vals[best]), argmin=pv, starts=starts,
                      iterations_per_start=used, seed=seed, verdict=verdict, tol=tol,
                      recomputed_value=recomputed, trace=trace if keep_trace else None)


def projective_distance(a: ProductVector, b: ProductVector) -> float:
    """Distance between product vectors after optimal global phases on each factor."""
    def d(u, v):
        return math.sqrt(max(0.0, 2.0 - 2.0 * abs(np.vdot(u, v))))
    return d(a.psi, b.psi) + d(a.phi, b.phi)


def _expectation_and_gradient(x: np.ndarray, w: np.ndarray, n: int):
    psi = x[:n] + 1j * x[n:2 * n]
    phi = x[2 * n:3 * n] + 1j * x[3 * n:]
    a, b = np.vdot(psi, psi).real, np.vdot(phi, phi).real
    m_psi = contract_second(w, phi)
    e = np.vdot(psi, m_psi @ psi).real / (a * b)
    g_psi = 2 * (m_psi @ psi) / (a * b) - 2 * e * psi / a
    g_phi = 2 * (contract_first(w, psi) @ phi) / (a * b) - 2 * e * phi / b
    return e, np.concatenate([g_psi.real, g_psi.imag, g_phi.real, g_phi.imag])


def polish_product_vector(w, pv: ProductVector, maxiter: int = 2000) -> ProductVector:
    """Quasi-Newton refinement of a see-saw end point.

    Alternating updates crawl along flat valleys of the zero locus; BFGS on the
    Rayleigh quotient over ``(psi, phi)`` converges superlinearly there.
    """
    from scipy.optimize import minimize

    w = as_matrix(w)
    n = _local_dim(w)
    x0 = np.concatenate([pv.psi.real, pv.psi.imag, pv.phi.real, pv.phi.imag])
    res = minimize(_expectation_and_gradient, x0, args=(w, n), jac=True, method="BFGS",
                   options={"gtol": 1e-14, "maxiter": maxiter})
    x = res.x if res.fun <= product_expectation(w, pv) else x0
    return ProductVector.normalized(x[:n] + 1j * x[n:2 * n], x[2 * n:3 * n] + 1j * x[3 * n:],
                                    pv.label)


def numeric_zero_search(w, count: int = 200, seed: int = 0, threshold: float = CERT_TOL,
                        dedup_tol: float = DEDUP_TOL, iters: int = 300,
                        polish: bool = True) -> list[ProductVector]:
    """Product vectors with expectation <= ``threshold``, found from random starts.

    See-saw end points within ``1e-6`` of zero are polished, then filtered and
    deduplicated by :func:`projective_distance`.
    """
    w = as_matrix(w)
    n = _local_dim(w)
    rng = np.random.default_rng(seed)
    vals, psi, phi, _, _ = seesaw_batch(w, random_unit_vectors(rng, count, n), iters)
    found: list[ProductVector] = []
    for s in np.argsort(vals, kind="stable"):
        if vals[s] > max(threshold, 1e-6 if polish else threshold):
            break
        pv = ProductVector.normalized(psi[s], phi[s], label="search")
        if polish:
            pv = polish_product_vector(w, pv)
        if product_expectation(w, pv) > threshold:
            continue
        if all(projective_distance(pv, q) > dedup_tol for q in found):
            found.append(pv)
    return found


# -- analytic zero loci --------------------------------------------------------

def kronecker_sequence(count: int, dim: int, offset: int = 0) -> np.ndarray:
    """Additive recurrence points in [0, 1)^dim (generalised golden ratio)."""
    # root of x^(d+1) = x + 1
    g = 2.0
    for _ in range(64):
        g = (1.0 + g) ** (1.0 / (dim + 1))
    a = np.array([g ** -(j + 1) for j in range(dim)]) % 1.0
    idx = np.arange(offset + 1, offset + count + 1)[:, None]
    return (0.5 + idx * a[None, :]) % 1.0


def phase_vector(phases) -> np.ndarray:
    phases = np.asarray(phases, dtype=float)
    return np.exp(1j * phases) / math.sqrt(len(phases))


def phase_family(n: int, samples: int = 40, offset: int = 0) -> list[ProductVector]:
    """``psi (x) psi*`` with unimodular ``psi``.

    The first ``3^(n-1)`` members use phases on the cube-root grid with the
    first phase fixed to 0: their ``psi_k conj(psi_l)`` are distinct
    characters of ``Z_3^(n-1)``, so this subfamily spans exactly
    ``n^2 - (n - 1)`` dimensions by construction.  The remaining ``samples``
    members are low-discrepancy phase draws.
    """
    out = []
    for idx in np.ndindex(*([3] * (n - 1))):
        phases = np.concatenate([[0.0], 2 * np.pi * np.asarray(idx) / 3])
        psi = phase_vector(phases)
        out.append(ProductVector(psi, psi.conj(), "phase-grid"))
    pts = kronecker_sequence(samples, n - 1, offset)
    for p in pts:
        psi = phase_vector(np.concatenate([[0.0], 2 * np.pi * p]))
        out.append(ProductVector(psi, psi.conj(), "phase"))
    return out


def two_level_pair(alpha, start: int, mu: float = 0.0) -> ProductVector | None:
    """Zero of a circulant witness supported on levels ``start, start+1``.

    Exists when ``alpha_0 + sqrt(alpha_1 alpha_{n-1}) = 1`` with both
    off-diagonal coefficients positive; then ``psi ~ (g^{1/4}, f^{1/4} e^{i mu})``
    and ``phi ~ (f^{1/4}, g^{1/4} e^{-i mu})`` with ``f = alpha_1``, ``g = alpha_{n-1}``.
    """
    alpha = np.asarray(alpha, dtype=float)
    n = len(alpha)
    f, g = alpha[1], alpha[n - 1]
    if min(f, g) <= 1e-12 or abs(alpha[0] + math.sqrt(f * g) - 1.0) > 1e-12:
        return None
    i, j = start % n, (start + 1) % n
    psi = np.zeros(n, dtype=complex)
    phi = np.zeros(n, dtype=complex)
    psi[i], psi[j] = g ** 0.25, f ** 0.25 * np.exp(1j * mu)
    phi[i], phi[j] = f ** 0.25, g ** 0.25 * np.exp(-1j * mu)
    return ProductVector.normalized(psi, phi, f"pair[{i},{j}]")


def half_angle_roots(theta: float) -> tuple[float, float]:
    """``(sqrt(sin theta/2), sqrt(cos theta/2))`` with sub-ulp values snapped to 0."""
    s, c = math.sin(theta / 2), math.cos(theta / 2)
    s, c = (0.0 if abs(x) < 1e-15 else x for x in (s, c))
    return math.sqrt(s), math.sqrt(c)


def class1_pair_vectors(theta: float) -> list[ProductVector]:
    """The three displayed pairs ``sqrt(sin t/2)|k> + sqrt(cos t/2)|k+1>`` etc., k = 0, 1, 2."""
    s, c = half_angle_roots(theta)
    out = []
    for k in range(3):
        psi = np.zeros(4, dtype=complex)
        phi = np.zeros(4, dtype=complex)
        psi[k], psi[k + 1] = s, c
        phi[k], phi[k + 1] = c, s
        out.append(ProductVector.normalized(psi, phi, f"pair{14 + k}"))
    return out


def class2_family(samples: int = 40, offset: int = 0) -> list[ProductVector]:
    """``psi* (x) psi`` with ``|psi_0| = |psi_2|`` and ``|psi_1| = |psi_3|``."""
    pts = kronecker_sequence(samples, 4, offset)
    out = []
    for p in pts:
        tau = 0.5 * np.pi * (0.05 + 0.9 * p[0])
        mod = np.array([math.cos(tau), math.sin(tau), math.cos(tau), math.sin(tau)])
        phases = np.concatenate([[0.0], 2 * np.pi * p[1:]])
        psi = mod * np.exp(1j * phases)
        out.append(ProductVector.normalized(psi.conj(), psi, "moduli-paired"))
    return out


def generic_conjugate_family(n: int, samples: int = 40, offset: int = 0) -> list[ProductVector]:
    """``phi (x) phi*`` over generic ``phi`` (zeros of the reduction witness)."""
    pts = kronecker_sequence(samples, 2 * n - 1, offset)
    out = []
    for p in pts:
        mod = 0.2 + p[:n]
        phases = np.concatenate([[0.0], 2 * np.pi * p[n:]])
        phi = mod * np.exp(1j * phases)
        out.append(ProductVector.normalized(phi, phi.conj(), "conjugate-pair"))
    return out


def optimized_class1_family(theta: float, samples: int = 40, offset: int = 0) -> list[ProductVector]:
    """Zeros of ``W_I(theta) - 2P`` from the kernel families.

    Second factor ``chi``, first factor the kernel vector of the contraction
    over ``chi``.  Two-level families: ``chi = (sqrt cos t/2, sqrt sin t/2 e^{i f})``
    on levels ``(m, m+1)`` with kernel ``(sqrt sin t/2 e^{i f}, sqrt cos t/2)``.
    Four-level family: moduli ``(t, 1-t, t, 1-t)`` and ``psi (x) psi*``.
    """
    sh, ch = half_angle_roots(theta)
    out = []
    pts = kronecker_sequence(max(4, samples // 4), 1, offset)
    for m in range(4):
        for p in pts:
            f = 2 * np.pi * p[0]
            chi = np.zeros(4, dtype=complex)
            ker = np.zeros(4, dtype=complex)
            chi[m], chi[(m + 1) % 4] = ch, sh * np.exp(1j * f)
            ker[m], ker[(m + 1) % 4] = sh * np.exp(1j * f), ch
            out.append(ProductVector.normalized(ker, chi, f"kernel-2level[{m}]"))
    for p in kronecker_sequence(max(samples, 16), 4, offset):
        t = 0.05 + 0.9 * p[0]
        psi = np.array([math.sqrt(t), math.sqrt(1 - t), math.sqrt(t), math.sqrt(1 - t)],
                       dtype=complex)
        psi[1:] *= np.exp(2j * np.pi * p[1:])
        out.append(ProductVector.normalized(psi, psi.conj(), "kernel-4level"))
    return out


def zero_locus_families(p: FamilyParam, optimized: bool = False,
                        samples: int = 40, offset: int = 0) -> list[ProductVector]:
    """Analytic product vectors annihilating the family witness.

    ``optimized=True`` (class I only) targets ``W_I(theta) - 2P`` instead.
    Sampling is deterministic: Kronecker low-discrepancy points with the given
    ``offset``.
    """
    alpha = family_params(p)
    n = p.n
    if p.family == "classI" and optimized:
        return optimized_class1_family(p.angle, samples, offset)
    if optimized:
        raise ValueError("optimized families exist for class I only")
    if p.family == "classII":
        if abs(p.angle - math.pi) <= 1e-12:
            return generic_conjugate_family(4, samples, offset)
        return class2_family(samples, offset)
    out = phase_family(n, samples, offset)
    if p.family == "classI":
        out += class1_pair_vectors(p.angle)
    mus = 2 * np.pi * kronecker_sequence(max(1, samples // n), 1, offset)[:, 0]
    for start in range(n):
        for mu in mus:
            pv = two_level_pair(alpha, start, float(mu))
            if pv is not None:
                out.append(pv)
    return out


@dataclass(frozen=True)
class SpanReport:
    family_description: str
    vector_count: int
    singular_values: np.ndarray
    rank: int
    rel_tol: float

    @property
    def gap(self) -> float:
        return SpanRank(self.rank, self.singular_values).gap

    def to_dict(self) -> dict:
        gap = self.gap
        return {
            "schema": "witnesslab.span/1",
            "family_description": self.family_description,
            "vector_count": self.vector_count,
            "rank": self.rank,
            "rel_tol": self.rel_tol,
            "singular_values": [float(s) for s in self.singular_values],
            "gap": gap if math.isfinite(gap) else None,
        }


def span_analysis(vectors, rel_tol: float = SPAN_REL_TOL, description: str = "") -> SpanReport:
    vectors = list(vectors)
    if not vectors:
        raise ValueError("span of an empty family")
    sr = svd_rank([pv.vector for pv in vectors], rel_tol)
    return SpanReport(family_description=description, vector_count=len(vectors),
                      singular_values=sr.singular_values, rank=sr.rank, rel_tol=rel_tol)
