"""Circulant Bell-diagonal witnesses and their one-parameter families.

A witness is fixed by a real vector ``alpha`` of length ``n``:

    W = sum_{k,l} A[k, l] |k><k| (x) |l><l|  -  sum_{k != l} |k><l| (x) |k><l|

with the circulant ``A[k, l] = alpha[(l - k) mod n]``, i.e. rows
``(a, b, c, d), (d, a, b, c), ...`` for ``n = 4``.  See
``docs/circulant_orientation.md`` for why this orientation is used.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .bell_basis import band_projector, max_entangled_projector

CONSTRAINT_TOL = 1e-12
FAMILIES = ("classI", "classII", "n3")


class ConstraintViolation(ValueError):
    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


class DescriptorError(ValueError):
    pass


@dataclass(frozen=True)
class ValidationReport:
    sum_ok: bool
    gram_ok: bool
    sum_residual: float
    gram_residual: float

    @property
    def ok(self) -> bool:
        return self.sum_ok and self.gram_ok

    def to_dict(self) -> dict:
        return {"sum_ok": self.sum_ok, "gram_ok": self.gram_ok,
                "sum_residual": self.sum_residual, "gram_residual": self.gram_residual}


@dataclass(frozen=True)
class FamilyParam:
    family: str
    angle: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DescriptorError(f"unknown family {self.family!r}")
        eps = 1e-12
        if self.family == "n3":
            if not (-eps <= self.angle < 2 * math.pi + eps):
                raise ValueError(f"phi={self.angle} outside [0, 2pi)")
        elif not (-eps <= self.angle <= math.pi + eps):
            raise ValueError(f"theta={self.angle} outside [0, pi]")

    @property
    def n(self) -> int:
        return 3 if self.family == "n3" else 4

    def describe(self) -> str:
        key = "phi" if self.family == "n3" else "theta"
        return f"{self.family}:{key}={self.angle!r}"


def circulant(alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    n = len(alpha)
    k = np.arange(n)
    return alpha[(k[None, :] - k[:, None]) % n]


def validate_alpha(alpha, tol: float = CONSTRAINT_TOL) -> ValidationReport:
    alpha = np.asarray(alpha, dtype=float)
    n = len(alpha)
    a = circulant(alpha)
    sum_res = abs(float(alpha.sum()) - (n - 1))
    gram_res = float(np.max(np.abs(a @ a.T - np.eye(n) - (n - 2) * np.ones((n, n)))))
    return ValidationReport(sum_ok=sum_res <= tol, gram_ok=gram_res <= tol,
                            sum_residual=sum_res, gram_residual=gram_res)


def covariant_operator(a_matrix, beta: complex | np.ndarray = -1.0) -> np.ndarray:
    """``sum A_kl |k><k| (x) |l><l| + sum_{k!=l} B_kl |k><l| (x) |k><l|``.

    ``beta`` may be a scalar or a full ``n x n`` matrix (diagonal ignored).
    """
    a_matrix = np.asarray(a_matrix)
    n = a_matrix.shape[0]
    b = np.broadcast_to(np.asarray(beta, dtype=complex), (n, n))
    w = np.zeros((n * n, n * n), dtype=complex)
    for k in range(n):
        for l in range(n):
            w[k * n + l, k * n + l] = a_matrix[k, l]
            if k != l:
                w[k * n + k, l * n + l] = b[k, l]
    return w


def witness_from_alpha(alpha, beta: float = -1.0, check: bool = True) -> np.ndarray:
    if check:
        report = validate_alpha(alpha)
        if not report.ok:
            raise ConstraintViolation(
                f"alpha={list(np.asarray(alpha, float))} violates the witness constraints "
                f"(sum residual {report.sum_residual:.3g}, gram residual {report.gram_residual:.3g})",
                report)
    return covariant_operator(circulant(alpha), beta)


def witness_compact_form(alpha) -> np.ndarray:
    """``(alpha_0 + 1) Pi_0 + sum_k alpha_k Pi_k - n P^+_n`` with band projectors ``Pi_k``."""
    alpha = np.asarray(alpha, dtype=float)
    n = len(alpha)
    w = band_projector(n, 0) * (alpha[0] + 1.0)
    for k in range(1, n):
        w = w + alpha[k] * band_projector(n, k)
    return w - n * max_entangled_projector(n)


def family_params(p: FamilyParam) -> np.ndarray:
    t = p.angle
    if p.family == "classI":
        a, b = 0.5 * (2 - math.sin(t)), 0.5 * (1 + math.cos(t))
        return np.array([a, b, 2 - a, 1 - b])
    if p.family == "classII":
        a, b = 0.5 * (1 + math.cos(t)), 0.5 * (2 - math.sin(t))
        return np.array([a, b, 1 - a, 2 - b])
    # n = 3 ellipse a + b + c = 2, bc = (a - 1)^2
    r3 = math.sqrt(3.0)
    return np.array([2 * (1 + math.cos(t)) / 3,
                     (2 - math.cos(t) - r3 * math.sin(t)) / 3,
                     (2 - math.cos(t) + r3 * math.sin(t)) / 3])


def family_witness(p: FamilyParam) -> np.ndarray:
    return witness_from_alpha(family_params(p))


def class1_witness(theta: float) -> np.ndarray:
    return family_witness(FamilyParam("classI", theta))


def class2_witness(theta: float) -> np.ndarray:
    return family_witness(FamilyParam("classII", theta))


def n3_witness(phi: float) -> np.ndarray:
    return family_witness(FamilyParam("n3", phi))


def class_membership(alpha, tol: float = CONSTRAINT_TOL) -> str:
    alpha = np.asarray(alpha, dtype=float)
    if len(alpha) != 4:
        raise ValueError("class membership is defined for n = 4 only")
    a, b, c, d = alpha
    if abs(a + c - 2) <= tol and abs(b + d - 1) <= tol:
        return "classI"
    if abs(a + c - 1) <= tol and abs(b + d - 2) <= tol:
        return "classII"
    return "neither"


def class4_identities(alpha) -> dict[str, float]:
    """Residuals of the quadratic identities every n = 4 solution satisfies."""
    a, b, c, d = np.asarray(alpha, dtype=float)
    return {
        "sum": abs(a + b + c + d - 3),
        "squares": abs(a * a + b * b + c * c + d * d - 3),
        "ac_bd": abs(a * c + b * d - 1),
        "split_product": abs((a + c) * (b + d) - 2),
    }


def n3_identities(alpha) -> dict[str, float]:
    a, b, c = np.asarray(alpha, dtype=float)
    return {"sum": abs(a + b + c - 2), "ellipse": abs(b * c - (a - 1) ** 2)}


# -- descriptors -------------------------------------------------------------

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>-)?\s*(?P<coef>\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Radians from ``"0.7"``, ``"pi"``, ``"pi/4"``, ``"3pi/4"`` or ``"3*pi/4"``."""
    s = text.strip().lower()
    m = _ANGLE_RE.match(s)
    if m:
        coef = float(m["coef"]) if m["coef"] else 1.0
        den = float(m["den"]) if m["den"] else 1.0
        val = coef * math.pi / den
        return -val if m["sign"] else val
    try:
        return float(s)
    except ValueError:
        raise DescriptorError(f"cannot parse angle {text!r}") from None


@dataclass(frozen=True)
class Descriptor:
    """A parsed witness descriptor as accepted by the CLI."""

    kind: str                      # family name, "identity" or "alpha"
    param: FamilyParam | None = None
    n: int = 4
    alpha: tuple[float, ...] | None = None

    def witness(self) -> np.ndarray:
        if self.kind == "identity":
            return np.eye(self.n * self.n, dtype=complex)
        if self.kind == "alpha":
            return witness_from_alpha(self.alpha)
        return family_witness(self.param)

    def alpha_vector(self) -> np.ndarray | None:
        if self.kind == "alpha":
            return np.asarray(self.alpha)
        if self.param is not None:
            return family_params(self.param)
        return None


def parse_descriptor(text: str) -> Descriptor:
    """Parse ``classI:theta=pi/4``, ``classII:theta=pi``, ``n3:phi=0``,
    ``identity:n=4`` or ``alpha:1,1,1,0``."""
    if ":" not in text:
        raise DescriptorError(f"descriptor {text!r} must look like 'family:key=value'")
    head, _, body = text.partition(":")
    head = head.strip()
    if head == "alpha":
        try:
            alpha = tuple(float(x) for x in body.split(","))
        except ValueError:
            raise DescriptorError(f"bad alpha list in {text!r}") from None
        return Descriptor(kind="alpha", n=len(alpha), alpha=alpha)
    key, eq, value = body.partition("=")
    key = key.strip()
    if not eq:
        raise DescriptorError(f"descriptor {text!r} is missing '='")
    if head == "identity":
        if key != "n":
            raise DescriptorError("identity descriptor takes n=<int>")
        try:
            return Descriptor(kind="identity", n=int(value))
        except ValueError:
            raise DescriptorError(f"bad dimension in {text!r}") from None
    if head not in FAMILIES:
        raise DescriptorError(f"unknown family {head!r}")
    expected = "phi" if head == "n3" else "theta"
    if key != expected:
        raise DescriptorError(f"family {head} takes {expected}=<angle>, got {key!r}")
    try:
        param = FamilyParam(head, parse_angle(value))
    except ValueError as exc:
        raise DescriptorError(str(exc)) from None
    return Descriptor(kind=head, param=param, n=param.n)
