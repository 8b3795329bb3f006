"""Dense real symmetric matrices, a cyclic Jacobi eigensolver, and definiteness tests.

Every Gram matrix and distance matrix in the package passes through
:class:`SymMatrix`, and every verdict about positive or conditionally negative
definiteness is decided here.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "SymMatrix",
    "Spectrum",
    "EigenError",
    "PSDResult",
    "CNDResult",
    "NegativeTypeResult",
    "eigvalsh",
    "is_psd",
    "is_cnd",
    "negative_type_necessary",
    "helmert_basis",
    "read_matrix_csv",
    "write_matrix_csv",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9
ASYMMETRY_LIMIT = 1e-12
MAX_SWEEPS = 60
OFFDIAG_RTOL = 1e-14


class EigenError(RuntimeError):
    """Raised when the Jacobi iteration exhausts its sweep budget."""

    def __init__(self, message: str, residual: float, sweeps: int):
        super().__init__(f"{message} (residual {residual:.3e} after {sweeps} sweeps)")
        self.residual = residual
        self.sweeps = sweeps


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric ``n x n`` matrix.

    The constructor averages ``A`` with its transpose when the largest
    asymmetry is at most ``1e-12``; anything larger is rejected.  The
    measured asymmetry is kept in :attr:`asymmetry`.
    """

    entries: np.ndarray
    asymmetry: float = field(default=0.0, compare=False)

    def __init__(self, entries, asymmetry_limit: float = ASYMMETRY_LIMIT):
        a = np.array(entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        asym = float(np.max(np.abs(a - a.T)))
        if asym > asymmetry_limit:
            raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "asymmetry", asym)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    __hash__ = None

    def map(self, fn) -> "SymMatrix":
        """Apply ``fn`` entrywise (``fn`` must accept arrays)."""
        return SymMatrix(fn(self.entries))

    def form(self, c) -> float:
        """Quadratic form ``c^T A c``."""
        c = np.asarray(c, dtype=float)
        return float(c @ self.entries @ c)

    def tolist(self) -> list[list[float]]:
        return self.entries.tolist()


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, aligned with eigenvalues
    residual: float
    sweeps: int = 0

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


class PSDResult(NamedTuple):
    passed: bool
    min_eigenvalue: float


class CNDResult(NamedTuple):
    passed: bool
    witness: np.ndarray | None
    max_form: float  # largest c^T A c over unit sum-zero c


class NegativeTypeResult(NamedTuple):
    passed: bool
    positive_count: int


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    diff = a[q, q] - a[p, p]
    if abs(apq) < abs(diff) * 1e-36:
        t = apq / diff  # theta would overflow; t ~ 1/(2 theta)
    else:
        theta = diff / (2.0 * apq)
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    cp = a[:, p].copy()
    cq = a[:, q].copy()
    a[:, p] = c * cp - s * cq
    a[:, q] = s * cp + c * cq
    rp = a[p, :].copy()
    rq = a[q, :].copy()
    a[p, :] = c * rp - s * rq
    a[q, :] = s * rp + c * rq
    a[p, q] = a[q, p] = 0.0

    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - s * vq
    v[:, q] = s * vp + c * vq


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def eigvalsh(m: SymMatrix, max_sweeps: int = MAX_SWEEPS) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit the strict upper triangle row by row.  Iteration stops when
    the off-diagonal Frobenius norm falls to ``1e-14 * ||A||_F``.

    Returns
    -------
    Spectrum
        Eigenvalues ascending, orthonormal eigenvectors as columns, and the
        largest residual ``||A v - lambda v||`` measured on the input matrix.

    Raises
    ------
    EigenError
        If the sweep budget runs out before convergence.
    """
    if not isinstance(m, SymMatrix):
        m = SymMatrix(m)
    a0 = m.entries
    n = m.n
    a = a0.copy()
    v = np.eye(n)
    target = OFFDIAG_RTOL * float(np.linalg.norm(a0))

    sweeps = 0
    while _offdiag_norm(a) > target:
        if sweeps >= max_sweeps:
            w = np.diag(a)
            residual = float(np.max(np.linalg.norm(a0 @ v - v * w, axis=0)))
            raise EigenError("Jacobi iteration did not converge", residual, sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _jacobi_rotate(a, v, p, q)
        sweeps += 1

    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    residual = float(np.max(np.linalg.norm(a0 @ v - v * w, axis=0)))
    w.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(eigenvalues=w, eigenvectors=v, residual=residual, sweeps=sweeps)


def _scale(spec: Spectrum) -> float:
    return max(1.0, spec.spectral_radius)


def is_psd(m: SymMatrix, tol: float = DEFAULT_TOL) -> PSDResult:
    """PSD verdict: minimum eigenvalue at least ``-tol * max(1, |lambda|_max)``."""
    spec = eigvalsh(m)
    lo = float(spec.eigenvalues[0])
    return PSDResult(lo >= -tol * _scale(spec), lo)


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal ``n x (n-1)`` basis of the vectors with zero coordinate sum.

    Column ``k`` (0-based) is ``(1, ..., 1, -(k+1), 0, ..., 0) / sqrt((k+1)(k+2))``.
    """
    q = np.zeros((n, max(n - 1, 0)))
    for k in range(1, n):
        q[:k, k - 1] = 1.0
        q[k, k - 1] = -float(k)
        q[:, k - 1] /= math.sqrt(k * (k + 1))
    return q


def is_cnd(m: SymMatrix, tol: float = DEFAULT_TOL) -> CNDResult:
    """Decide conditional negative definiteness.

    ``A`` is CND when ``c^T A c <= 0`` for every ``c`` with ``sum(c) == 0``.
    Restricting to a Helmert basis ``Q`` turns this into PSD-ness of
    ``-Q^T A Q``.  On failure the witness is the unit sum-zero vector that
    maximises the quadratic form.
    """
    if not isinstance(m, SymMatrix):
        m = SymMatrix(m)
    if m.n == 1:
        return CNDResult(True, None, 0.0)
    q = helmert_basis(m.n)
    reduced = SymMatrix(-(q.T @ m.entries @ q), asymmetry_limit=np.inf)
    spec = eigvalsh(reduced)
    lo = float(spec.eigenvalues[0])
    if lo >= -tol * _scale(spec):
        return CNDResult(True, None, -lo)
    c = q @ spec.eigenvectors[:, 0]
    c = c - c.mean()  # scrub rounding off the sum
    c /= np.linalg.norm(c)
    if c[np.flatnonzero(np.abs(c) > 1e-12)[0]] < 0:
        c = -c
    return CNDResult(False, c, m.form(c))


def negative_type_necessary(m: SymMatrix, tol: float = DEFAULT_TOL) -> NegativeTypeResult:
    """Count positive eigenvalues; a distance matrix of negative type has exactly one.

    Passing is necessary, never sufficient, for negative type.
    """
    spec = eigvalsh(m)
    count = int(np.sum(spec.eigenvalues > tol * _scale(spec)))
    return NegativeTypeResult(count == 1, count)


def read_matrix_csv(source) -> SymMatrix:
    """Read a headerless square CSV matrix from a path or text stream."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return read_matrix_csv(fh)
    rows = [[float(x) for x in row] for row in csv.reader(source) if row]
    if not rows:
        raise ValueError("empty matrix file")
    return SymMatrix(rows)


def write_matrix_csv(m: SymMatrix, dest=None) -> str | None:
    """Write ``m`` as CSV with 17 significant digits.

    Returns the text when ``dest`` is None.
    """
    buf = io.StringIO()
    for row in np.asarray(m.entries):
        buf.write(",".join(f"{x:.17g}" for x in row))
        buf.write("\n")
    text = buf.getvalue()
    if dest is None:
        return text
    if isinstance(dest, (str, bytes)) or hasattr(dest, "__fspath__"):
        with open(dest, "w") as fh:
            fh.write(text)
    else:
        dest.write(text)
    return None
