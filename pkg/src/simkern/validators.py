"""Finite-sample checks of metric, similarity and definiteness axioms.

Each checker evaluates the pairwise function once on every ordered pair of
the sample, then scores every axiom instance by a *margin*: nonnegative when
the instance holds, negative when it is violated.  Comparisons allow a slack
of ``tol * max(1, |lhs|, |rhs|)``.  The worst instance of a failing axiom is
reported as a witness that :func:`recheck` can re-evaluate from scratch.

Axioms of the form "distinct elements give ..." can only be sampled, never
proven; passing instances of those are labelled ``consistent``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import functions as fs
from .kernels import as_point, gram
from .linalg import DEFAULT_TOL, SymMatrix, eigvalsh, is_cnd

__all__ = [
    "Sample",
    "AxiomVerdict",
    "ValidationReport",
    "sample_points",
    "sample_sphere",
    "sample_functions",
    "check_metric",
    "check_normalized",
    "check_similarity_chen",
    "check_similarity_normalized",
    "check_pd",
    "check_cnd",
    "recheck",
    "AXIOM_TOL",
    "RNG_NAME",
]

AXIOM_TOL = 1e-12
RNG_NAME = "numpy PCG64"

PASS, FAIL, CONSISTENT, SKIPPED = "pass", "fail", "consistent", "skipped"


# --- samples ---------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    elements: tuple
    seed: int | None = None
    domain: str = "given"

    def __len__(self):
        return len(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


def _as_sample(sample) -> Sample:
    if isinstance(sample, Sample):
        return sample
    elems = tuple(sample)
    if not elems:
        raise ValueError("sample is empty")
    return Sample(elems)


def sample_points(n: int = 32, dim: int = 2, seed: int = 0, low: float = -2.0,
                  high: float = 2.0, complex_values: bool = False) -> Sample:
    """``n`` points with coordinates uniform in ``[low, high]`` (real and imaginary parts)."""
    rng = np.random.default_rng(seed)
    re = rng.uniform(low, high, size=(n, dim))
    im = rng.uniform(low, high, size=(n, dim)) if complex_values else np.zeros((n, dim))
    pts = tuple(as_point(r + 1j * i) for r, i in zip(re, im))
    kind = "C" if complex_values else "R"
    return Sample(pts, seed, f"uniform[{low},{high}] in {kind}^{dim}")


def sample_sphere(n: int, dim: int, radius: float, seed: int = 0) -> Sample:
    """``n`` points uniform on the sphere of the given radius in ``R^dim``."""
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, dim))
    g *= radius / np.linalg.norm(g, axis=1, keepdims=True)
    return Sample(tuple(as_point(p) for p in g), seed, f"sphere(r={radius}) in R^{dim}")


def sample_functions(n: int, seed: int = 0, kind: str = "linear", **kw) -> Sample:
    """Random piecewise-linear (``kind='linear'``) or step (``kind='step'``) functions."""
    rng = np.random.default_rng(seed)
    if kind == "linear":
        make = fs.random_linear_function
    elif kind == "step":
        make = fs.random_step_function
    else:
        raise ValueError(f"unknown function kind {kind!r}")
    return Sample(tuple(make(rng, **kw) for _ in range(n)), seed, f"random {kind} functions")


def _same(a, b) -> bool:
    if a is b:
        return True
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return bool(np.array_equal(np.asarray(a), np.asarray(b)))
    return bool(a == b)


# --- reports ---------------------------------------------------------------

@dataclass
class AxiomVerdict:
    name: str
    verdict: str
    margin: float
    witness: dict | None = None

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"name": self.name, "verdict": self.verdict, "margin": self.margin}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ValidationReport:
    subject: str
    check: str
    seed: int | None
    n: int
    domain: str
    tol: float
    axioms: list[AxiomVerdict] = field(default_factory=list)
    spectral: dict | None = None
    cross_check: dict | None = None

    @property
    def passed(self) -> bool:
        return not any(a.failed for a in self.axioms)

    @property
    def failures(self) -> list[AxiomVerdict]:
        return [a for a in self.axioms if a.failed]

    def axiom(self, name: str) -> AxiomVerdict:
        for a in self.axioms:
            if a.name == name:
                return a
        raise KeyError(name)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "subject": self.subject,
            "check": self.check,
            "seed": self.seed,
            "rng": RNG_NAME,
            "n": self.n,
            "domain": self.domain,
            "tol": self.tol,
            "passed": self.passed,
            "axioms": [a.to_dict() for a in self.axioms],
        }
        if self.spectral is not None:
            out["spectral"] = self.spectral
        if self.cross_check is not None:
            out["cross_check"] = self.cross_check
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self) -> str:
        lines = [f"{self.check}: {self.subject}  (n={self.n}, seed={self.seed}, tol={self.tol:g})"]
        for a in self.axioms:
            lines.append(f"  {a.name:<22} {a.verdict:<10} margin={a.margin:.6g}")
            if a.witness is not None:
                lines.append(f"    witness: {json.dumps(a.witness)}")
        if self.spectral:
            lines.append("  spectral: " + ", ".join(f"{k}={v}" for k, v in self.spectral.items()))
        if self.cross_check:
            lines.append("  cross-check: " + json.dumps(self.cross_check))
        lines.append("  verdict: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _subject(fn) -> str:
    if hasattr(fn, "describe"):
        return fn.describe()
    return getattr(fn, "__name__", repr(fn))


def _pairwise(elems: Sequence, fn: Callable) -> np.ndarray:
    n = len(elems)
    m = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m[i, j] = float(np.real(fn(elems[i], elems[j])))
    return m


def _equal_mask(elems: Sequence) -> np.ndarray:
    n = len(elems)
    eq = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            eq[i, j] = eq[j, i] = _same(elems[i], elems[j])
    return eq


# --- scalar margin formulas --------------------------------------------------
# Each takes the pairwise function and the elements named by a witness, and
# returns (margin, scale).  The vectorised code below uses the same
# arithmetic in the same order, so a witness re-evaluates to the same margin.

def _m_symmetry(f, x, y):
    a, b = f(x, y), f(y, x)
    return -abs(a - b), max(1.0, abs(a), abs(b))


def _m_zero_diag(f, x, y):
    a = f(x, y)
    return -abs(a), max(1.0, abs(a))


def _m_nonneg(f, x, y):
    a = f(x, y)
    return a, max(1.0, abs(a))


def _m_triangle(f, x, y, z):
    lhs, rhs = f(x, y), f(x, z) + f(y, z)
    return rhs - lhs, max(1.0, abs(lhs), abs(rhs))


def _m_unit_range(f, x, y):
    a = f(x, y)
    return min(a, 1.0 - a), max(1.0, abs(a))


def _m_self_dominance(f, x, y):
    a, b = f(x, x), f(x, y)
    return a - b, max(1.0, abs(a), abs(b))


def _m_chen_triangle(f, x, y, z):
    lhs = f(x, y) + f(y, z)
    rhs = f(x, z) + f(y, y)
    return rhs - lhs, max(1.0, abs(lhs), abs(rhs))


def _m_chen_equal(f, x, y):
    a, b, c = f(x, x), f(y, y), f(x, y)
    return -max(abs(a - c), abs(b - c)), max(1.0, abs(a), abs(b), abs(c))


def _m_chen_distinct(f, x, y):
    a, b, c = f(x, x), f(y, y), f(x, y)
    return max(abs(a - c), abs(b - c)), max(1.0, abs(a), abs(b), abs(c))


def _m_unit_diag(f, x, y):
    a = f(x, y)
    return -abs(a - 1.0), max(1.0, abs(a))


def _m_below_one(f, x, y):
    a = f(x, y)
    return 1.0 - a, max(1.0, abs(a))


def _m_paris_triangle(f, x, y, z):
    lhs = f(x, z) + f(z, y)
    rhs = f(x, y) + 1.0
    return rhs - lhs, max(1.0, abs(lhs), abs(rhs))


# name -> (scalar margin formula, strict)
# strict axioms fail when margin <= 0; the rest fail when margin < -slack.
_FORMULAS: dict[str, tuple[Callable, bool]] = {
    "symmetry": (_m_symmetry, False),
    "identity": (_m_zero_diag, False),
    "nonnegativity": (_m_nonneg, False),
    "separation": (_m_nonneg, True),
    "triangle": (_m_triangle, False),
    "range": (_m_unit_range, False),
    "self_nonnegative": (_m_nonneg, False),
    "self_dominance": (_m_self_dominance, False),
    "chen_triangle": (_m_chen_triangle, False),
    "equality_implies_equal_values": (_m_chen_equal, False),
    "equal_values_imply_equality": (_m_chen_distinct, True),
    "self_one": (_m_unit_diag, False),
    "one_implies_equality": (_m_below_one, True),
    "similarity_triangle": (_m_paris_triangle, False),
}


def _verdict(name: str, margins: np.ndarray, scales: np.ndarray, index_sets: np.ndarray,
             tol: float, sampled: bool = False) -> AxiomVerdict:
    """Reduce per-instance margins to one verdict.

    ``index_sets`` has one row of element indices per instance, in a fixed
    iteration order; ties resolve to the first instance.
    """
    if margins.size == 0:
        return AxiomVerdict(name, SKIPPED, 0.0)
    strict = _FORMULAS[name][1]
    bad = margins <= 0.0 if strict else margins < -tol * scales
    if not np.any(bad):
        worst = int(np.argmin(margins))
        return AxiomVerdict(name, CONSISTENT if sampled else PASS, float(margins[worst]) + 0.0)
    # worst violation, measured relative to its own slack
    rel = np.where(bad, margins / scales, np.inf)
    worst = int(np.argmin(rel))
    idx = [int(i) for i in index_sets[worst]]
    witness = {"indices": idx, "margin": float(margins[worst])}
    return AxiomVerdict(name, FAIL, float(margins[worst]), witness)


def _pairs(n: int, mask: np.ndarray | None = None, upper: bool = False):
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    keep = np.ones((n, n), dtype=bool) if mask is None else mask.copy()
    if upper:
        keep &= i < j
    return i[keep], j[keep]


def _triples(n: int):
    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    return i.ravel(), j.ravel(), k.ravel()


def _scale2(*arrays):
    out = np.ones_like(arrays[0])
    for a in arrays:
        out = np.maximum(out, np.abs(a))
    return out


def _metric_axioms(m: np.ndarray, eq: np.ndarray, tol: float) -> list[AxiomVerdict]:
    n = m.shape[0]
    out = []
    i, j = _pairs(n, upper=True)
    a, b = m[i, j], m[j, i]
    out.append(_verdict("symmetry", -np.abs(a - b), _scale2(a, b), np.c_[i, j], tol))

    i, j = _pairs(n, eq)
    a = m[i, j]
    out.append(_verdict("identity", -np.abs(a), _scale2(a), np.c_[i, j], tol))

    i, j = _pairs(n)
    a = m[i, j]
    out.append(_verdict("nonnegativity", a, _scale2(a), np.c_[i, j], tol))

    i, j = _pairs(n, ~eq)
    a = m[i, j]
    out.append(_verdict("separation", a, _scale2(a), np.c_[i, j], tol, sampled=True))

    x, y, z = _triples(n)
    lhs, rhs = m[x, y], m[x, z] + m[y, z]
    out.append(_verdict("triangle", rhs - lhs, _scale2(lhs, rhs), np.c_[x, y, z], tol))
    return out


def _range_axiom(m: np.ndarray, tol: float) -> AxiomVerdict:
    i, j = _pairs(m.shape[0])
    a = m[i, j]
    return _verdict("range", np.minimum(a, 1.0 - a), _scale2(a), np.c_[i, j], tol)


def _report(check: str, sample: Sample, fn, tol: float) -> ValidationReport:
    return ValidationReport(_subject(fn), check, sample.seed, len(sample), sample.domain, tol)


def check_metric(sample, d: Callable, tol: float = AXIOM_TOL) -> ValidationReport:
    """Metric axioms: symmetry, zero self-distance, nonnegativity, separation, triangle."""
    sample = _as_sample(sample)
    m = _pairwise(sample.elements, d)
    rep = _report("metric", sample, d, tol)
    rep.axioms = _metric_axioms(m, _equal_mask(sample.elements), tol)
    return rep


def check_normalized(sample, d: Callable, tol: float = AXIOM_TOL) -> ValidationReport:
    """Metric axioms plus values in [0, 1]."""
    sample = _as_sample(sample)
    m = _pairwise(sample.elements, d)
    rep = _report("normalized_metric", sample, d, tol)
    rep.axioms = _metric_axioms(m, _equal_mask(sample.elements), tol) + [_range_axiom(m, tol)]
    return rep


def check_similarity_chen(sample, s: Callable, tol: float = AXIOM_TOL) -> ValidationReport:
    """The five similarity-metric conditions on pairs and triples.

    ``s(x,x) = s(y,y) = s(x,y)`` must hold for equal elements (checked) and
    must fail for distinct ones (sampled, labelled ``consistent``).
    """
    sample = _as_sample(sample)
    m = _pairwise(sample.elements, s)
    eq = _equal_mask(sample.elements)
    n = m.shape[0]
    rep = _report("similarity_chen", sample, s, tol)
    ax = rep.axioms

    i, j = _pairs(n, upper=True)
    a, b = m[i, j], m[j, i]
    ax.append(_verdict("symmetry", -np.abs(a - b), _scale2(a, b), np.c_[i, j], tol))

    i = np.arange(n)
    d = m[i, i]
    ax.append(_verdict("self_nonnegative", d, _scale2(d), np.c_[i, i], tol))

    i, j = _pairs(n)
    a, b = m[i, i], m[i, j]
    ax.append(_verdict("self_dominance", a - b, _scale2(a, b), np.c_[i, j], tol))

    x, y, z = _triples(n)
    lhs = m[x, y] + m[y, z]
    rhs = m[x, z] + m[y, y]
    ax.append(_verdict("chen_triangle", rhs - lhs, _scale2(lhs, rhs), np.c_[x, y, z], tol))

    for name, mask, sign, sampled in (
        ("equality_implies_equal_values", eq, -1.0, False),
        ("equal_values_imply_equality", ~eq, 1.0, True),
    ):
        i, j = _pairs(n, mask)
        a, b, c = m[i, i], m[j, j], m[i, j]
        spread = sign * np.maximum(np.abs(a - c), np.abs(b - c))
        ax.append(_verdict(name, spread, _scale2(a, b, c), np.c_[i, j], tol, sampled))
    return rep


def check_similarity_normalized(sample, s: Callable, tol: float = AXIOM_TOL) -> ValidationReport:
    """Normalized-similarity conditions: range, symmetry, s(x,x)=1, triangle, s=1 iff equal.

    The report's ``cross_check`` records whether ``1 - s`` passes
    :func:`check_normalized` on the same sample; the two verdicts should
    always agree.
    """
    sample = _as_sample(sample)
    m = _pairwise(sample.elements, s)
    eq = _equal_mask(sample.elements)
    n = m.shape[0]
    rep = _report("similarity_normalized", sample, s, tol)
    ax = rep.axioms

    ax.append(_range_axiom(m, tol))
    i, j = _pairs(n, upper=True)
    a, b = m[i, j], m[j, i]
    ax.append(_verdict("symmetry", -np.abs(a - b), _scale2(a, b), np.c_[i, j], tol))

    i, j = _pairs(n, eq)
    a = m[i, j]
    ax.append(_verdict("self_one", -np.abs(a - 1.0), _scale2(a), np.c_[i, j], tol))

    x, y, z = _triples(n)
    lhs = m[x, z] + m[z, y]
    rhs = m[x, y] + 1.0
    ax.append(_verdict("similarity_triangle", rhs - lhs, _scale2(lhs, rhs), np.c_[x, y, z], tol))

    i, j = _pairs(n, ~eq)
    a = m[i, j]
    ax.append(_verdict("one_implies_equality", 1.0 - a, _scale2(a), np.c_[i, j], tol, sampled=True))

    comp = check_normalized(sample, _Complement(s), tol)
    rep.cross_check = {
        "complement_normalized": PASS if comp.passed else FAIL,
        "agrees": comp.passed == rep.passed,
    }
    return rep


class _Complement:
    def __init__(self, s):
        self.s = s

    def __call__(self, x, y):
        return 1.0 - float(np.real(self.s(x, y)))

    def describe(self):
        return f"1 - {_subject(self.s)}"


def _spectral_summary(mat: SymMatrix, tol: float) -> tuple[dict, Any]:
    spec = eigvalsh(mat)
    scale = max(1.0, spec.spectral_radius)
    summary = {
        "min_eig": float(spec.eigenvalues[0]),
        "max_eig": float(spec.eigenvalues[-1]),
        "pos_count": int(np.sum(spec.eigenvalues > tol * scale)),
    }
    return summary, spec


def check_pd(sample, k: Callable, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Gram matrix of ``k`` on the sample must be positive semidefinite."""
    sample = _as_sample(sample)
    g = gram(sample.elements, k)
    rep = _report("positive_definite", sample, k, tol)
    summary, spec = _spectral_summary(g, tol)
    rep.spectral = summary
    lo = summary["min_eig"]
    scale = max(1.0, spec.spectral_radius)
    if lo >= -tol * scale:
        rep.axioms.append(AxiomVerdict("positive_semidefinite", PASS, lo))
    else:
        c = np.asarray(spec.eigenvectors[:, 0])
        witness = {"vector": c.tolist(), "form": g.form(c), "threshold": -tol * scale}
        rep.axioms.append(AxiomVerdict("positive_semidefinite", FAIL, lo, witness))
    return rep


def _positive_pair_witness(m: SymMatrix, spec) -> np.ndarray:
    """Sum-zero vector in the span of the two leading eigenvectors."""
    v1 = np.asarray(spec.eigenvectors[:, -1])
    v2 = np.asarray(spec.eigenvectors[:, -2])
    s1, s2 = v1.sum(), v2.sum()
    c = s2 * v1 - s1 * v2 if abs(s1) + abs(s2) > 0 else v1
    return c / np.linalg.norm(c)


def check_cnd(sample, d: Callable, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Conditional negative definiteness of the distance matrix, plus the
    one-positive-eigenvalue necessary condition."""
    sample = _as_sample(sample)
    raw = _pairwise(sample.elements, d)
    mat = SymMatrix(raw)
    rep = _report("conditionally_negative_definite", sample, d, tol)
    summary, spec = _spectral_summary(mat, tol)
    rep.spectral = summary

    cnd = is_cnd(mat, tol)
    if cnd.passed:
        rep.axioms.append(AxiomVerdict("cnd", PASS, -cnd.max_form))
    else:
        c = cnd.witness
        rep.axioms.append(AxiomVerdict(
            "cnd", FAIL, -cnd.max_form,
            {"vector": c.tolist(), "form": mat.form(c), "sum": float(c.sum())},
        ))

    count = summary["pos_count"]
    if not np.any(mat.entries):
        rep.axioms.append(AxiomVerdict("one_positive_eigenvalue", SKIPPED, 0.0))
    elif count == 1:
        rep.axioms.append(AxiomVerdict("one_positive_eigenvalue", PASS, 0.0))
    elif count >= 2:
        c = _positive_pair_witness(mat, spec)
        rep.axioms.append(AxiomVerdict(
            "one_positive_eigenvalue", FAIL, float(1 - count),
            {"positive_count": count, "vector": c.tolist(), "form": mat.form(c)},
        ))
    else:
        rep.axioms.append(AxiomVerdict(
            "one_positive_eigenvalue", FAIL, 1.0 - count,
            {"positive_count": count, "eigenvalues": spec.eigenvalues.tolist()},
        ))
    return rep


def recheck(verdict: AxiomVerdict, sample, fn: Callable, tol: float | None = None) -> float:
    """Re-evaluate a failing verdict's witness from the raw elements.

    Returns the recomputed margin for pairwise/triple axioms, the quadratic
    form for spectral witnesses, or the positive eigenvalue count.  Raises
    ``AssertionError`` if the witness no longer violates its axiom.
    """
    if verdict.witness is None:
        raise ValueError(f"verdict {verdict.name!r} carries no witness")
    sample = _as_sample(sample)
    w = verdict.witness
    elems = sample.elements
    f = lambda x, y: float(np.real(fn(x, y)))  # noqa: E731

    if verdict.name in _FORMULAS:
        formula, strict = _FORMULAS[verdict.name]
        margin, scale = formula(f, *(elems[i] for i in w["indices"]))
        t = AXIOM_TOL if tol is None else tol
        violated = margin <= 0.0 if strict else margin < -t * scale
        if not violated:
            raise AssertionError(f"{verdict.name} witness {w['indices']} no longer violates "
                                 f"(margin {margin!r})")
        return margin

    t = DEFAULT_TOL if tol is None else tol
    if verdict.name == "positive_semidefinite":
        c = np.asarray(w["vector"])
        form = gram(elems, fn).form(c) / float(c @ c)
        if not form < 0.0:
            raise AssertionError(f"PSD witness has nonnegative form {form!r}")
        return form
    if verdict.name in ("cnd", "one_positive_eigenvalue"):
        mat = SymMatrix(_pairwise(elems, fn))
        if "vector" in w:
            c = np.asarray(w["vector"])
            if abs(c.sum()) > 1e-9 * np.abs(c).sum():
                raise AssertionError("witness vector does not sum to zero")
            form = mat.form(c) / float(c @ c)
            if not form > 0.0:
                raise AssertionError(f"sum-zero witness has nonpositive form {form!r}")
            return form
        spec = eigvalsh(mat)
        count = int(np.sum(spec.eigenvalues > t * max(1.0, spec.spectral_radius)))
        if count == 1:
            raise AssertionError("matrix has exactly one positive eigenvalue")
        return float(count)
    raise ValueError(f"no recheck rule for axiom {verdict.name!r}")
