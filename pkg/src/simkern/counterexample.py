"""A normalized metric whose similarity ``exp(-d)`` is not positive definite.

The ambient metric is the sup distance between bounded step functions.
Five step functions ``x1..x5`` have the integer distance matrix ``Delta``,
which has two positive eigenvalues and so is not of negative type.  The
similarity ``exp(-d)`` is then not positive definite on the function space.
Because ``d(t x, t y) = t d(x, y)``, the scaled family ``t x1..t x5`` has
Gram matrix ``exp(-t Delta)``, which turns indefinite for small ``t``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .functions import is_proportional, counterexample_functions, sup_metric
from .graphs import bfs_distances, k23_graph
from .linalg import DEFAULT_TOL, SymMatrix, eigvalsh, is_cnd, negative_type_necessary

__all__ = [
    "DELTA_EXPECTED",
    "DEFAULT_SCALE",
    "NEGATIVE_EIG_BOUND",
    "Component",
    "CounterexampleReport",
    "sup_distance_matrix",
    "similarity_min_eigenvalue",
    "psd_threshold",
    "run_counterexample",
]

# reference values the pipeline is compared against, never used to compute
DELTA_EXPECTED = (
    (0, 1, 1, 1, 2),
    (1, 0, 2, 2, 1),
    (1, 2, 0, 2, 1),
    (1, 2, 2, 0, 1),
    (2, 1, 1, 1, 0),
)
EXPECTED_EIGENVALUES = (-2.0, -2.0, -2.0, 3.0 - math.sqrt(7.0), 3.0 + math.sqrt(7.0))
LISTED_AE_HOPS = 1  # hop count listed for the pair (A, E) alongside the graph
EIG_ATOL = 1e-9
NEGATIVE_EIG_BOUND = -1e-8
DEFAULT_SCALE = 0.2


def sup_distance_matrix(funcs) -> SymMatrix:
    n = len(funcs)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = sup_metric(funcs[i], funcs[j])
    return SymMatrix(m)


def similarity_min_eigenvalue(t: float, literal_x5: bool = False) -> float:
    """Smallest eigenvalue of the Gram matrix of ``exp(-d)`` on ``t x1, ..., t x5``."""
    scaled = [t * f for f in counterexample_functions(literal_x5)]
    g = sup_distance_matrix(scaled).map(lambda d: np.exp(-d))
    return float(eigvalsh(g).eigenvalues[0])


def psd_threshold(lo: float = 1e-6, hi: float = 1.0, iters: int = 60) -> float | None:
    """Scale ``t`` at which ``exp(-t Delta)`` turns positive semidefinite, by bisection.

    Returns None when the sign does not change on ``[lo, hi]``.
    """
    flo, fhi = similarity_min_eigenvalue(lo), similarity_min_eigenvalue(hi)
    if (flo < 0) == (fhi < 0):
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (similarity_min_eigenvalue(mid) < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class Component:
    key: str
    name: str
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"key": self.key, "name": self.name, "passed": self.passed, **self.detail}
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass
class CounterexampleReport:
    scale: float
    tol: float
    delta: SymMatrix
    components: list[Component]
    literal_x5: bool = False

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.components)

    def component(self, key: str) -> Component:
        for c in self.components:
            if c.key == key:
                return c
        raise KeyError(key)

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "tol": self.tol,
            "literal_x5": self.literal_x5,
            "delta": self.delta.tolist(),
            "components": [c.to_dict() for c in self.components],
            "passed": self.passed,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_text(self) -> str:
        lines = ["Delta (sup distances of x1..x5):"]
        for row in self.delta.entries:
            lines.append("  " + " ".join(f"{v:3g}" for v in row))
        for c in self.components:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"[{mark}] ({c.key}) {c.name}")
            for k, v in c.detail.items():
                if isinstance(v, float):
                    v = f"{v:.12g}"
                elif isinstance(v, list) and v and isinstance(v[0], float):
                    v = "[" + ", ".join(f"{x:.12g}" for x in v) + "]"
                lines.append(f"         {k}: {v}")
            for note in c.notes:
                lines.append(f"         note: {note}")
        lines.append("verdict: " + ("reproduced" if self.passed else "NOT reproduced"))
        return "\n".join(lines)


def run_counterexample(scale: float = DEFAULT_SCALE, tol: float = DEFAULT_TOL,
                       literal_x5: bool = False) -> CounterexampleReport:
    """Rebuild the counterexample end to end and grade every step.

    Mismatches are recorded as failed components; nothing here raises on a
    mathematical disagreement.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    funcs = counterexample_functions(literal_x5)
    delta = sup_distance_matrix(funcs)
    comps: list[Component] = []

    expected = np.array(DELTA_EXPECTED, dtype=float)
    comps.append(Component(
        "a", "sup distances of x1..x5 equal the expected matrix",
        bool(np.array_equal(delta.entries, expected)),
        {"mismatches": int(np.sum(delta.entries != expected))},
    ))

    spec = eigvalsh(delta)
    eigs = [float(x) for x in spec.eigenvalues]
    err = float(np.max(np.abs(spec.eigenvalues - np.array(EXPECTED_EIGENVALUES))))
    comps.append(Component(
        "b", "eigenvalues are -2 (x3), 3-sqrt(7), 3+sqrt(7)", err <= EIG_ATOL,
        {"eigenvalues": eigs, "max_abs_error": err, "residual": spec.residual},
    ))

    nec = negative_type_necessary(delta, tol)
    comps.append(Component(
        "c", "two positive eigenvalues, so the negative-type necessary condition fails",
        nec.positive_count == 2 and not nec.passed,
        {"positive_count": nec.positive_count},
    ))

    cnd = is_cnd(delta, tol)
    witness_ok = cnd.witness is not None and abs(float(cnd.witness.sum())) < 1e-12 \
        and delta.form(cnd.witness) > tol
    comps.append(Component(
        "d", "Delta is not conditionally negative definite", (not cnd.passed) and witness_ok,
        {"witness": None if cnd.witness is None else cnd.witness.tolist(),
         "witness_form": cnd.max_form},
    ))

    lo = similarity_min_eigenvalue(scale, literal_x5)
    thr = psd_threshold() if not literal_x5 else None
    comp_e = Component(
        "e", f"exp(-d) on the scaled functions {scale:g}*x_i has a negative eigenvalue",
        lo <= NEGATIVE_EIG_BOUND,
        {"scale": scale, "min_eigenvalue": lo, "bound": NEGATIVE_EIG_BOUND,
         "min_eigenvalue_unscaled": similarity_min_eigenvalue(1.0, literal_x5),
         "psd_threshold": thr},
    )
    if thr is not None:
        comp_e.notes.append(
            f"exp(-t Delta) is indefinite only for t below about {thr:.6g}; "
            "larger scales give a PSD Gram on these five functions"
        )
    comps.append(comp_e)

    graph = bfs_distances(k23_graph())
    ae = int(graph.entries[0, 4])
    comp_f = Component(
        "f", "hop distances of K_{2,3} (order A..E) equal Delta",
        graph == delta, {"graph_distances": graph.tolist(), "d_AE": ae},
    )
    if ae != LISTED_AE_HOPS:
        comp_f.notes.append(
            f"the original hop listing gives d(A,E)={LISTED_AE_HOPS}; the graph whose "
            f"distances equal Delta has d(A,E)={ae}"
        )
    comps.append(comp_f)

    x1, x2, x5 = funcs[0], funcs[1], funcs[4]
    d12, d25, d15 = sup_metric(x1, x2), sup_metric(x2, x5), sup_metric(x1, x5)
    collinear = is_proportional(x1 - x2, x2 - x5)
    comps.append(Component(
        "g", "||x1-x2|| + ||x2-x5|| = ||x1-x5|| with x1-x2 not a multiple of x2-x5",
        (d12 + d25 == d15) and not collinear,
        {"d12": d12, "d25": d25, "d15": d15, "proportional": collinear},
    ))

    comps.append(Component(
        "h", "similarity 1 - D = exp(-d) is not positive definite on the function space",
        all(c.passed for c in comps if c.key in "cde"),
        {"follows_from": ["c", "d", "e"]},
    ))
    return CounterexampleReport(scale, tol, delta, comps, literal_x5)
