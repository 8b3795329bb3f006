"""Kernels, metrics and their transforms on points of C^n.

Points are plain 1-D complex numpy arrays (see :func:`as_point`).  Kernels
and metrics are described by :class:`KernelSpec` and :class:`MetricSpec`,
small immutable trees that evaluate on pairs and round-trip through JSON.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import functions as fs
from .linalg import SymMatrix
from .quadrature import QuadratureConfig, QuadratureError, integrate, integrate_partition

__all__ = [
    "as_point",
    "fbm_kernel",
    "induced_metric",
    "exp_similarity",
    "cauchy_similarity",
    "laplace_identity_check",
    "subordination_power",
    "normalized_euclidean",
    "bounded_transform",
    "power_transform",
    "sphere_similarity",
    "sphere_radius",
    "KernelSpec",
    "MetricSpec",
    "combine",
    "complement",
    "gram",
]

RADICAND_SLACK = 1e-12
SPHERE_TOL = 1e-9


def as_point(x) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D complex coordinate vector."""
    p = np.atleast_1d(np.asarray(x, dtype=complex))
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"a point must be a non-empty 1-D sequence, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x, y = as_point(x), as_point(y)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    return x, y


def _norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def _check_unit_open(name: str, a: float) -> None:
    if not 0.0 < a < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {a!r}")


def fbm_kernel(x, y, a: float, halved: bool = False) -> float:
    """``||x||^{2a} + ||y||^{2a} - ||x-y||^{2a}``, halved on request.

    The halved form is the covariance of fractional Brownian motion with
    Hurst index ``a``.
    """
    _check_unit_open("a", a)
    x, y = _pair(x, y)
    e = 2.0 * a
    val = _norm(x) ** e + _norm(y) ** e - _norm(x - y) ** e
    return 0.5 * val if halved else val


def induced_metric(k, x, y) -> float:
    """``sqrt(k(x,x) + k(y,y) - 2 Re k(x,y))`` for a positive definite kernel ``k``.

    Radicands in ``[-1e-12, 0)`` are treated as round-off and clamped;
    anything more negative means ``k`` is not positive definite there.
    """
    r = float(np.real(k(x, x)) + np.real(k(y, y)) - 2.0 * np.real(k(x, y)))
    if r < 0.0:
        if r < -RADICAND_SLACK:
            raise ValueError(f"negative radicand {r:.3e}: kernel is not positive definite")
        r = 0.0
    return math.sqrt(r)


def _check_distance(d: float) -> float:
    d = float(d)
    if not d >= 0.0:
        raise ValueError(f"distance must be nonnegative, got {d!r}")
    return d


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t!r}")
    return t


def exp_similarity(d: float, t: float = 1.0) -> float:
    return math.exp(-_check_t(t) * _check_distance(d))


def cauchy_similarity(d: float, t: float = 1.0) -> float:
    return 1.0 / (1.0 + _check_t(t) * _check_distance(d))


def laplace_identity_check(d: float, t: float = 1.0, quad: QuadratureConfig | None = None) -> float:
    """Residual of ``1/(1+td) = int_0^inf exp(-u t d) exp(-u) du``.

    The integral is truncated at ``U = log(2/tol)`` so the dropped tail is at
    most ``tol/2``.
    """
    d, t = _check_distance(d), _check_t(t)
    cfg = quad or QuadratureConfig()
    upper = math.log(2.0 / cfg.tol)
    rate = 1.0 + t * d
    value = integrate(lambda u: np.exp(-rate * u), 0.0, upper, cfg)
    return abs(1.0 / rate - value)


def subordination_power(z: float, a: float, quad: QuadratureConfig | None = None) -> float:
    """Evaluate ``z**a`` through ``a/Gamma(1-a) * int_0^inf (1 - e^{-tz}) t^{-a-1} dt``.

    The integral is split at ``t = 1``.  On ``[0, 1]`` the substitution
    ``u = t^{1-a}`` leaves the bounded integrand ``(1 - e^{-tz})/(t(1-a))``.
    On ``[1, inf)`` the substitution ``v = t^{-a}`` maps the tail onto
    ``[0, 1]`` with integrand ``(1 - exp(-z v^{-1/a}))/a``, so no truncation
    is needed.
    """
    _check_unit_open("a", a)
    z = float(z)
    if z < 0.0 or not math.isfinite(z):
        raise ValueError(f"z must be a nonnegative finite number, got {z!r}")
    if z == 0.0:
        return 0.0
    cfg = quad or QuadratureConfig()
    split = 1.0

    def head(u):
        t = u ** (1.0 / (1.0 - a))
        return -np.expm1(-t * z) / t / (1.0 - a)

    def tail(v):
        with np.errstate(over="ignore", divide="ignore"):
            return -np.expm1(-z * v ** (-1.0 / a)) / a

    # both integrands turn over where t*z ~ 1; put edges around that knee so
    # the adaptive rule cannot step over it when z is tiny or huge
    scale = min(1.0, z**a)
    cfg = replace(cfg, tol=cfg.tol * scale)
    knees = [2.0**k for k in range(-6, 7)]
    head_edges = _edges_in_unit((z * s) ** (a - 1.0) for s in knees)
    tail_edges = _edges_in_unit((z * s) ** a for s in knees)
    try:
        near = integrate_partition(head, head_edges, cfg)
    except QuadratureError as exc:
        raise QuadratureError(
            "subordination integral failed near t=0", exc.estimate, split_point=split
        ) from exc
    far = integrate_partition(tail, tail_edges, cfg)
    return a / math.gamma(1.0 - a) * (near + far)


def _edges_in_unit(points) -> list[float]:
    inner = sorted({p for p in points if 0.0 < p < 1.0})
    return [0.0, *inner, 1.0]


def normalized_euclidean(x, y) -> tuple[float, float]:
    """Normalized Euclidean metric ``D`` and its similarity ``S``.

    ``D = ||x-y|| / (||x|| + ||y||)`` and ``S = 1 - D`` computed on the same
    rounding path; ``D(x, x) = 0``.  At ``x = y = 0`` the similarity is
    defined to be 0, not 1.
    """
    x, y = _pair(x, y)
    nx, ny = _norm(x), _norm(y)
    denom = nx + ny
    if denom == 0.0:
        return 0.0, 0.0
    if np.array_equal(x, y):
        return 0.0, 1.0
    dist = _norm(x - y) / denom
    return dist, 1.0 - dist


def bounded_transform(d: float) -> float:
    d = _check_distance(d)
    return d / (1.0 + d)


def power_transform(d: float, a: float) -> float:
    if not 0.0 < a <= 1.0:
        raise ValueError(f"power exponent must lie in (0, 1], got {a!r}")
    return _check_distance(d) ** a


def sphere_radius(a: float) -> float:
    """Radius ``(1/2)^(1/a)`` on which ``||x||^a = 1/2``."""
    return 0.5 ** (1.0 / a)


def sphere_similarity(x, y, a: float) -> float:
    """``1 - ||x-y||^a`` for ``x, y`` on the sphere of radius ``(1/2)^(1/a)``.

    On that sphere this equals the fbm kernel with exponent ``a/2``, which is
    why it is positive definite there.
    """
    _check_unit_open("a", a)
    x, y = _pair(x, y)
    r = sphere_radius(a)
    for p in (x, y):
        rho = _norm(p)
        if abs(rho - r) > SPHERE_TOL:
            raise ValueError(f"point off the sphere: radius {rho!r}, expected {r!r}")
    return 1.0 - _norm(x - y) ** a


# --- specs -----------------------------------------------------------------

_METRIC_KINDS = {
    "euclidean": (),
    "squared_euclidean": (),
    "normalized_euclidean": (),
    "sup": (),
    "weighted_lb": ("b", "weight"),
    "power": ("a",),
    "bounded": (),
    "exp_complement": (),
}
_METRIC_TRANSFORMS = {"power", "bounded", "exp_complement"}

_KERNEL_KINDS = {
    "fbm": ("a", "halved"),
    "exp_of_metric": ("t",),
    "cauchy_of_metric": ("t",),
    "normalized_euclidean_similarity": (),
    "sphere_similarity": ("a",),
    "complement": (),
    "constant": ("value",),
    "sum": (),
    "product": (),
    "scale": ("factor",),
    "exp": (),
}
_KERNELS_OVER_METRIC = {"exp_of_metric", "cauchy_of_metric", "complement"}


def _unknown(kind, table, what):
    raise ValueError(f"unknown {what} kind {kind!r}; expected one of {sorted(table)}")


@dataclass(frozen=True)
class MetricSpec:
    """A named metric, possibly a transform of a base metric.

    ``power`` accepts exponents in (0, 1].  ``squared_euclidean`` is not a
    metric; it is here because it is the canonical conditionally negative
    definite function.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    children: tuple["MetricSpec", ...] = ()

    def __post_init__(self):
        if self.kind not in _METRIC_KINDS:
            _unknown(self.kind, _METRIC_KINDS, "metric")
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "children", tuple(self.children))
        missing = [p for p in _METRIC_KINDS[self.kind] if p not in self.params]
        if missing:
            raise ValueError(f"metric {self.kind!r} is missing parameters {missing}")
        want = 1 if self.kind in _METRIC_TRANSFORMS else 0
        if len(self.children) != want:
            raise ValueError(f"metric {self.kind!r} takes {want} base metric(s)")
        if not all(isinstance(c, MetricSpec) for c in self.children):
            raise TypeError("metric children must be MetricSpec")
        if self.kind == "power" and not 0.0 < float(self.params["a"]) <= 1.0:
            raise ValueError("power exponent must lie in (0, 1]")
        if self.kind == "weighted_lb":
            fs.check_exponent(float(self.params["b"]))
            object.__setattr__(self, "_weight", fs.Weight.from_dict(self.params["weight"]))

    def __call__(self, x, y) -> float:
        k = self.kind
        if k == "euclidean":
            u, v = _pair(x, y)
            return _norm(u - v)
        if k == "squared_euclidean":
            u, v = _pair(x, y)
            return _norm(u - v) ** 2
        if k == "normalized_euclidean":
            return normalized_euclidean(x, y)[0]
        if k == "sup":
            return fs.sup_metric(x, y)
        if k == "weighted_lb":
            return fs.weighted_lb_metric(x, y, float(self.params["b"]), self._weight)
        base = self.children[0](x, y)
        if k == "power":
            return power_transform(base, float(self.params["a"]))
        if k == "bounded":
            return bounded_transform(base)
        return -math.expm1(-_check_distance(base))  # exp_complement

    def describe(self) -> str:
        return _describe(self)

    def to_dict(self) -> dict:
        return _to_dict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "MetricSpec":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ValueError("metric spec must be an object with a 'kind'")
        kids = [cls.from_dict(c) for c in data.get("children", [])]
        return cls(data["kind"], dict(data.get("params", {})), tuple(kids))


@dataclass(frozen=True)
class KernelSpec:
    """A named kernel or a combinator over child kernels.

    ``exp_of_metric``, ``cauchy_of_metric`` and ``complement`` take one
    :class:`MetricSpec` child and produce ``exp(-t d)``, ``1/(1 + t d)`` and
    ``1 - d`` respectively.
    """

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    children: tuple = ()

    def __post_init__(self):
        if self.kind not in _KERNEL_KINDS:
            _unknown(self.kind, _KERNEL_KINDS, "kernel")
        params = dict(self.params)
        if self.kind == "fbm":
            params.setdefault("halved", False)
        if self.kind in _KERNELS_OVER_METRIC - {"complement"}:
            params.setdefault("t", 1.0)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "children", tuple(self.children))
        missing = [p for p in _KERNEL_KINDS[self.kind] if p not in params]
        if missing:
            raise ValueError(f"kernel {self.kind!r} is missing parameters {missing}")

        kids = self.children
        if self.kind in _KERNELS_OVER_METRIC:
            if len(kids) != 1 or not isinstance(kids[0], MetricSpec):
                raise ValueError(f"kernel {self.kind!r} takes exactly one MetricSpec child")
        elif self.kind in ("sum", "product"):
            if len(kids) < 1 or not all(isinstance(c, KernelSpec) for c in kids):
                raise ValueError(f"{self.kind!r} needs one or more KernelSpec children")
        elif self.kind in ("scale", "exp"):
            if len(kids) != 1 or not isinstance(kids[0], KernelSpec):
                raise ValueError(f"{self.kind!r} takes exactly one KernelSpec child")
        elif kids:
            raise ValueError(f"kernel {self.kind!r} takes no children")

        if self.kind in ("fbm", "sphere_similarity"):
            _check_unit_open("a", float(params["a"]))
        if "t" in params:
            _check_t(params["t"])
        if self.kind == "scale" and not float(params["factor"]) > 0.0:
            raise ValueError("scale factor must be positive")

    def __call__(self, x, y) -> float:
        k, p = self.kind, self.params
        if k == "fbm":
            return fbm_kernel(x, y, float(p["a"]), bool(p["halved"]))
        if k == "exp_of_metric":
            return exp_similarity(self.children[0](x, y), float(p["t"]))
        if k == "cauchy_of_metric":
            return cauchy_similarity(self.children[0](x, y), float(p["t"]))
        if k == "complement":
            return 1.0 - self.children[0](x, y)
        if k == "normalized_euclidean_similarity":
            return normalized_euclidean(x, y)[1]
        if k == "sphere_similarity":
            return sphere_similarity(x, y, float(p["a"]))
        if k == "constant":
            return float(p["value"])
        if k == "sum":
            return math.fsum(c(x, y) for c in self.children)
        if k == "product":
            return math.prod(c(x, y) for c in self.children)
        if k == "scale":
            return float(p["factor"]) * self.children[0](x, y)
        return math.exp(self.children[0](x, y))  # exp

    def describe(self) -> str:
        return _describe(self)

    def to_dict(self) -> dict:
        return _to_dict(self)

    @classmethod
    def from_dict(cls, data: Mapping) -> "KernelSpec":
        if not isinstance(data, Mapping) or "kind" not in data:
            raise ValueError("kernel spec must be an object with a 'kind'")
        child_cls = MetricSpec if data["kind"] in _KERNELS_OVER_METRIC else cls
        kids = [child_cls.from_dict(c) for c in data.get("children", [])]
        return cls(data["kind"], dict(data.get("params", {})), tuple(kids))


def _to_dict(spec) -> dict:
    out: dict = {"kind": spec.kind, "params": dict(spec.params)}
    if spec.children:
        out["children"] = [c.to_dict() for c in spec.children]
    return out


def _describe(spec) -> str:
    args = ",".join(
        f"{k}={v}" for k, v in spec.params.items() if not isinstance(v, Mapping)
    )
    head = f"{spec.kind}({args})" if args else spec.kind
    if spec.children:
        head += "[" + ";".join(c.describe() for c in spec.children) + "]"
    return head


def combine(op: str, *specs: KernelSpec, factor: float | None = None) -> KernelSpec:
    """Build ``sum``, ``product``, ``scale`` or ``exp`` of kernel specs."""
    if op == "scale":
        if factor is None or len(specs) != 1:
            raise ValueError("scale needs one spec and a factor")
        return KernelSpec("scale", {"factor": float(factor)}, specs)
    if factor is not None:
        raise ValueError(f"{op!r} takes no factor")
    if op in ("sum", "product", "exp"):
        return KernelSpec(op, {}, specs)
    raise ValueError(f"unknown combinator {op!r}")


def complement(d: MetricSpec) -> KernelSpec:
    """Similarity ``1 - d`` of a normalized metric."""
    return KernelSpec("complement", {}, (d,))


def gram(points: Sequence, k: Callable) -> SymMatrix:
    """Gram matrix ``G[i, j] = k(p_i, p_j)``; only the upper triangle is evaluated."""
    n = len(points)
    if n == 0:
        raise ValueError("need at least one point")
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = float(np.real(k(points[i], points[j])))
    return SymMatrix(g)
