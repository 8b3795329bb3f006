"""Piecewise functions on the real line and the metrics between them.

Two function kinds share one type:

* ``constant``: segment values between consecutive breakpoints, zero outside.
  At a breakpoint the function takes whichever adjacent value has the larger
  modulus, so indicators of closed intervals are represented exactly.
* ``linear``: node values at the breakpoints, linear in between, zero
  outside.  The first and last node values must be 0, which makes the
  function continuous on all of R.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .quadrature import QuadratureConfig, integrate

__all__ = [
    "PiecewiseFunction",
    "Weight",
    "sup_metric",
    "counterexample_functions",
    "weighted_lb_metric",
    "exp_similarity_fn",
    "is_proportional",
    "check_exponent",
    "random_linear_function",
    "random_step_function",
    "load_functions",
    "dump_functions",
]

KINDS = ("constant", "linear")
# u**3 substitution near a zero of f - g keeps |f-g|^b * ds at least C^2
_ZERO_POWER = 3


def _complex_values(values) -> np.ndarray:
    out = []
    for v in values:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"complex value must be a [re, im] pair, got {v!r}")
            out.append(complex(float(v[0]), float(v[1])))
        else:
            out.append(complex(v))
    return np.asarray(out, dtype=complex)


@dataclass(frozen=True, eq=False)
class PiecewiseFunction:
    kind: str
    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        bp = np.array(self.breakpoints, dtype=float)
        vals = self.values if isinstance(self.values, np.ndarray) else _complex_values(self.values)
        vals = np.array(vals, dtype=complex)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("need at least two breakpoints")
        if not np.all(np.isfinite(bp)) or np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be finite and strictly increasing")
        want = bp.size - 1 if self.kind == "constant" else bp.size
        if vals.shape != (want,):
            raise ValueError(f"{self.kind} function with {bp.size} breakpoints needs {want} values")
        if not np.all(np.isfinite(vals)):
            raise ValueError("function values must be finite")
        if self.kind == "linear" and (vals[0] != 0 or vals[-1] != 0):
            raise ValueError("linear functions must start and end at 0 to stay continuous")
        bp.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    # construction helpers
    @classmethod
    def constant(cls, breakpoints, values) -> "PiecewiseFunction":
        return cls("constant", breakpoints, values)

    @classmethod
    def linear(cls, breakpoints, values) -> "PiecewiseFunction":
        return cls("linear", breakpoints, values)

    @property
    def is_continuous(self) -> bool:
        return self.kind == "linear"

    @property
    def is_real(self) -> bool:
        return not np.any(self.values.imag)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def right_limit(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind == "linear":
            return self._interp(s)
        idx = np.searchsorted(self.breakpoints, s, side="right") - 1
        return self._segment_value(idx)

    def left_limit(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind == "linear":
            return self._interp(s)
        idx = np.searchsorted(self.breakpoints, s, side="left") - 1
        return self._segment_value(idx)

    def __call__(self, s) -> np.ndarray | complex:
        s_arr = np.asarray(s, dtype=float)
        if self.kind == "linear":
            out = self._interp(s_arr)
        else:
            lo, hi = self.left_limit(s_arr), self.right_limit(s_arr)
            out = np.where(np.abs(lo) > np.abs(hi), lo, hi)
        return complex(out) if out.ndim == 0 else out

    def _segment_value(self, idx: np.ndarray) -> np.ndarray:
        inside = (idx >= 0) & (idx < self.values.size)
        return np.where(inside, self.values[np.clip(idx, 0, self.values.size - 1)], 0j)

    def _interp(self, s: np.ndarray) -> np.ndarray:
        bp, v = self.breakpoints, self.values
        re = np.interp(s, bp, v.real, left=0.0, right=0.0)
        if not np.any(v.imag):
            return re + 0j
        return re + 1j * np.interp(s, bp, v.imag, left=0.0, right=0.0)

    # arithmetic
    def _merged(self, other: "PiecewiseFunction") -> np.ndarray:
        return np.union1d(self.breakpoints, other.breakpoints)

    def _combine(self, other: "PiecewiseFunction", sign: float) -> "PiecewiseFunction":
        if not isinstance(other, PiecewiseFunction):
            return NotImplemented
        if other.kind != self.kind:
            raise ValueError("cannot combine constant and linear functions")
        bp = self._merged(other)
        if self.kind == "linear":
            vals = self._interp(bp) + sign * other._interp(bp)
        else:
            mids = 0.5 * (bp[:-1] + bp[1:])
            vals = self.right_limit(mids) + sign * other.right_limit(mids)
        return PiecewiseFunction(self.kind, bp, vals)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar):
        if isinstance(scalar, PiecewiseFunction):
            return NotImplemented
        return PiecewiseFunction(self.kind, self.breakpoints, complex(scalar) * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __eq__(self, other):
        if not isinstance(other, PiecewiseFunction):
            return NotImplemented
        return (
            self.kind == other.kind
            and np.array_equal(self.breakpoints, other.breakpoints)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        if self.is_real:
            vals: list = [float(v) for v in self.values.real]
        else:
            vals = [[float(v.real), float(v.imag)] for v in self.values]
        return {"kind": self.kind, "breakpoints": self.breakpoints.tolist(), "values": vals}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PiecewiseFunction":
        try:
            return cls(data["kind"], data["breakpoints"], _complex_values(data["values"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed function object: {exc}") from exc


def load_functions(source) -> list[PiecewiseFunction]:
    """Read a JSON list of function objects (or ``{"functions": [...]}``)."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source) as fh:
            data = json.load(fh)
    else:
        data = json.load(source)
    if isinstance(data, Mapping):
        data = data.get("functions")
    if not isinstance(data, list) or not data:
        raise ValueError("expected a non-empty JSON list of functions")
    return [PiecewiseFunction.from_dict(d) for d in data]


def dump_functions(funcs: Sequence[PiecewiseFunction]) -> str:
    return json.dumps([f.to_dict() for f in funcs], indent=1)


def sup_metric(f: PiecewiseFunction, g: PiecewiseFunction) -> float:
    """Exact ``sup_s |f(s) - g(s)|``.

    On every segment of the merged partition ``f - g`` is affine, so
    ``|f - g|^2`` is a convex quadratic and its supremum is reached at a
    segment end (as a one-sided limit).  Point values at breakpoints are
    included as well.
    """
    bp = f._merged(g)
    right = f.right_limit(bp) - g.right_limit(bp)
    left = f.left_limit(bp) - g.left_limit(bp)
    at = np.asarray(f(bp)) - np.asarray(g(bp))
    return float(max(np.max(np.abs(right)), np.max(np.abs(left)), np.max(np.abs(at))))


def counterexample_functions(literal_x5: bool = False) -> list[PiecewiseFunction]:
    """The five step functions ``x1..x5`` whose sup distances form the matrix Delta.

    ``x5`` is -1 on [0, 1], i.e. ``-x1``; this is the only choice consistent
    with the distances d(x1,x5)=2, d(x2,x5)=1 and with the equality
    ``||x1-x2|| + ||x2-x5|| = ||x1-x5||``.  ``literal_x5=True`` gives the
    variant that is -1 on [2, 3] instead; its sup distances do not form Delta.
    """
    c = PiecewiseFunction.constant
    return [
        c([0, 1], [1]),
        c([2, 3, 6, 7], [1, 0, -1]),
        c([2, 3, 4, 5], [-1, 0, 1]),
        c([4, 5, 6, 7], [-1, 0, 1]),
        c([2, 3], [-1]) if literal_x5 else c([0, 1], [-1]),
    ]


def is_proportional(f: PiecewiseFunction, g: PiecewiseFunction, tol: float = 0.0) -> bool:
    """True when ``f = c g`` or ``g = c f`` for some scalar ``c``.

    A piecewise function is pinned down by its one-sided limits and point
    values on a partition containing all breakpoints, so proportionality is
    a rank-one test on those samples.
    """
    bp = f._merged(g)
    fv = np.concatenate([f.left_limit(bp), f.right_limit(bp), np.atleast_1d(f(bp))])
    gv = np.concatenate([g.left_limit(bp), g.right_limit(bp), np.atleast_1d(g(bp))])
    cross = np.abs(np.outer(fv, gv) - np.outer(gv, fv))
    return bool(np.max(cross) <= tol)


# --- weights and the weighted L^b metric -----------------------------------

@dataclass(frozen=True)
class Weight:
    """Nonnegative weight on the real line.

    gaussian: ``exp(-((t - center)/width)^2)``; indicator: 1 on ``[lo, hi]``;
    table: linear interpolation of nonnegative node values, 0 outside.
    """

    kind: str = "gaussian"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        p = dict(self.params)
        if self.kind == "gaussian":
            p.setdefault("center", 0.0)
            p.setdefault("width", 1.0)
            if not float(p["width"]) > 0:
                raise ValueError("gaussian width must be positive")
        elif self.kind == "indicator":
            if not float(p["lo"]) < float(p["hi"]):
                raise ValueError("indicator needs lo < hi")
        elif self.kind == "table":
            bp = np.asarray(p["breakpoints"], dtype=float)
            vals = np.asarray(p["values"], dtype=float)
            if bp.ndim != 1 or bp.shape != vals.shape or bp.size < 2 or np.any(np.diff(bp) <= 0):
                raise ValueError("table weight needs matching, strictly increasing breakpoints")
            if np.any(vals < 0):
                raise ValueError("weights must be nonnegative")
            p["breakpoints"], p["values"] = bp.tolist(), vals.tolist()
        else:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        object.__setattr__(self, "params", p)

    @classmethod
    def gaussian(cls, center: float = 0.0, width: float = 1.0) -> "Weight":
        return cls("gaussian", {"center": center, "width": width})

    @classmethod
    def indicator(cls, lo: float, hi: float) -> "Weight":
        return cls("indicator", {"lo": lo, "hi": hi})

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "gaussian":
            return np.exp(-(((t - p["center"]) / p["width"]) ** 2))
        if self.kind == "indicator":
            return ((t >= p["lo"]) & (t <= p["hi"])).astype(float)
        return np.interp(t, p["breakpoints"], p["values"], left=0.0, right=0.0)

    @property
    def support(self) -> tuple[float, float]:
        p = self.params
        if self.kind == "gaussian":
            return -math.inf, math.inf
        if self.kind == "indicator":
            return float(p["lo"]), float(p["hi"])
        return p["breakpoints"][0], p["breakpoints"][-1]

    @property
    def breakpoints(self) -> list[float]:
        if self.kind == "gaussian":
            return []
        if self.kind == "indicator":
            return [float(self.params["lo"]), float(self.params["hi"])]
        return list(self.params["breakpoints"])

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, data) -> "Weight":
        if isinstance(data, Weight):
            return data
        data = dict(data)
        kind = data.pop("kind", "gaussian")
        return cls(kind, data)


def check_exponent(b: float) -> float:
    if not 0.0 < b <= 1.0:
        raise ValueError(f"exponent b must lie in (0, 1], got {b!r}")
    return b


def _panel_integral(h0: complex, h1: complex, lo: float, hi: float, b: float,
                    w: Weight, cfg: QuadratureConfig) -> float:
    """Integral of ``|h|^b w`` over ``[lo, hi]`` where ``h`` is affine from h0 to h1.

    ``|h|`` is monotone on the panel and vanishes, if at all, only at an end.
    """
    m0, m1 = abs(h0), abs(h1)
    if m0 == 0.0 and m1 == 0.0:
        return 0.0
    width = hi - lo
    collinear = abs((h0.conjugate() * h1).imag) <= 1e-15 * m0 * m1
    if w.kind == "indicator" and collinear:
        # |h| is affine here and w == 1 on the panel: closed form
        if m0 == m1:
            return width * m0**b
        return width * (m1 ** (b + 1) - m0 ** (b + 1)) / ((b + 1) * (m1 - m0))

    dh = h1 - h0
    if m0 == 0.0 or m1 == 0.0:
        # put the zero at u = 0 and stretch s = zero + (other - zero) u^p
        zero, far = (lo, hi) if m0 == 0.0 else (hi, lo)
        span = far - zero
        p = _ZERO_POWER

        def integrand(u):
            s = zero + span * u**p
            hv = h0 + dh * ((s - lo) / width)
            return np.abs(hv) ** b * w(s) * (abs(span) * p * u ** (p - 1))

        return integrate(integrand, 0.0, 1.0, cfg)

    def integrand(s):
        hv = h0 + dh * ((s - lo) / width)
        return np.abs(hv) ** b * w(s)

    return integrate(integrand, lo, hi, cfg)


def weighted_lb_metric(
    f: PiecewiseFunction,
    g: PiecewiseFunction,
    b: float,
    w: Weight | None = None,
    quad: QuadratureConfig | None = None,
    allow_discontinuous: bool = False,
) -> float:
    """``int |f(t) - g(t)|^b w(t) dt`` for ``b`` in (0, 1].

    The merged partition of ``f``, ``g`` and the weight is refined at the
    point of each panel where ``|f - g|`` is smallest, so every panel sees a
    monotone modulus.  Panels where ``f - g`` hits zero get a polynomial
    change of variables that removes the ``|s - s0|^b`` cusp.
    """
    check_exponent(b)
    w = w or Weight.gaussian()
    cfg = quad or QuadratureConfig()
    if not allow_discontinuous and not (f.is_continuous and g.is_continuous):
        raise ValueError("the weighted L^b metric needs continuous (linear) functions; "
                         "pass allow_discontinuous=True to override")
    if f.kind != g.kind:
        raise ValueError("cannot mix constant and linear functions")
    h = f - g
    lo, hi = h.support
    wlo, whi = w.support
    lo, hi = max(lo, wlo), min(hi, whi)
    if lo >= hi:
        return 0.0
    edges = np.union1d(h.breakpoints, w.breakpoints)
    edges = edges[(edges >= lo) & (edges <= hi)]
    edges = np.union1d(edges, [lo, hi])

    panels: list[tuple[complex, complex, float, float]] = []
    for a, c in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (a + c)
        if h.kind == "constant":
            v = complex(h.right_limit(mid))
            h0 = h1 = v
        else:
            h0, h1 = complex(h.right_limit(a)), complex(h.left_limit(c))
        dh = h1 - h0
        denom = abs(dh) ** 2
        tau = -(h0.conjugate() * dh).real / denom if denom > 0 else -1.0
        if 0.0 < tau < 1.0:
            s = a + tau * (c - a)
            hs = h0 + tau * dh
            if abs(hs) <= 1e-14 * max(abs(h0), abs(h1)):
                hs = 0j
            panels += [(h0, hs, a, s), (hs, h1, s, c)]
        else:
            panels.append((h0, h1, a, c))

    live = [pn for pn in panels if pn[0] != 0 or pn[1] != 0]
    if not live:
        return 0.0
    sub = QuadratureConfig(tol=cfg.tol / len(live), order=cfg.order, max_intervals=cfg.max_intervals)
    return math.fsum(_panel_integral(h0, h1, a, c, b, w, sub) for h0, h1, a, c in live)


def exp_similarity_fn(f, g, b: float, w: Weight | None = None,
                      quad: QuadratureConfig | None = None, **kw) -> float:
    return math.exp(-weighted_lb_metric(f, g, b, w, quad, **kw))


def random_linear_function(rng: np.random.Generator, nodes: int = 6, span=(-3.0, 3.0),
                           amplitude: float = 2.0, complex_values: bool = False) -> PiecewiseFunction:
    """Continuous piecewise-linear function with ``nodes`` interior nodes."""
    lo, hi = span
    inner = np.sort(rng.uniform(lo, hi, size=nodes))
    bp = np.concatenate([[lo - 0.5], inner, [hi + 0.5]])
    vals = rng.uniform(-amplitude, amplitude, size=nodes)
    if complex_values:
        vals = vals + 1j * rng.uniform(-amplitude, amplitude, size=nodes)
    return PiecewiseFunction.linear(bp, np.concatenate([[0], vals, [0]]))


def random_step_function(rng: np.random.Generator, segments: int = 4, span=(0.0, 8.0),
                         amplitude: float = 1.0) -> PiecewiseFunction:
    bp = np.sort(rng.choice(np.linspace(*span, 33), size=segments + 1, replace=False))
    return PiecewiseFunction.constant(bp, rng.uniform(-amplitude, amplitude, size=segments))
