"""Numerical verification of similarity metrics and positive definite kernels."""

__version__ = "0.1.0"

from .linalg import SymMatrix, eigvalsh, is_cnd, is_psd, negative_type_necessary  # noqa: E402
from .kernels import KernelSpec, MetricSpec, gram  # noqa: E402
from .functions import PiecewiseFunction, Weight, counterexample_functions, sup_metric  # noqa: E402
from .graphs import Graph, bfs_distances, k23_graph  # noqa: E402
from .counterexample import run_counterexample  # noqa: E402

__all__ = [
    "SymMatrix", "eigvalsh", "is_cnd", "is_psd", "negative_type_necessary",
    "KernelSpec", "MetricSpec", "gram",
    "PiecewiseFunction", "Weight", "counterexample_functions", "sup_metric",
    "Graph", "bfs_distances", "k23_graph",
    "run_counterexample",
]
