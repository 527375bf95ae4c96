"""Sampling and counting fixed-size independent sets in bounded-degree graphs."""

__version__ = "0.1.0"

from .errors import InconsistencyError, PreconditionError, ResourceLimitError
from .graph import Graph, from_edge_list, petersen, random_regular, read_edge_list
from .exact import IndependencePolynomial, independence_polynomial, size_distribution
from .thresholds import alpha_c, lambda_c, lambda_star
from .glauber import GlauberSampler, sample_batch, sample_hardcore
from .sample_k import SamplerConfig, sample_k
from .annealing import count_ik
from .reduction import build_instance, find_gadget, verify_reduction
from .ising import count_coefficient, ising_partition_exact, sample_fixed_magnetization

__all__ = [
    "Graph", "from_edge_list", "petersen", "random_regular", "read_edge_list",
    "IndependencePolynomial", "independence_polynomial", "size_distribution",
    "alpha_c", "lambda_c", "lambda_star",
    "GlauberSampler", "sample_batch", "sample_hardcore",
    "SamplerConfig", "sample_k", "count_ik",
    "build_instance", "find_gadget", "verify_reduction",
    "count_coefficient", "ising_partition_exact", "sample_fixed_magnetization",
    "PreconditionError", "ResourceLimitError", "InconsistencyError",
]
