"""Graph pooling by node decimation: spectral MAXCUT, Kron reduction and sparsification."""

from .cut import (
    Partition,
    brute_force_maxcut,
    cut_fraction,
    lambda_s_max,
    maxcut_upper_bound,
    partition_with_fallback,
    random_partition,
    spectral_partition,
    trevisan_guarantee,
)
from .graph import Graph, laplacian, loopy_laplacian, normalized_adjacency, sym_laplacian
from .kron import adjacency_from_laplacian, kron_reduce, sparsify, spectral_distance
from .pyramid import (
    DecimationSelector,
    Pyramid,
    apply_decimation,
    build_pyramid,
    compose_selectors,
    pool_once,
)

__version__ = "0.1.0"
