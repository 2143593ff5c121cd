"""Skeleton reconstruction of unidirectional triangle-free linear dynamic
networks from their output power spectral density."""
from .graphs import (
    DirectedGraph,
    UndirectedGraph,
    enumerate_triangles,
    markov_blanket,
    moral_graph,
    skeleton,
)
from .lti import (
    CovarianceSequence,
    FrequencyGrid,
    LaurentPolynomial,
    RationalTransfer,
    SpectralDensity,
    covariances_from_psd,
    eval_on_grid,
    matrix_inverse_field,
)
from .model import Ldim, NoiseChannel, causal_graph, psd, simulate, validate_utf
from .reconstruct import (
    ReconstructionConfig,
    ReconstructionReport,
    Status,
    certify_against_truth,
    md_edge_removable,
    moral_bound,
    utf_sr,
)
from .wiener import (
    RegressorSpec,
    causal_wiener,
    cwsep,
    noncausal_wiener,
    strictly_causal_component,
    wsep,
)

__version__ = "0.1.0"
