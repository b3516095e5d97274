"""Labeled Gromov-Hausdorff distances on finite labeled metric spaces."""

from .approximation import (
    ApproximationWitness,
    approximation_implies_lgh,
    build_approximation_witness,
    check_approximation,
    net_convergence_check,
)
from .correspondences import (
    AdmissiblePseudometric,
    Correspondence,
    appendix_sandwich_check,
    check_admissible,
    distortion,
    induced_pseudometric,
    lgh_exact,
    lgh_lower_bound,
    lgh_upper_bound_heuristic,
    pseudometric_to_correspondence,
)
from .errors import (
    LghError,
    MalformedDataError,
    ParameterError,
    PreconditionError,
    QuotientError,
    SizeCapError,
    SpaceParseError,
    SpaceValidationError,
)
from .fileformat import load_manifest, load_space, parse_space, serialize_space, write_space
from .generators import (
    gen_dyadic_chain,
    gen_graph_space,
    gen_projection_family,
    gen_random_space,
    scale_space,
)
from .gluing import Chain, chain_admissible, chain_metric, glue_disjoint_union, limit_proxy
from .isometry import (
    PointMap,
    check_eps_l_isometry,
    convergence_witness,
    correspondence_to_map,
    find_l_isometry,
    map_to_correspondence,
)
from .precompact import Collection, cauchy_subsequence_probe, equicontinuity_modulus, utb_report
from .spaces import (
    DEFAULT_TOL,
    LabeledMetricSpace,
    LabelSet,
    PseudoSpace,
    covering_number,
    diameter,
    greedy_labeled_net,
    quotient_pseudometric,
    validate_space,
)
from .traveltime import (
    TravelTimeData,
    embedding_distortion,
    reconstruct_from_data,
    stability_experiment,
    travel_time_data,
)

__version__ = "0.1.0"
