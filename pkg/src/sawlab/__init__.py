"""saw-lab: an exact-combinatorics laboratory for self-avoiding walks and
polygons on the integer lattice.

Everything enumeration-derived is exact: walk and polygon counts are big
integers, probabilities are rationals in lowest terms, and comparisons
against irrational power-law thresholds are decided by directed rounding,
never by floating point alone.
"""

from .counting import (
    Constraint,
    CountReport,
    FirstPartTable,
    GrowthReport,
    GuardrailError,
    closing_probabilities,
    count_polygons,
    enumerate_saw,
    first_part_table,
    growth_report,
)
from .exact import ExactProb
from .lattice import (
    CodecError,
    LatticePoint,
    Polygon,
    Walk,
    is_closing,
    is_self_avoiding,
    lex_compare_points,
    ne_vertex,
    parse_walk,
    reflect_for_construction,
    reverse_walk,
    serialize_walk,
)
from .patterns import (
    PatternPair,
    SlotMap,
    canonical_pattern_pair,
    avoidance_equivalence_check,
    empty_polygon,
    local_shell_members,
    scan_patterns,
    slot_partition,
    validate_pattern_pair,
)
from .resampler import (
    ResampleRecord,
    equilibrium_and_pmf_test,
    gaussian_density,
    hypergeometric_pmf,
    middle_index_and_window,
    midpoint_histogram,
    resample_local_shell,
)
from .snake import (
    CharmingProfile,
    SnakeParams,
    bad_index_set_and_select_ell,
    bootstrap_table,
    charming_profile,
    conditional_closing_prob,
    first_part_law_identity_check,
    method_constants,
    reflected_walk_family,
)
from .two_part import (
    Decomposition,
    closing_first_length_histogram,
    compose,
    cyclic_shift,
    decompose,
    polygon_to_path,
)

__version__ = "0.1.0"
