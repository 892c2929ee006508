"""editsketch: one-way communication sketches for pattern matching with edits.

An encoder compresses an instance (P, T, k) into a compact bit stream; a
decoder reconstructs, from that stream alone, every fragment of T within edit
distance k of P together with the edit information of all optimal alignments.
"""

from .decoder import build_hashed_strings, decode, decode_block, reconstruct_graph
from .encoder import (
    build_alignment_set,
    build_periodic_alignment_set,
    encode,
    encode_block,
    encode_codes,
    find_approximate_period,
    normalize_instance,
)
from .errors import (
    CompositionMismatchError,
    CorruptSketchError,
    EditSketchError,
    EncoderInvariantError,
    ExperimentFailureError,
    InvalidPeriodError,
    InvariantViolationError,
    MalformedEditInfoError,
    ProtocolMisuseError,
    UnsupportedSketchError,
)
from .graph import (
    AlignmentSet,
    BlackIndexing,
    InferenceGraph,
    black_indexing,
    build_graph,
    captures,
    check_succinct_enclosure,
)
from .cover import PeriodCover, build_period_cover, select_encoding_intervals
from .lowerbound import AdversarialInstance, entropy_bound_bits, generate, run_experiment
from .matcher import (
    Occurrence,
    OccurrenceReport,
    find_occurrences,
    occurrence_buckets,
    occurrence_spans,
)
from .strings import (
    Alphabet,
    AlignmentPath,
    Fragment,
    compose_alignments,
    edit_distance,
    edit_info,
    edl,
    edp,
    eds,
    enumerate_optimal_alignments,
    invert_alignment,
    is_primitive,
    period,
    reconstruct_target,
    restrict_alignment,
    self_edit_distance,
    selfed,
)
from .weights import WeightCover, build_weight_cover, verify_cover
from .wire import Sketch, deserialize_sketch, serialize_sketch, size_breakdown

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
