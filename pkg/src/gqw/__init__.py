"""gqw: graded invariants of finite directed graphs.

Core objects: finite multigraphs with their cycle and sink combinatorics,
talented monoid elements with the integer shift action, hereditary
saturated ideal lattices and quotient classification, covering windows of
double graphs with lifted Cuntz-Krieger relations, graded dimension
distributions solving the flow equation, and exact rational matrix
representations.
"""

__version__ = "0.1.0"

from .graphs import (
    CapExceededError,
    CycleClass,
    Edge,
    Graph,
    GraphError,
    Path,
    PreconditionError,
    csp,
    csp_gt1,
    enumerate_cycles,
    find_cycle_reaching,
    is_acyclic,
    maximal_cycle_vertices,
    maximal_cycles,
    maximal_sinks,
    tree,
    vertex_classes,
)
from .monoids import (
    CandidateResult,
    EqResult,
    GraphMonoidElement,
    HSatLattice,
    HSatSet,
    QuotientKind,
    QuotientShape,
    Signature,
    TalentedElement,
    candidate_check,
    classify_quotient,
    enumerate_hsat,
    eq_bounded,
    expand,
    expand_graph_monoid,
    graph_monoid_eq_bounded,
    ideal_membership,
    quotient_graph,
    remove_sources,
    saturate,
    signature,
    talmax,
)
from .covering import (
    CKRelationSet,
    CoveringWindow,
    DoubleGraph,
    ck_relations,
    covering_window,
    double_graph,
    lift_path,
    lift_relations,
    lift_window,
    shift_window,
)
from .distributions import (
    DimDistribution,
    DistributionError,
    LevelMap,
    LevelRule,
    RepDatum,
    SinkMap,
    check_eventually_trivial,
    classify_findim,
    classify_graded_findim,
    construct_distribution,
    distribution_space,
    extract_datum,
    periodic_value,
    shift_distribution,
    transfer,
    transfer_datum,
    transfer_variant,
    validate_flow,
)
from .matreps import (
    FiniteRep,
    Matrix,
    MatrixError,
    dim_vector,
    rep_to_module_action,
    shape_check,
    validate_ck,
)
from .formats import (
    GraphDocument,
    ParseError,
    parse_datum,
    parse_distribution,
    parse_graph,
    parse_rep,
    serialize_datum,
    serialize_distribution,
    serialize_graph,
    serialize_rep,
)
