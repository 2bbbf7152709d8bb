"""Absolute orders on reflection groups: enumeration, posets and exact flow certificates."""
from .coxeter import CoxeterGroup, build_coxeter
from .errors import (
    AbsOrderError, AutomorphismError, ConsistencyError, DomainError, NotSupportedError, ParameterError,
    ResourceError, SchemaError, ShapeError, StateError, StructuralError,
)
from .flow import (
    CutWitness, FlowCertificate, layer_flow, lift_flow_from_quotient, normalized_flow, verify_flow,
)
from .gmpn import GmpnElement, GmpnGroup, make_group
from .orders import (
    OrderKind, build_codim_order, build_order, build_prefix_order, claw_embedding,
    claw_partition_search, orders_agree,
)
from .poset import (
    RankConflict, RankedPoset, RankPolynomial, factor_exponents, from_covers, is_log_concave,
    is_ranked, product, quotient, rank_polynomial,
)
from .sperner import k_family_size, max_antichain, sperner_report

__version__ = "0.1.0"
