"""Exact truncated models of Volterra operators and free differential Reynolds algebras."""

from .algebra import PolyAlg, ScalarAlg, SeriesAlg, parse_algebra
from .errors import (
    AlgebraMismatch,
    EmbeddingUndefined,
    ExprSyntaxError,
    IndexOverflow,
    MissingOperator,
    NonInvertible,
    OrderError,
    PreconditionViolated,
    ReynoldsError,
    UnboundSymbol,
    UnsupportedNode,
)
from .expr import eval_expr, parse, reynolds_expand, unparse
from .hom import StructureMap, check_homomorphism, evaluate, reynolds_square_expansion
from .identities import (
    Identity,
    OperatedModel,
    compose_intdiff,
    compose_mdiff,
    neumann_reynolds,
    residual,
    twist_check,
)
from .series import Series
from .tensor import (
    TensorSeries,
    classic_shuffle,
    complete_shuffle,
    complete_shuffle_direct,
    deriv_D,
    diamond,
    q_lambda,
    q_lambda_inv,
    reynolds_P,
    star,
)
from .volterra import (
    SeparableKernel,
    apply_D,
    apply_P,
    closed_form_Pn1,
    iterate_P,
    parse_kernel,
    weight,
)

__version__ = "0.1.0"

__all__ = [
    "Series",
    "SeparableKernel",
    "apply_P",
    "apply_D",
    "weight",
    "iterate_P",
    "closed_form_Pn1",
    "parse_kernel",
    "ScalarAlg",
    "PolyAlg",
    "SeriesAlg",
    "parse_algebra",
    "TensorSeries",
    "classic_shuffle",
    "complete_shuffle",
    "complete_shuffle_direct",
    "diamond",
    "reynolds_P",
    "deriv_D",
    "star",
    "q_lambda",
    "q_lambda_inv",
    "OperatedModel",
    "Identity",
    "residual",
    "compose_mdiff",
    "compose_intdiff",
    "twist_check",
    "neumann_reynolds",
    "StructureMap",
    "evaluate",
    "check_homomorphism",
    "reynolds_square_expansion",
    "parse",
    "unparse",
    "eval_expr",
    "reynolds_expand",
    "ReynoldsError",
    "NonInvertible",
    "OrderError",
    "PreconditionViolated",
    "IndexOverflow",
    "AlgebraMismatch",
    "MissingOperator",
    "EmbeddingUndefined",
    "UnboundSymbol",
    "UnsupportedNode",
    "ExprSyntaxError",
]
