"""Reference extensions: stable-marriage propagation in three styles, a
naive constraint answer-set checker, and the VSIDS branching heuristic."""

from .casp import CaspCheck, CspSpec, LinearConstraint, parse_required_term
from .marriage import (
    MarriageEager,
    MarriageLazy,
    MarriagePost,
    PreferenceTable,
    encode_stable_marriage,
    encoding_lines,
    generate_sm_instance,
)
from .vsids import Vsids

__all__ = [
    "CaspCheck",
    "CspSpec",
    "LinearConstraint",
    "MarriageEager",
    "MarriageLazy",
    "MarriagePost",
    "PreferenceTable",
    "Vsids",
    "encode_stable_marriage",
    "encoding_lines",
    "generate_sm_instance",
    "parse_required_term",
]
