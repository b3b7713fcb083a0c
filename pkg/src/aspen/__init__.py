"""aspen: an answer-set solver with external propagators and heuristics."""

from .errors import (
    BridgeError,
    DisjunctiveHeadUnsupported,
    DomainProductTooLarge,
    EngineInvariantError,
    HandshakeError,
    MalformedConstraint,
    ParseError,
    PluginContractViolation,
    PluginCrashed,
    ProtocolError,
    ProtocolVersionMismatch,
    ResourceLimit,
    ResponseTimeout,
    SolverError,
    SpawnFailed,
    UnknownAtom,
)
from .bridge import (
    PROTOCOL_VERSION,
    PluginSession,
    RemoteHeuristic,
    RemotePropagator,
    spawn_plugin,
)
from .builtins import (
    CaspCheck,
    CspSpec,
    LinearConstraint,
    MarriageEager,
    MarriageLazy,
    MarriagePost,
    PreferenceTable,
    Vsids,
    encode_stable_marriage,
    encoding_lines,
    generate_sm_instance,
    parse_required_term,
)
from .extensions import Directive, Heuristic, Propagator, SelectContext
from .engine import Result, Solver, SolverConfig, Statistics, model_atom_names
from .heuristic import ActivityHeuristic
from .parser import parse_program
from .program import (
    GroundProgram,
    Rule,
    Translation,
    complement,
    completion_nogoods,
    rule_nogood,
)
from .semantics import is_stable_model, least_model, reduct, satisfies

__version__ = "0.1.0"

__all__ = [
    "ActivityHeuristic",
    "BridgeError",
    "CaspCheck",
    "CspSpec",
    "Directive",
    "DisjunctiveHeadUnsupported",
    "DomainProductTooLarge",
    "EngineInvariantError",
    "GroundProgram",
    "HandshakeError",
    "Heuristic",
    "LinearConstraint",
    "MalformedConstraint",
    "MarriageEager",
    "MarriageLazy",
    "MarriagePost",
    "PROTOCOL_VERSION",
    "ParseError",
    "PluginContractViolation",
    "PluginCrashed",
    "PluginSession",
    "PreferenceTable",
    "Propagator",
    "ProtocolError",
    "ProtocolVersionMismatch",
    "RemoteHeuristic",
    "RemotePropagator",
    "ResourceLimit",
    "ResponseTimeout",
    "Result",
    "Rule",
    "SelectContext",
    "Solver",
    "SolverConfig",
    "SolverError",
    "SpawnFailed",
    "Statistics",
    "Translation",
    "UnknownAtom",
    "Vsids",
    "complement",
    "completion_nogoods",
    "encode_stable_marriage",
    "encoding_lines",
    "generate_sm_instance",
    "is_stable_model",
    "least_model",
    "model_atom_names",
    "parse_program",
    "parse_required_term",
    "reduct",
    "rule_nogood",
    "satisfies",
    "spawn_plugin",
]
