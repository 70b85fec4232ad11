"""Horn logic programs: fixpoint semantics, limits of program sequences,
and ultrametric stability of fixed points.

The package decides least-model membership for programs whose clauses
keep every body term inside the head (syntactically certified by the
guard checks), computes set-theoretic limits of finitely described
program sequences, compares the model of the limit with the limit of the
models at a fixed depth, and probes fixed points of the consequence
operator for Lyapunov-style stability under the dyadic level metric.

Everything is immutable and pure; see the README for the CLI and the
demos directory for narrative walkthroughs.
"""

from .decider import Membership, ProofTree, Verdict, decide_membership, proof_tree
from .engine import (
    FixpointReport,
    ModelCheck,
    Substitution,
    bounded_least_model,
    is_bounded_model,
    match_atom,
    substitute_atom,
    tp_step,
)
from .errors import (
    ArityError,
    GoalClauseError,
    HornLimitsError,
    LimitUndefinedError,
    NonFinitaryError,
    NotAFixedPointError,
    ParseError,
    SchemaError,
    UncertifiedProgramError,
)
from .guard import (
    ClauseVerdict,
    GuardReport,
    check_range_restriction,
    check_term_coverage,
    inspect_program,
    is_certified,
)
from .limits import (
    ComparisonVerdict,
    IndexedEntry,
    LimitVerdict,
    ModelLimitReport,
    PeriodicEntry,
    SequenceSchema,
    SporadicEntry,
    StableEntry,
    clause_limits,
    expand_schema_at,
    instantiate_template,
    load_schema,
    model_limit_comparison,
    schema_from_dict,
    truncated_least_model,
)
from .metric import (
    DyadicDistance,
    StabilityReport,
    Trial,
    distance,
    perturbation_family,
    stability_probe,
)
from .parser import (
    parse_clause,
    parse_ground_atom,
    parse_interpretation,
    parse_program,
    program_to_text,
    interpretation_to_text,
)
from .syntax import (
    Application,
    Atom,
    Constant,
    GroundAtom,
    HornClause,
    Interpretation,
    MetaPower,
    Program,
    Signature,
    Term,
    Variable,
    atom_is_ground,
    atom_sort_key,
    bounded_base,
    canonical_clause,
    count_bounded_base,
    ground_terms,
    level,
    subterms,
    term_height,
    term_is_ground,
    term_subterms,
)

__version__ = "0.1.0"

__all__ = [
    "Application",
    "ArityError",
    "Atom",
    "ClauseVerdict",
    "ComparisonVerdict",
    "Constant",
    "DyadicDistance",
    "FixpointReport",
    "GoalClauseError",
    "GroundAtom",
    "GuardReport",
    "HornClause",
    "HornLimitsError",
    "IndexedEntry",
    "Interpretation",
    "LimitUndefinedError",
    "LimitVerdict",
    "Membership",
    "MetaPower",
    "ModelCheck",
    "ModelLimitReport",
    "NonFinitaryError",
    "NotAFixedPointError",
    "ParseError",
    "PeriodicEntry",
    "Program",
    "ProofTree",
    "SchemaError",
    "SequenceSchema",
    "Signature",
    "SporadicEntry",
    "StabilityReport",
    "StableEntry",
    "Substitution",
    "Term",
    "Trial",
    "UncertifiedProgramError",
    "Variable",
    "Verdict",
    "atom_is_ground",
    "atom_sort_key",
    "bounded_base",
    "bounded_least_model",
    "canonical_clause",
    "check_range_restriction",
    "check_term_coverage",
    "clause_limits",
    "count_bounded_base",
    "decide_membership",
    "distance",
    "expand_schema_at",
    "ground_terms",
    "inspect_program",
    "instantiate_template",
    "interpretation_to_text",
    "is_bounded_model",
    "is_certified",
    "level",
    "load_schema",
    "match_atom",
    "model_limit_comparison",
    "parse_clause",
    "parse_ground_atom",
    "parse_interpretation",
    "parse_program",
    "perturbation_family",
    "program_to_text",
    "proof_tree",
    "schema_from_dict",
    "stability_probe",
    "subterms",
    "substitute_atom",
    "term_height",
    "term_is_ground",
    "term_subterms",
    "tp_step",
    "truncated_least_model",
]
