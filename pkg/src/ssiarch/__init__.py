"""Actor-oriented NFR analysis toolkit for DI/SSI architectures."""

__version__ = "0.1.0"

from ssiarch.findings import Finding, Severity, SourceSpan
from ssiarch.kb import (
    ActorKind,
    DependencyRelation,
    KnowledgeBase,
    NfrEntry,
    NfrKey,
    OwnershipMap,
    PatternEntry,
    PatternSource,
    Provenance,
    ResponsibilityLevel,
    ResponsibilityMatrix,
    builtin_kb,
)

__all__ = [
    "ActorKind",
    "DependencyRelation",
    "Finding",
    "KnowledgeBase",
    "NfrEntry",
    "NfrKey",
    "OwnershipMap",
    "PatternEntry",
    "PatternSource",
    "Provenance",
    "ResponsibilityLevel",
    "ResponsibilityMatrix",
    "Severity",
    "SourceSpan",
    "builtin_kb",
]
