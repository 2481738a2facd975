"""PE malware ontology tooling: EMBER records to OWL knowledge bases."""

from ._peo import (
    DEFAULT_BASE_IRI,
    ActionMapError,
    IngestError,
    IoError,
    KnowledgeBase,
    PeoError,
    QueryError,
    RdfSyntaxError,
    SamplingError,
    UnknownPrototypeError,
    VocabularyError,
    convert,
    derive,
    export_tbox,
    kfold,
    run_cli,
    select_fraction,
    stats,
    write_fractions,
)

__all__ = [
    "DEFAULT_BASE_IRI",
    "ActionMapError",
    "IngestError",
    "IoError",
    "KnowledgeBase",
    "PeoError",
    "QueryError",
    "RdfSyntaxError",
    "SamplingError",
    "UnknownPrototypeError",
    "VocabularyError",
    "convert",
    "derive",
    "export_tbox",
    "kfold",
    "run_cli",
    "select_fraction",
    "stats",
    "write_fractions",
]
