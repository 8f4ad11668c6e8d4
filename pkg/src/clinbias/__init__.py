"""Gender bias auditing toolkit for clinical word embeddings."""

__version__ = "0.1.0"

from .bias import (
    BiasRecord,
    CategoryBiasReport,
    category_report,
    direct_bias,
    score_lexicon,
    term_bias,
)
from .conflict import (
    ConflictVerdict,
    PrevalenceTable,
    classify,
    load_prevalence,
)
from .gender import GenderDirection, GenderPair, gender_direction, load_gender_pairs
from .lexicon import TermLexicon, TemplateSet, load_lexicon, load_templates, render_templates
from .linalg import cosine, mean_pool, pair_center, principal_component, top_component
from .maskprob import GenderMass, MaskResult, gender_mass, mask_report
from .vectors import (
    ContextualVectorRecord,
    VectorStore,
    load_contextual_ndjson,
    load_word2vec_binary,
    load_word2vec_text,
    write_word2vec_binary,
    write_word2vec_text,
)

__all__ = [
    "BiasRecord",
    "CategoryBiasReport",
    "ConflictVerdict",
    "ContextualVectorRecord",
    "GenderDirection",
    "GenderMass",
    "GenderPair",
    "MaskResult",
    "PrevalenceTable",
    "TermLexicon",
    "TemplateSet",
    "VectorStore",
    "category_report",
    "classify",
    "cosine",
    "direct_bias",
    "gender_direction",
    "gender_mass",
    "load_contextual_ndjson",
    "load_gender_pairs",
    "load_lexicon",
    "load_prevalence",
    "load_templates",
    "load_word2vec_binary",
    "load_word2vec_text",
    "mask_report",
    "mean_pool",
    "pair_center",
    "principal_component",
    "render_templates",
    "score_lexicon",
    "term_bias",
    "top_component",
    "write_word2vec_binary",
    "write_word2vec_text",
]
