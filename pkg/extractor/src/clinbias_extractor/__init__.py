"""Masked-LM extraction of contextual vectors and mask-fill distributions."""

__version__ = "0.1.0"

from .extract import (
    ExtractionJob,
    TermSentence,
    extract_gender_sentence_vectors,
    extract_term_vectors,
    mask_topk,
)
from .model import MaskedLanguageEncoder

__all__ = [
    "ExtractionJob",
    "MaskedLanguageEncoder",
    "TermSentence",
    "extract_gender_sentence_vectors",
    "extract_term_vectors",
    "mask_topk",
]
