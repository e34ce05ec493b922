"""Phrase-based monolingual translation for text simplification and style transfer."""

from ._core import (
    AlignConfig,
    ConfigError,
    DataError,
    LanguageModel,
    MissingArtifactError,
    PhraseTable,
    PipelineConfig,
    Weights,
    align,
    bleu,
    decode,
    decode_split,
    edit_distance,
    eval_split,
    extract_phrases,
    lm,
    meteor,
    meteor_corpus,
    phrases,
    porter_stem,
    prepare,
    report,
    reverse_direction,
    scrub,
    sweep,
    tokenize,
    train_alignment,
    viterbi_align,
)

__all__ = [name for name in dir() if not name.startswith("_")]
