"""Toolkit for syntactic analysis of child-adult interaction treebanks:
CoNLL-U handling, parser evaluation, utterance-level construction tagging,
annotation linting, developmental case studies, and a trainable baseline
dependency parser and POS tagger."""

from .conllu import (
    Diagnostic,
    MWTRange,
    Sentence,
    SpeakerRole,
    Strictness,
    Token,
    Treebank,
    normalize,
    read_conllu,
    validate,
    write_conllu,
)
from .cxntag import (
    Backend,
    CxnLabel,
    FormulaicLexicon,
    TaggedUtterance,
    strip_tag_question,
    tag_pos,
    tag_treebank,
    tag_ud,
)
from .evaluation import (
    EvalReport,
    aggregate,
    align,
    confusion,
    evaluate_treebanks,
    paired_ttest,
    per_label_error_rates,
    score_sentence,
    tag_accuracy,
)

__version__ = "0.1.0"
