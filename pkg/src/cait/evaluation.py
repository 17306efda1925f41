"""Attachment scoring, tag accuracy, slices, significance tests and
label-level error analysis for gold/predicted treebank pairs.

Scoring follows shared-task practice: punctuation tokens are scored,
multiword ranges and empty nodes are not. Sentence length for binning
excludes punctuation. All aggregates accumulate integer counts before any
division, so results are order-independent and bitwise deterministic.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .conllu import Sentence, SpeakerRole, Token, Treebank

__all__ = [
    "AlignmentError",
    "SentencePairScore",
    "SliceScore",
    "EvalReport",
    "TTestResult",
    "ConfusionMatrix",
    "DeltaMatrix",
    "Normalization",
    "ConfusionScope",
    "ErrorScope",
    "LENGTH_BINS",
    "length_bin",
    "align",
    "score_sentence",
    "aggregate",
    "evaluate_treebanks",
    "tag_accuracy",
    "paired_ttest",
    "per_label_error_rates",
    "confusion",
    "confusion_delta",
    "write_matrix_tsv",
    "reg_inc_beta",
]


class AlignmentError(Exception):
    def __init__(self, sent_id: str, position: int, message: str):
        super().__init__(f"sentence {sent_id}, token {position}: {message}")
        self.sent_id = sent_id
        self.position = position


LENGTH_BINS: tuple[tuple[str, int, float], ...] = (
    ("<=3", 0, 3),
    ("4-6", 4, 6),
    ("7-10", 7, 10),
    (">10", 11, math.inf),
)


def length_bin(length_nopunct: int) -> str:
    for name, lo, hi in LENGTH_BINS:
        if lo <= length_nopunct <= hi:
            return name
    raise ValueError(f"negative length {length_nopunct}")


@dataclass
class SentencePairScore:
    sent_id: str
    n_scored: int
    n_head_correct: int
    n_las_correct: int
    exact: bool
    unlabeled_exact: bool
    speaker_role: SpeakerRole
    length_nopunct: int


class SliceScore(NamedTuple):
    las: float
    uas: float
    n_sentences: int


@dataclass
class EvalReport:
    las: float
    uas: float
    em: float
    uem: float
    upos_acc: float | None = None
    xpos_acc: float | None = None
    per_sentence: list[SentencePairScore] = field(default_factory=list)
    slices: dict[str, SliceScore] = field(default_factory=dict)


@dataclass
class TTestResult:
    n: int
    mean_diff: float
    t_stat: float
    p_value: float
    df: int
    degenerate: bool = False


def _norm_form(form: str) -> str:
    return unicodedata.normalize("NFC", "".join(form.split()))


def align(gold: Sentence, pred: Sentence) -> list[tuple[Token, Token]]:
    """Pair syntactic words positionally; MWT ranges and empty nodes are
    not part of the token sequence and therefore never scored."""
    if len(gold.tokens) != len(pred.tokens):
        raise AlignmentError(
            gold.sent_id,
            min(len(gold.tokens), len(pred.tokens)) + 1,
            f"token counts differ ({len(gold.tokens)} gold vs {len(pred.tokens)} predicted)",
        )
    pairs = []
    for i, (g, p) in enumerate(zip(gold.tokens, pred.tokens), 1):
        if _norm_form(g.form) != _norm_form(p.form):
            raise AlignmentError(
                gold.sent_id, i, f"forms differ ({g.form!r} vs {p.form!r})"
            )
        pairs.append((g, p))
    return pairs


def _deprel_for_comparison(deprel: str, universal_only: bool) -> str:
    return deprel.split(":", 1)[0] if universal_only else deprel


def score_sentence(
    gold: Sentence, pred: Sentence, *, universal_deprel_only: bool = False
) -> SentencePairScore:
    """Count head-correct and label-and-head-correct tokens.

    Deprel comparison is exact including subtypes unless
    ``universal_deprel_only`` is set. Punctuation is scored; it is only
    excluded from ``length_nopunct``.
    """
    pairs = align(gold, pred)
    n_scored = len(pairs)
    n_head = 0
    n_las = 0
    for g, p in pairs:
        if g.head == p.head:
            n_head += 1
            if _deprel_for_comparison(
                g.deprel, universal_deprel_only
            ) == _deprel_for_comparison(p.deprel, universal_deprel_only):
                n_las += 1
    return SentencePairScore(
        sent_id=gold.sent_id,
        n_scored=n_scored,
        n_head_correct=n_head,
        n_las_correct=n_las,
        exact=n_las == n_scored,
        unlabeled_exact=n_head == n_scored,
        speaker_role=gold.speaker_role,
        length_nopunct=sum(1 for g, _ in pairs if g.upos != "PUNCT"),
    )


def aggregate(scores: Sequence[SentencePairScore]) -> EvalReport:
    """Micro-averaged LAS/UAS over token totals plus sentence-level EM/UEM,
    with CS/CDS slices and the four length bins crossed with speaker."""
    if not scores:
        raise ValueError("cannot aggregate an empty score list")

    def micro(subset: Sequence[SentencePairScore]) -> SliceScore:
        tokens = sum(s.n_scored for s in subset)
        heads = sum(s.n_head_correct for s in subset)
        las = sum(s.n_las_correct for s in subset)
        if tokens == 0:
            return SliceScore(0.0, 0.0, len(subset))
        return SliceScore(100.0 * las / tokens, 100.0 * heads / tokens, len(subset))

    overall = micro(scores)
    if sum(s.n_scored for s in scores) == 0:
        raise ValueError("no scored tokens")
    em = 100.0 * sum(1 for s in scores if s.exact) / len(scores)
    uem = 100.0 * sum(1 for s in scores if s.unlabeled_exact) / len(scores)

    slices: dict[str, SliceScore] = {}
    for role in (SpeakerRole.CS, SpeakerRole.CDS):
        subset = [s for s in scores if s.speaker_role is role]
        slices[role.value] = micro(subset)
    for role in (SpeakerRole.CS, SpeakerRole.CDS):
        for name, lo, hi in LENGTH_BINS:
            subset = [
                s
                for s in scores
                if s.speaker_role is role and lo <= s.length_nopunct <= hi
            ]
            slices[f"{role.value}:{name}"] = micro(subset)

    return EvalReport(
        las=overall.las,
        uas=overall.uas,
        em=em,
        uem=uem,
        per_sentence=list(scores),
        slices=slices,
    )


def _pair_sentences(gold: Treebank, pred: Treebank) -> list[tuple[Sentence, Sentence]]:
    if len(gold.sentences) != len(pred.sentences):
        raise AlignmentError(
            "<treebank>",
            0,
            f"sentence counts differ ({len(gold.sentences)} vs {len(pred.sentences)})",
        )
    return list(zip(gold.sentences, pred.sentences))


def tag_accuracy(gold: Treebank, pred: Treebank, tagfield: str = "upos") -> float:
    """Percentage of aligned tokens whose UPOS (or XPOS) values are equal."""
    if tagfield not in ("upos", "xpos"):
        raise ValueError(f"tagfield must be 'upos' or 'xpos', got {tagfield!r}")
    total = 0
    equal = 0
    for gsent, psent in _pair_sentences(gold, pred):
        for g, p in align(gsent, psent):
            total += 1
            if getattr(g, tagfield) == getattr(p, tagfield):
                equal += 1
    if total == 0:
        raise ValueError("no tokens to score")
    return 100.0 * equal / total


def evaluate_treebanks(
    gold: Treebank, pred: Treebank, *, universal_deprel_only: bool = False
) -> EvalReport:
    """Score every sentence pair and aggregate, adding tag accuracies when
    the prediction carries any POS annotation."""
    scores = [
        score_sentence(g, p, universal_deprel_only=universal_deprel_only)
        for g, p in _pair_sentences(gold, pred)
    ]
    report = aggregate(scores)
    if any(t.upos != "_" for s in pred.sentences for t in s.tokens):
        report.upos_acc = tag_accuracy(gold, pred, "upos")
    if any(t.xpos != "_" for s in pred.sentences for t in s.tokens):
        report.xpos_acc = tag_accuracy(gold, pred, "xpos")
    return report


# ---------------------------------------------------------------------------
# Paired t-test (no statistics dependency; the test suite checks this
# against a numerically integrated Student-t density)
# ---------------------------------------------------------------------------

def _betacf(a: float, b: float, x: float, tol: float = 1e-12) -> float:
    # Continued fraction for the incomplete beta (modified Lentz).
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 400):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-sided paired Student t-test over elementwise differences.

    Zero-variance differences: zero mean gives t=0, p=1; non-zero mean
    gives p=0 with the ``degenerate`` flag set (infinite t).
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise ValueError("paired t-test needs at least 2 observations")
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    ss = sum((d - mean) ** 2 for d in diffs)
    df = n - 1
    if ss == 0.0:
        if mean == 0.0:
            return TTestResult(n, 0.0, 0.0, 1.0, df)
        return TTestResult(n, mean, math.copysign(math.inf, mean), 0.0, df, True)
    sd = math.sqrt(ss / df)
    t = mean / (sd / math.sqrt(n))
    p = reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
    return TTestResult(n, mean, t, min(1.0, p), df)


# ---------------------------------------------------------------------------
# Error analysis
# ---------------------------------------------------------------------------

class ErrorScope(Enum):
    LAS = "las"          # wrong head or wrong label counts as an error
    LABEL_ONLY = "label"  # only a wrong label counts


def per_label_error_rates(
    gold: Treebank,
    pred: Treebank,
    min_gold: int = 100,
    scope: ErrorScope = ErrorScope.LAS,
) -> dict[str, float]:
    """Error rate per gold deprel, normalized by gold label frequency;
    labels with fewer than ``min_gold`` gold instances are omitted."""
    if min_gold < 1:
        raise ValueError("min_gold must be >= 1")
    freq: dict[str, int] = {}
    errors: dict[str, int] = {}
    for gsent, psent in _pair_sentences(gold, pred):
        for g, p in align(gsent, psent):
            freq[g.deprel] = freq.get(g.deprel, 0) + 1
            if scope is ErrorScope.LAS:
                wrong = g.head != p.head or g.deprel != p.deprel
            else:
                wrong = g.deprel != p.deprel
            if wrong:
                errors[g.deprel] = errors.get(g.deprel, 0) + 1
    return {
        label: errors.get(label, 0) / count
        for label, count in sorted(freq.items())
        if count >= min_gold
    }


class Normalization(Enum):
    RAW = "raw"
    ROW_NORMALIZED = "row_normalized"


class ConfusionScope(Enum):
    LABEL_ONLY = "label"   # every aligned token contributes
    LAS_ERRORS = "las"     # only LAS-incorrect tokens contribute


@dataclass
class ConfusionMatrix:
    labels: list[str]
    counts: np.ndarray
    normalization: Normalization = Normalization.RAW

    def row_normalized(self) -> "ConfusionMatrix":
        counts = self.counts.astype(float)
        sums = counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            norm = np.where(sums > 0, counts / sums, 0.0)
        return ConfusionMatrix(list(self.labels), norm, Normalization.ROW_NORMALIZED)


@dataclass
class DeltaMatrix:
    labels: list[str]
    values: np.ndarray


def confusion(
    gold: Treebank, pred: Treebank, scope: ConfusionScope = ConfusionScope.LABEL_ONLY
) -> ConfusionMatrix:
    """Gold-by-predicted deprel counts over aligned tokens."""
    pair_counts: dict[tuple[str, str], int] = {}
    labels: set[str] = set()
    for gsent, psent in _pair_sentences(gold, pred):
        for g, p in align(gsent, psent):
            if scope is ConfusionScope.LAS_ERRORS and g.head == p.head and g.deprel == p.deprel:
                continue
            labels.add(g.deprel)
            labels.add(p.deprel)
            key = (g.deprel, p.deprel)
            pair_counts[key] = pair_counts.get(key, 0) + 1
    ordered = sorted(labels)
    index = {label: i for i, label in enumerate(ordered)}
    counts = np.zeros((len(ordered), len(ordered)), dtype=np.int64)
    for (g, p), c in pair_counts.items():
        counts[index[g], index[p]] = c
    return ConfusionMatrix(ordered, counts)


def confusion_delta(a: ConfusionMatrix, b: ConfusionMatrix) -> DeltaMatrix:
    """Elementwise a - b over the union label set (missing labels are
    zero-padded); positive cells mean ``a`` errs more."""
    if a.normalization is not Normalization.ROW_NORMALIZED:
        raise ValueError("matrix a must be row-normalized")
    if b.normalization is not Normalization.ROW_NORMALIZED:
        raise ValueError("matrix b must be row-normalized")
    labels = sorted(set(a.labels) | set(b.labels))
    index = {label: i for i, label in enumerate(labels)}

    def pad(m: ConfusionMatrix) -> np.ndarray:
        out = np.zeros((len(labels), len(labels)), dtype=float)
        rows = [index[l] for l in m.labels]
        for i, ri in enumerate(rows):
            for j, rj in enumerate(rows):
                out[ri, rj] = m.counts[i, j]
        return out

    return DeltaMatrix(labels, pad(a) - pad(b))


def write_matrix_tsv(
    labels: Sequence[str], values: np.ndarray, sink: IO, digits: int = 4
) -> None:
    """TSV with a header row/column of labels; cells with fixed decimals."""
    sink.write("\t" + "\t".join(labels) + "\n")
    for i, label in enumerate(labels):
        row = values[i]
        cells = (
            [str(int(v)) for v in row]
            if np.issubdtype(values.dtype, np.integer)
            else [f"{v:.{digits}f}" for v in row]
        )
        sink.write(label + "\t" + "\t".join(cells) + "\n")
