"""Trainable arc-eager dependency parser and greedy POS tagger, both with
averaged-perceptron scoring.

Desk-scale and dependency-free: training is online with a static oracle
over projective sentences (non-projective ones are skipped and counted),
decoding is greedy, and all randomness comes from one seed. Terminal
cleanup after decoding guarantees every output is a valid single-rooted
tree regardless of model quality, including the zero model.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Sequence

from .conllu import Sentence, Token, Treebank

__all__ = [
    "OracleError",
    "ModelFormatError",
    "ParserState",
    "ParserModel",
    "TaggerModel",
    "SHIFT",
    "REDUCE",
    "is_projective",
    "static_oracle",
    "oracle_sequence",
    "train_parser",
    "parse",
    "train_tagger",
    "tag",
    "save_model",
    "load_model",
    "MODEL_MAGIC",
]

MODEL_MAGIC = "CAITB1"
FEATURE_TEMPLATE_VERSION = 1

SHIFT = "SHIFT"
REDUCE = "REDUCE"
_LEFT = "LEFT:"
_RIGHT = "RIGHT:"


class OracleError(Exception):
    pass


class ModelFormatError(Exception):
    pass


# ---------------------------------------------------------------------------
# Projectivity
# ---------------------------------------------------------------------------

def is_projective(sentence: Sentence) -> bool:
    """Crossing-arc check, with the root arc anchored at position 0."""
    arcs = [(min(t.head, t.id), max(t.head, t.id)) for t in sentence.tokens]
    for i, (lo1, hi1) in enumerate(arcs):
        for lo2, hi2 in arcs[i + 1 :]:
            if lo1 < lo2 < hi1 < hi2 or lo2 < lo1 < hi2 < hi1:
                return False
    return True


# ---------------------------------------------------------------------------
# Transition system (arc-eager, no artificial root node; the stack starts
# empty and any token left headless at the end attaches during cleanup)
# ---------------------------------------------------------------------------

class ParserState:
    def __init__(self, n: int):
        self.stack: list[int] = []
        self.buffer_pos = 1
        self.n = n
        self.heads: dict[int, int] = {}
        self.labels: dict[int, str] = {}

    @property
    def buffer_front(self) -> int | None:
        return self.buffer_pos if self.buffer_pos <= self.n else None

    def buffer_empty(self) -> bool:
        return self.buffer_pos > self.n

    def valid_transitions(self, label_set: Sequence[str]) -> list[str]:
        out = []
        b0 = self.buffer_front
        if b0 is not None:
            out.append(SHIFT)
            if self.stack:
                s0 = self.stack[-1]
                if s0 not in self.heads:
                    out.extend(_LEFT + l for l in label_set)
                out.extend(_RIGHT + l for l in label_set)
        if self.stack and self.stack[-1] in self.heads:
            out.append(REDUCE)
        return out

    def apply(self, transition: str) -> None:
        b0 = self.buffer_front
        if transition == SHIFT:
            self.stack.append(b0)
            self.buffer_pos += 1
        elif transition == REDUCE:
            self.stack.pop()
        elif transition.startswith(_LEFT):
            s0 = self.stack.pop()
            self.heads[s0] = b0
            self.labels[s0] = transition[len(_LEFT):]
        elif transition.startswith(_RIGHT):
            self.heads[b0] = self.stack[-1]
            self.labels[b0] = transition[len(_RIGHT):]
            self.stack.append(b0)
            self.buffer_pos += 1
        else:
            raise ValueError(f"unknown transition {transition!r}")


def static_oracle(gold: Sentence, state: ParserState) -> str:
    """Next step of the canonical transition sequence for a projective tree."""
    if state.buffer_empty():
        raise OracleError("no transition from a terminal state")
    b0 = state.buffer_front
    gold_heads = {t.id: t.head for t in gold.tokens}
    gold_labels = {t.id: t.deprel for t in gold.tokens}
    if not state.stack:
        return SHIFT
    s0 = state.stack[-1]
    if gold_heads[s0] == b0:
        if s0 in state.heads:
            raise OracleError(f"token {s0} already attached; tree not projective")
        return _LEFT + gold_labels[s0]
    if gold_heads[b0] == s0:
        return _RIGHT + gold_labels[b0]
    needs_reduce = any(
        gold_heads[b0] == k or gold_heads[k] == b0 for k in state.stack[:-1]
    )
    if needs_reduce:
        if s0 not in state.heads:
            raise OracleError(f"cannot reduce unattached token {s0}; tree not projective")
        return REDUCE
    return SHIFT


def oracle_sequence(gold: Sentence) -> list[str]:
    """Replay the static oracle from the initial state; errors on
    non-projective input."""
    if not is_projective(gold):
        raise OracleError(f"sentence {gold.sent_id} is not projective")
    state = ParserState(len(gold.tokens))
    seq = []
    while not state.buffer_empty():
        transition = static_oracle(gold, state)
        seq.append(transition)
        state.apply(transition)
    return seq


def _cleanup(state: ParserState) -> tuple[dict[int, int], dict[int, str]]:
    # First headless token becomes the root; later headless tokens attach
    # to it as "dep".
    heads = dict(state.heads)
    labels = dict(state.labels)
    root = None
    for i in range(1, state.n + 1):
        if i not in heads:
            if root is None:
                root = i
                heads[i] = 0
                labels[i] = "root"
            else:
                heads[i] = root
                labels[i] = "dep"
    return heads, labels


# ---------------------------------------------------------------------------
# Features and averaged weights
# ---------------------------------------------------------------------------

def _dist_bucket(a: int, b: int) -> str:
    d = abs(a - b)
    if d <= 3:
        return str(d)
    if d <= 6:
        return "4-6"
    return ">6"


def _parser_features(state: ParserState, tokens: Sequence[Token]) -> list[str]:
    def form(i):
        return tokens[i - 1].form.lower() if i else "<none>"

    def upos(i):
        return tokens[i - 1].upos if i else "<none>"

    s0 = state.stack[-1] if state.stack else 0
    s1 = state.stack[-2] if len(state.stack) > 1 else 0
    b0 = state.buffer_front or 0
    b1 = b0 + 1 if b0 and b0 + 1 <= state.n else 0

    def edge_dep(head: int, leftmost: bool) -> str:
        best = None
        for child, h in state.heads.items():
            if h != head:
                continue
            if best is None or (child < best if leftmost else child > best):
                best = child
        return state.labels[best] if best is not None else "<none>"

    feats = [
        "bias",
        f"s0f={form(s0)}",
        f"s0p={upos(s0)}",
        f"s1f={form(s1)}",
        f"s1p={upos(s1)}",
        f"b0f={form(b0)}",
        f"b0p={upos(b0)}",
        f"b1f={form(b1)}",
        f"b1p={upos(b1)}",
        f"s0f|b0f={form(s0)}|{form(b0)}",
        f"s0p|b0p={upos(s0)}|{upos(b0)}",
        f"s0p|b0f={upos(s0)}|{form(b0)}",
        f"s0f|b0p={form(s0)}|{upos(b0)}",
        f"s0p|s1p={upos(s0)}|{upos(s1)}",
        f"b0p|b1p={upos(b0)}|{upos(b1)}",
    ]
    if s0:
        feats.append(f"s0ld={edge_dep(s0, True)}")
        feats.append(f"s0rd={edge_dep(s0, False)}")
        feats.append(f"s0hashead={s0 in state.heads}")
    if b0:
        feats.append(f"b0ld={edge_dep(b0, True)}")
    if s0 and b0:
        feats.append(f"dist={_dist_bucket(s0, b0)}")
        feats.append(f"dist|s0p|b0p={_dist_bucket(s0, b0)}|{upos(s0)}|{upos(b0)}")
    return feats


class AveragedWeights:
    """Multiclass perceptron weights with lazily accumulated averages."""

    def __init__(self):
        self.weights: dict[str, dict[str, float]] = {}
        self._totals: dict[tuple[str, str], float] = {}
        self._stamps: dict[tuple[str, str], int] = {}
        self.updates = 0

    def score(self, features: Sequence[str]) -> dict[str, float]:
        scores: dict[str, float] = {}
        for f in features:
            row = self.weights.get(f)
            if not row:
                continue
            for cls, w in row.items():
                scores[cls] = scores.get(cls, 0.0) + w
        return scores

    def _bump(self, feature: str, cls: str, delta: float) -> None:
        key = (feature, cls)
        row = self.weights.setdefault(feature, {})
        current = row.get(cls, 0.0)
        self._totals[key] = self._totals.get(key, 0.0) + (
            self.updates - self._stamps.get(key, 0)
        ) * current
        self._stamps[key] = self.updates
        row[cls] = current + delta

    def update(self, truth: str, guess: str, features: Sequence[str]) -> None:
        self.updates += 1
        if truth == guess:
            return
        for f in features:
            self._bump(f, truth, +1.0)
            self._bump(f, guess, -1.0)

    def averaged(self) -> dict[str, dict[str, float]]:
        """Mean of the per-update weight snapshots."""
        if self.updates == 0:
            return {}
        out: dict[str, dict[str, float]] = {}
        for feature, row in self.weights.items():
            for cls, w in row.items():
                key = (feature, cls)
                # A value set at update s is part of snapshots s..U inclusive.
                total = self._totals.get(key, 0.0) + (
                    self.updates + 1 - self._stamps.get(key, 0)
                ) * w
                avg = total / self.updates
                if avg != 0.0:
                    out.setdefault(feature, {})[cls] = avg
        return out


def _predict(
    weights: dict[str, dict[str, float]],
    features: Sequence[str],
    candidates: Sequence[str],
) -> str:
    scores: dict[str, float] = {}
    for f in features:
        row = weights.get(f)
        if not row:
            continue
        for cls, w in row.items():
            scores[cls] = scores.get(cls, 0.0) + w
    # Ties break on the transition/tag name for run-to-run determinism.
    return min(candidates, key=lambda c: (-scores.get(c, 0.0), c))


# ---------------------------------------------------------------------------
# Parser training and decoding
# ---------------------------------------------------------------------------

@dataclass
class ParserModel:
    weights: dict[str, dict[str, float]]
    label_set: list[str]
    version: int = FEATURE_TEMPLATE_VERSION
    n_nonprojective_skipped: int = 0


def train_parser(tb: Treebank, epochs: int = 5, seed: int = 0) -> ParserModel:
    """Online averaged-perceptron training with a static arc-eager oracle.

    Non-projective sentences are skipped and counted; epoch order is
    shuffled by ``seed`` only, so identical seeds give identical models.
    """
    sentences = [s for s in tb.sentences if s.tokens]
    if not sentences:
        raise ValueError("cannot train on an empty treebank")
    projective = [s for s in sentences if is_projective(s)]
    skipped = len(sentences) - len(projective)
    if not projective:
        raise ValueError("all sentences are non-projective; nothing to train on")
    label_set = sorted(
        {t.deprel for s in projective for t in s.tokens if t.head != 0}
    ) or ["dep"]

    weights = AveragedWeights()
    rng = random.Random(seed)
    order = list(range(len(projective)))
    for _ in range(epochs):
        rng.shuffle(order)
        for idx in order:
            gold = projective[idx]
            state = ParserState(len(gold.tokens))
            while not state.buffer_empty():
                features = _parser_features(state, gold.tokens)
                truth = static_oracle(gold, state)
                candidates = state.valid_transitions(label_set)
                guess = _predict(weights.weights, features, candidates)
                weights.update(truth, guess, features)
                state.apply(truth)
    return ParserModel(weights.averaged(), label_set, FEATURE_TEMPLATE_VERSION, skipped)


def parse(model: ParserModel, sentence: Sentence) -> Sentence:
    """Greedy arc-eager decoding; the output always validates cleanly."""
    if not sentence.tokens:
        raise ValueError("cannot parse an empty sentence")
    state = ParserState(len(sentence.tokens))
    label_set = model.label_set or ["dep"]
    while not state.buffer_empty():
        features = _parser_features(state, sentence.tokens)
        candidates = state.valid_transitions(label_set)
        state.apply(_predict(model.weights, features, candidates))
    heads, labels = _cleanup(state)
    tokens = [
        replace(t, feats=dict(t.feats), head=heads[t.id], deprel=labels[t.id])
        for t in sentence.tokens
    ]
    return replace(sentence, tokens=tokens)


# ---------------------------------------------------------------------------
# POS tagger
# ---------------------------------------------------------------------------

@dataclass
class TaggerModel:
    weights: dict[str, dict[str, float]]
    tagdict: dict[str, str]
    classes: list[str]
    version: int = FEATURE_TEMPLATE_VERSION


# Words at least this frequent and unambiguous in training bypass the model.
_TAGDICT_MIN_FREQ = 10

_START = ("<s1>", "<s2>")


def _tagger_features(
    words: Sequence[str], i: int, prev: str, prev2: str
) -> list[str]:
    word = words[i]
    lower = word.lower()
    feats = [
        "bias",
        f"w={lower}",
        f"suf1={lower[-1:]}",
        f"suf2={lower[-2:]}",
        f"suf3={lower[-3:]}",
        f"pre1={lower[:1]}",
        f"pre2={lower[:2]}",
        f"pre3={lower[:3]}",
        f"t-1={prev}",
        f"t-2={prev2}",
        f"t-1|t-2={prev}|{prev2}",
        f"w-1={words[i - 1].lower() if i >= 1 else '<s>'}",
        f"w-2={words[i - 2].lower() if i >= 2 else '<s>'}",
        f"w+1={words[i + 1].lower() if i + 1 < len(words) else '</s>'}",
        f"w+2={words[i + 2].lower() if i + 2 < len(words) else '</s>'}",
        f"t-1|w={prev}|{lower}",
    ]
    return feats


def train_tagger(tb: Treebank, epochs: int = 5, seed: int = 0) -> TaggerModel:
    """Greedy left-to-right averaged perceptron over gold UPOS tags."""
    sentences = [s for s in tb.sentences if s.tokens]
    if not sentences:
        raise ValueError("cannot train on an empty treebank")
    tag_counts: dict[str, dict[str, int]] = {}
    classes: set[str] = set()
    for s in sentences:
        for t in s.tokens:
            classes.add(t.upos)
            tag_counts.setdefault(t.form.lower(), {}).setdefault(t.upos, 0)
            tag_counts[t.form.lower()][t.upos] += 1
    tagdict = {
        word: max(counts, key=counts.get)
        for word, counts in tag_counts.items()
        if sum(counts.values()) >= _TAGDICT_MIN_FREQ and len(counts) == 1
    }
    class_list = sorted(classes)

    weights = AveragedWeights()
    rng = random.Random(seed)
    order = list(range(len(sentences)))
    for _ in range(epochs):
        rng.shuffle(order)
        for idx in order:
            sentence = sentences[idx]
            words = [t.form for t in sentence.tokens]
            prev, prev2 = _START
            for i, tok in enumerate(sentence.tokens):
                guess = tagdict.get(words[i].lower())
                if guess is None:
                    features = _tagger_features(words, i, prev, prev2)
                    guess = _predict(weights.weights, features, class_list)
                    weights.update(tok.upos, guess, features)
                prev2 = prev
                prev = guess
    return TaggerModel(weights.averaged(), tagdict, class_list)


def tag(model: TaggerModel, sentence: Sentence) -> Sentence:
    """Fill UPOS only; every other field is preserved."""
    if not sentence.tokens:
        raise ValueError("cannot tag an empty sentence")
    words = [t.form for t in sentence.tokens]
    prev, prev2 = _START
    tags = []
    for i in range(len(words)):
        guess = model.tagdict.get(words[i].lower())
        if guess is None:
            features = _tagger_features(words, i, prev, prev2)
            guess = _predict(model.weights, features, model.classes or ["X"])
        tags.append(guess)
        prev2 = prev
        prev = guess
    tokens = [
        replace(t, feats=dict(t.feats), upos=tags[i])
        for i, t in enumerate(sentence.tokens)
    ]
    return replace(sentence, tokens=tokens)


# ---------------------------------------------------------------------------
# Model files: line-based text table under a magic header
# ---------------------------------------------------------------------------

def save_model(model: ParserModel | TaggerModel, sink: str | Path | IO) -> None:
    """Write ``CAITB1`` text format; rows are sorted so identical models
    produce identical files."""
    lines = []
    if isinstance(model, ParserModel):
        lines.append(f"{MODEL_MAGIC}\tparser\t{model.version}")
        lines.append(f"meta\tnonprojective_skipped\t{model.n_nonprojective_skipped}")
        for label in model.label_set:
            lines.append(f"label\t{label}")
    else:
        lines.append(f"{MODEL_MAGIC}\ttagger\t{model.version}")
        for cls in model.classes:
            lines.append(f"class\t{cls}")
        for word in sorted(model.tagdict):
            lines.append(f"tagdict\t{word}\t{model.tagdict[word]}")
    for feature in sorted(model.weights):
        row = model.weights[feature]
        for cls in sorted(row):
            lines.append(f"w\t{feature}\t{cls}\t{row[cls]!r}")
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
        return
    Path(sink).write_text(text, encoding="utf-8")


def load_model(source: str | Path | IO) -> ParserModel | TaggerModel:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise ModelFormatError("empty model file")
    header = lines[0].split("\t")
    if len(header) != 3 or header[0] != MODEL_MAGIC:
        raise ModelFormatError(f"bad magic header {lines[0]!r}; expected {MODEL_MAGIC}")
    kind, version = header[1], int(header[2])
    if version != FEATURE_TEMPLATE_VERSION:
        raise ModelFormatError(f"unsupported feature template version {version}")
    weights: dict[str, dict[str, float]] = {}
    labels: list[str] = []
    classes: list[str] = []
    tagdict: dict[str, str] = {}
    skipped = 0
    for line_no, line in enumerate(lines[1:], 2):
        if not line:
            continue
        fields = line.split("\t")
        if fields[0] == "w" and len(fields) == 4:
            weights.setdefault(fields[1], {})[fields[2]] = float(fields[3])
        elif fields[0] == "label" and len(fields) == 2:
            labels.append(fields[1])
        elif fields[0] == "class" and len(fields) == 2:
            classes.append(fields[1])
        elif fields[0] == "tagdict" and len(fields) == 3:
            tagdict[fields[1]] = fields[2]
        elif fields[0] == "meta" and len(fields) == 3:
            if fields[1] == "nonprojective_skipped":
                skipped = int(fields[2])
        else:
            raise ModelFormatError(f"line {line_no}: unrecognized row {line!r}")
    if kind == "parser":
        return ParserModel(weights, labels, version, skipped)
    if kind == "tagger":
        return TaggerModel(weights, tagdict, classes, version)
    raise ModelFormatError(f"unknown model kind {kind!r}")
