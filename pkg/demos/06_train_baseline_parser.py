"""Training the baseline arc-eager parser and POS tagger, and showing the
in-domain training effect: a model trained on conversational data beats
one trained on formal written text when both are evaluated on held-out
conversational utterances.
"""

import random

from cait.baseline import (
    ParserModel,
    oracle_sequence,
    parse,
    tag,
    train_parser,
    train_tagger,
)
from cait.conllu import Sentence, Token, Treebank
from cait.evaluation import evaluate_treebanks, tag_accuracy

rng = random.Random(0)

# ---------------------------------------------------------------------------
# Tiny synthetic corpora (conversational vs formal register)
# ---------------------------------------------------------------------------

NOUNS = ["ball", "dog", "cup", "teddy", "juice", "book"]
VERBS = ["see", "want", "like", "take"]


def conversational(i):
    n = rng.choice(NOUNS)
    v = rng.choice(VERBS)
    kind = rng.randrange(3)
    if kind == 0:  # can you V the N ?
        rows = [("can", "AUX", 3, "aux"), ("you", "PRON", 3, "nsubj"),
                (v, "VERB", 0, "root"), ("the", "DET", 5, "det"),
                (n, "NOUN", 3, "obj"), ("?", "PUNCT", 3, "punct")]
    elif kind == 1:  # I V the N .
        rows = [("I", "PRON", 2, "nsubj"), (v, "VERB", 0, "root"),
                ("the", "DET", 4, "det"), (n, "NOUN", 2, "obj"),
                (".", "PUNCT", 2, "punct")]
    else:  # V the N !
        rows = [(v, "VERB", 0, "root"), ("the", "DET", 3, "det"),
                (n, "NOUN", 1, "obj"), ("!", "PUNCT", 1, "punct")]
    return make(f"conv-{i}", rows)


F_NOUNS = ["committee", "proposal", "report", "budget"]
F_VERBS = ["approved", "reviewed", "submitted"]


def formal(i):
    n1, n2 = rng.sample(F_NOUNS, 2)
    v = rng.choice(F_VERBS)
    rows = [("the", "DET", 2, "det"), (n1, "NOUN", 3, "nsubj"),
            (v, "VERB", 0, "root"), ("the", "DET", 5, "det"),
            (n2, "NOUN", 3, "obj"), (".", "PUNCT", 3, "punct")]
    return make(f"formal-{i}", rows)


def make(sent_id, rows):
    tokens = [Token(id=i, form=f, lemma=f, upos=u, head=h, deprel=d)
              for i, (f, u, h, d) in enumerate(rows, 1)]
    return Sentence(sent_id=sent_id, tokens=tokens)


train_conv = Treebank([conversational(i) for i in range(300)])
held_out = Treebank([conversational(1000 + i) for i in range(80)])
train_formal = Treebank([formal(i) for i in range(300)])

# ---------------------------------------------------------------------------
# The static oracle produces the canonical transition sequence
# ---------------------------------------------------------------------------

example = held_out.sentences[0]
print("utterance:  ", " ".join(t.form for t in example.tokens))
print("transitions:", " ".join(oracle_sequence(example)))

# ---------------------------------------------------------------------------
# Train and compare
# ---------------------------------------------------------------------------

def las(model):
    pred = Treebank([parse(model, s) for s in held_out.sentences])
    return evaluate_treebanks(held_out, pred).las


in_domain = train_parser(train_conv, epochs=5, seed=0)
out_of_domain = train_parser(train_formal, epochs=5, seed=0)
zero = ParserModel({}, ["dep"])

print(f"\nheld-out LAS, in-domain model:     {las(in_domain):6.2f}")
print(f"held-out LAS, out-of-domain model: {las(out_of_domain):6.2f}")
print(f"held-out LAS, untrained model:     {las(zero):6.2f}")

# ---------------------------------------------------------------------------
# POS tagger
# ---------------------------------------------------------------------------

tagger = train_tagger(train_conv, epochs=5, seed=0)
tagged = Treebank([tag(tagger, s) for s in held_out.sentences])
print(f"\nheld-out UPOS accuracy: {tag_accuracy(held_out, tagged):.2f}")
