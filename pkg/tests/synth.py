"""Deterministic synthetic corpora: a child-interaction-style treebank, a
formal written-text treebank, random valid/corrupted/malformed trees."""

import random

from cait.conllu import Sentence, SpeakerRole, Token, Treebank

from helpers import build_sentence

# ---------------------------------------------------------------------------
# In-domain (conversational) treebank
# ---------------------------------------------------------------------------

_NOUNS = ["ball", "dog", "cup", "teddy", "juice", "book", "car", "duck",
          "sock", "spoon", "bunny", "box"]
_TRANS = [("see", "sees"), ("want", "wants"), ("like", "likes"),
          ("take", "takes"), ("find", "finds"), ("hold", "holds")]
_INTR = [("run", "runs", "running"), ("sleep", "sleeps", "sleeping"),
         ("jump", "jumps", "jumping"), ("laugh", "laughs", "laughing"),
         ("play", "plays", "playing"), ("cry", "cries", "crying")]
_ADJS = ["big", "little", "red", "nice", "funny", "wet"]
_NAMES = ["Thomas", "Anna", "Mummy", "Daddy"]

_PAST = {"Mood": "Ind", "Tense": "Past", "VerbForm": "Fin"}
_PRES = {"Mood": "Ind", "Tense": "Pres", "VerbForm": "Fin"}
_INF = {"VerbForm": "Inf"}
_IMP = {"Mood": "Imp", "VerbForm": "Fin"}
_GER = {"Tense": "Pres", "VerbForm": "Part"}


def _childes_templates(rng):
    noun = rng.choice(_NOUNS)
    noun2 = rng.choice(_NOUNS)
    base, third = rng.choice(_TRANS)
    ibase, ithird, iger = rng.choice(_INTR)
    adj = rng.choice(_ADJS)
    name = rng.choice(_NAMES)
    templates = [
        [("the", "the", "DET", 2, "det"),
         ("%s" % noun, noun, "NOUN", 3, "nsubj"),
         (ithird, ibase, "VERB", 0, "root", _PRES),
         (".", ".", "PUNCT", 3, "punct")],
        [("I", "I", "PRON", 2, "nsubj"),
         (base, base, "VERB", 0, "root", _PRES),
         ("the", "the", "DET", 4, "det"),
         (noun, noun, "NOUN", 2, "obj"),
         (".", ".", "PUNCT", 2, "punct")],
        [(base, base, "VERB", 0, "root", _IMP),
         ("the", "the", "DET", 3, "det"),
         (noun, noun, "NOUN", 1, "obj"),
         ("!", "!", "PUNCT", 1, "punct")],
        [("can", "can", "AUX", 3, "aux", _PRES),
         ("you", "you", "PRON", 3, "nsubj"),
         (base, base, "VERB", 0, "root", _INF),
         ("the", "the", "DET", 5, "det"),
         (noun, noun, "NOUN", 3, "obj"),
         ("?", "?", "PUNCT", 3, "punct")],
        [("where", "where", "ADV", 0, "root", {"PronType": "Int"}),
         ("is", "be", "AUX", 1, "cop", _PRES),
         ("the", "the", "DET", 4, "det"),
         (noun, noun, "NOUN", 1, "nsubj"),
         ("?", "?", "PUNCT", 1, "punct")],
        [("it", "it", "PRON", 4, "nsubj"),
         ("is", "be", "AUX", 4, "cop", _PRES),
         ("a", "a", "DET", 4, "det"),
         (noun, noun, "NOUN", 0, "root"),
         (".", ".", "PUNCT", 4, "punct")],
        [("look", "look", "VERB", 0, "root", _IMP),
         (name, name, "PROPN", 1, "vocative"),
         ("!", "!", "PUNCT", 1, "punct")],
        [("he", "he", "PRON", 3, "nsubj"),
         ("is", "be", "AUX", 3, "aux", _PRES),
         (iger, ibase, "VERB", 0, "root", _GER),
         (".", ".", "PUNCT", 3, "punct")],
        [("there", "there", "PRON", 2, "expl"),
         ("is", "be", "VERB", 0, "root", _PRES),
         ("a", "a", "DET", 4, "det"),
         (noun, noun, "NOUN", 2, "nsubj"),
         (".", ".", "PUNCT", 2, "punct")],
        [("do", "do", "AUX", 3, "aux", _INF),
         ("n't", "not", "PART", 3, "advmod"),
         (base, base, "VERB", 0, "root", _IMP),
         ("it", "it", "PRON", 3, "obj"),
         (".", ".", "PUNCT", 3, "punct")],
        [("the", "the", "DET", 2, "det"),
         (noun, noun, "NOUN", 4, "nsubj"),
         ("is", "be", "AUX", 4, "cop", _PRES),
         (adj, adj, "ADJ", 0, "root"),
         (".", ".", "PUNCT", 4, "punct")],
        [("you", "you", "PRON", 2, "nsubj"),
         (base, base, "VERB", 0, "root", _PRES),
         ("it", "it", "PRON", 2, "obj"),
         (".", ".", "PUNCT", 2, "punct")],
        [(noun, noun, "NOUN", 0, "root"),
         (".", ".", "PUNCT", 1, "punct")],
        [("the", "the", "DET", 3, "det"),
         (adj, adj, "ADJ", 3, "amod"),
         (noun2, noun2, "NOUN", 0, "root"),
         (".", ".", "PUNCT", 3, "punct")],
    ]
    return templates


def childes_treebank(n, seed=0, with_ages=False):
    rng = random.Random(seed)
    sentences = []
    for i in range(n):
        rows = rng.choice(_childes_templates(rng))
        speaker = SpeakerRole.CS if rng.random() < 0.5 else SpeakerRole.CDS
        age = round(rng.uniform(20.0, 60.0), 1) if with_ages else None
        sentences.append(
            build_sentence(f"chi-{i + 1:04d}", rows, speaker=speaker, age=age)
        )
    return Treebank(sentences)


# ---------------------------------------------------------------------------
# Out-of-domain (formal written) treebank
# ---------------------------------------------------------------------------

_F_NOUNS = ["committee", "proposal", "report", "council", "budget",
            "document", "chairman", "board", "decision", "meeting",
            "policy", "review"]
_F_VERBS = ["approved", "prepared", "reviewed", "submitted", "signed",
            "rejected", "considered", "endorsed"]
_F_ADJS = ["municipal", "annual", "preliminary", "financial", "formal",
           "revised"]


def _formal_templates(rng):
    n1, n2, n3 = rng.sample(_F_NOUNS, 3)
    v = rng.choice(_F_VERBS)
    v2 = rng.choice(_F_VERBS)
    adj = rng.choice(_F_ADJS)
    adj2 = rng.choice(_F_ADJS)
    templates = [
        [("the", "the", "DET", 3, "det"),
         (adj, adj, "ADJ", 3, "amod"),
         (n1, n1, "NOUN", 4, "nsubj"),
         (v, v[:-2] if v.endswith("ed") else v, "VERB", 0, "root", _PAST),
         ("the", "the", "DET", 6, "det"),
         (n2, n2, "NOUN", 4, "obj"),
         (".", ".", "PUNCT", 4, "punct")],
        [("the", "the", "DET", 2, "det"),
         (n1, n1, "NOUN", 6, "nsubj"),
         ("of", "of", "ADP", 5, "case"),
         ("the", "the", "DET", 5, "det"),
         (n2, n2, "NOUN", 2, "nmod"),
         (v, v, "VERB", 0, "root", _PAST),
         ("the", "the", "DET", 8, "det"),
         (n3, n3, "NOUN", 6, "obj"),
         (".", ".", "PUNCT", 6, "punct")],
        [("the", "the", "DET", 2, "det"),
         (n1, n1, "NOUN", 4, "nsubj:pass"),
         ("was", "be", "AUX", 4, "aux:pass", _PAST),
         (v, v, "VERB", 0, "root", {"Tense": "Past", "VerbForm": "Part"}),
         ("by", "by", "ADP", 7, "case"),
         ("the", "the", "DET", 7, "det"),
         (n2, n2, "NOUN", 4, "obl"),
         (".", ".", "PUNCT", 4, "punct")],
        [("the", "the", "DET", 2, "det"),
         (n1, n1, "NOUN", 3, "nsubj"),
         (v, v, "VERB", 0, "root", _PAST),
         ("the", "the", "DET", 5, "det"),
         (n2, n2, "NOUN", 3, "obj"),
         ("regarding", "regard", "VERB", 8, "case"),
         ("the", "the", "DET", 8, "det"),
         (n3, n3, "NOUN", 5, "nmod"),
         (".", ".", "PUNCT", 3, "punct")],
        [("the", "the", "DET", 2, "det"),
         (n1, n1, "NOUN", 3, "nsubj"),
         (v, v, "VERB", 0, "root", _PAST),
         ("that", "that", "SCONJ", 8, "mark"),
         ("the", "the", "DET", 6, "det"),
         (n2, n2, "NOUN", 8, "nsubj"),
         ("was", "be", "AUX", 8, "cop", _PAST),
         (adj2, adj2, "ADJ", 3, "ccomp"),
         (".", ".", "PUNCT", 3, "punct")],
        [("the", "the", "DET", 3, "det"),
         (adj, adj, "ADJ", 3, "amod"),
         (n1, n1, "NOUN", 4, "nsubj"),
         (v, v, "VERB", 0, "root", _PAST),
         ("and", "and", "CCONJ", 6, "cc"),
         (v2, v2, "VERB", 4, "conj", _PAST),
         ("the", "the", "DET", 8, "det"),
         (n2, n2, "NOUN", 6, "obj"),
         (".", ".", "PUNCT", 4, "punct")],
    ]
    return templates


def formal_treebank(n, seed=0):
    rng = random.Random(seed)
    sentences = []
    for i in range(n):
        rows = rng.choice(_formal_templates(rng))
        sentences.append(build_sentence(f"formal-{i + 1:04d}", rows))
    return Treebank(sentences)


# ---------------------------------------------------------------------------
# Random valid / corrupted / malformed trees
# ---------------------------------------------------------------------------

_FORMS = ["the", "a", "dog", "ball", "see", "want", "go", "it", "you",
          "big", "up", "there", "more", "no"]
_DEPRELS = ["nsubj", "obj", "det", "advmod", "amod", "case", "obl",
            "nmod", "discourse", "conj", "punct", "dep"]
_UPOS = ["NOUN", "VERB", "PRON", "DET", "ADJ", "ADV", "ADP", "INTJ"]


def random_valid_sentence(rng, sent_id="r", min_len=1, max_len=12,
                          speaker=None):
    """Random acyclic single-rooted tree: each token attaches to a
    previously placed token (or the root slot for the first)."""
    n = rng.randint(min_len, max_len)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = {}
    placed = []
    for tid in order:
        heads[tid] = rng.choice(placed) if placed else 0
        placed.append(tid)
    rows = []
    for tid in range(1, n + 1):
        if rng.random() < 0.15:
            form, upos = ".", "PUNCT"
        else:
            form, upos = rng.choice(_FORMS), rng.choice(_UPOS)
        deprel = "root" if heads[tid] == 0 else rng.choice(_DEPRELS)
        rows.append((form, form, upos, heads[tid], deprel))
    role = speaker or rng.choice([SpeakerRole.CS, SpeakerRole.CDS])
    return build_sentence(sent_id, rows, speaker=role)


def corrupt_sentence(sentence, rate, rng):
    """Randomly re-head and relabel tokens at the given rate (the result
    may be an invalid tree; scoring does not mind)."""
    from dataclasses import replace

    n = len(sentence.tokens)
    tokens = []
    for tok in sentence.tokens:
        head, deprel = tok.head, tok.deprel
        if rng.random() < rate:
            choices = [h for h in range(0, n + 1) if h != tok.id]
            head = rng.choice(choices)
        if rng.random() < rate:
            deprel = rng.choice(_DEPRELS + ["root"])
        tokens.append(replace(tok, feats=dict(tok.feats), head=head, deprel=deprel))
    return replace(sentence, tokens=tokens)


def random_malformed_sentence(rng, sent_id="m"):
    """A tree with injected violations: self-loops, cycles, zero or extra
    roots, dangling heads, reset-style duplicate ids, bad root labels."""
    sentence = random_valid_sentence(rng, sent_id, min_len=2, max_len=10)
    toks = sentence.tokens
    n = len(toks)
    for _ in range(rng.randint(1, 4)):
        kind = rng.randint(0, 6)
        tok = rng.choice(toks)
        if kind == 0:
            tok.head = tok.id  # self-loop
        elif kind == 1:
            tok.head = n + rng.randint(1, 3)  # dangling head
        elif kind == 2:
            tok.head = 0
            tok.deprel = rng.choice(_DEPRELS)  # extra root, wrong label
        elif kind == 3 and n >= 2:
            a, b = rng.sample(range(n), 2)
            toks[a].head = toks[b].id
            toks[b].head = toks[a].id  # 2-cycle
        elif kind == 4:
            for t in toks:
                if t.head == 0:
                    t.head = rng.randint(1, n)  # remove roots
        elif kind == 5:
            tok.deprel = "root"  # root label off a root head
        elif kind == 6 and n >= 4:
            # mid-sentence index reset: second half restarts at 1
            half = n // 2
            for i, t in enumerate(toks[half:]):
                t.id = i + 1
    return sentence


def random_fuzz_sentence(rng, sent_id="f", max_len=10):
    """Random forms/UPOS with no annotation, for parser fuzzing."""
    n = rng.randint(1, max_len)
    rows = []
    for _ in range(n):
        form = "".join(rng.choice("abcdefgh'") for _ in range(rng.randint(1, 6)))
        rows.append((form, "_", rng.choice(_UPOS + ["PUNCT"]), 0, "root"))
    sentence = build_sentence(sent_id, rows)
    for tok in sentence.tokens:
        tok.deprel = "_"
    return sentence
