"""Utterance-level construction tagging with the UD and POS backends,
including tag-question stripping.
"""

from cait.conllu import Sentence, Token
from cait.cxntag import (
    Backend,
    strip_tag_question,
    tag_utterance,
)


def sentence(sent_id, rows):
    tokens = [
        Token(id=i, form=f, lemma=l, upos=u, head=h, deprel=d,
              feats=dict(feats or {}))
        for i, (f, l, u, h, d, feats) in enumerate(rows, 1)
    ]
    return Sentence(sent_id=sent_id, tokens=tokens)


EXAMPLES = [
    sentence("hello", [
        ("hello", "hello", "INTJ", 0, "root", None),
        (".", ".", "PUNCT", 1, "punct", None)]),
    sentence("what-is-that", [
        ("what", "what", "PRON", 0, "root", {"PronType": "Int"}),
        ("is", "be", "AUX", 1, "cop", None),
        ("that", "that", "PRON", 1, "nsubj", None),
        ("?", "?", "PUNCT", 1, "punct", None)]),
    sentence("lets-go", [
        ("let", "let", "VERB", 0, "root", {"Mood": "Imp"}),
        ("'s", "we", "PRON", 1, "obj", None),
        ("go", "go", "VERB", 1, "xcomp", {"VerbForm": "Inf"}),
        (".", ".", "PUNCT", 1, "punct", None)]),
    sentence("she-is-running", [
        ("she", "she", "PRON", 3, "nsubj", None),
        ("is", "be", "AUX", 3, "aux", None),
        ("running", "run", "VERB", 0, "root",
         {"Tense": "Pres", "VerbForm": "Part"}),
        (".", ".", "PUNCT", 3, "punct", None)]),
    sentence("want-go-play", [
        ("I", "I", "PRON", 2, "nsubj", None),
        ("want", "want", "VERB", 0, "root", None),
        ("to", "to", "PART", 4, "mark", None),
        ("go", "go", "VERB", 2, "xcomp", {"VerbForm": "Inf"}),
        ("and", "and", "CCONJ", 6, "cc", None),
        ("play", "play", "VERB", 4, "conj", {"VerbForm": "Inf"}),
        (".", ".", "PUNCT", 2, "punct", None)]),
]

print(f"{'utterance':24s} {'UD':4s} rule  {'POS':4s} rule")
for s in EXAMPLES:
    text = " ".join(t.form for t in s.tokens)
    ud = tag_utterance(s, Backend.UD_RULES)
    pos = tag_utterance(s, Backend.POS_RULES)
    print(f"{text:24s} {ud.label.value:4s} {ud.fired_rule:>4d}  "
          f"{pos.label.value:4s} {pos.fired_rule:>4d}")

# Utterance-final tag questions are removed before the rules run:
tagged = sentence("tagq", [
    ("that", "that", "PRON", 3, "nsubj", None),
    ("'s", "be", "AUX", 3, "cop", None),
    ("good", "good", "ADJ", 0, "root", None),
    ("is", "be", "AUX", 3, "parataxis", None),
    ("n't", "not", "PART", 4, "advmod", None),
    ("it", "it", "PRON", 4, "nsubj", None),
    ("?", "?", "PUNCT", 3, "punct", None)])
stripped = strip_tag_question(tagged)
print("\nbefore:", " ".join(t.form for t in tagged.tokens))
print("after: ", " ".join(t.form for t in stripped.tokens))
result = tag_utterance(tagged)
print(f"label:  {result.label.value} (removed: {result.stripped_tag_question!r})")
