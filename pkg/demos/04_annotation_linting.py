"""Finding the two systematic gold-annotation inconsistencies: possessive
pronouns as det, and noun-noun premodifiers as nmod.
"""

from cait.conllu import Sentence, Token, Treebank
from cait.lint import apply_fixes, lint_all


def sentence(sent_id, rows):
    tokens = [
        Token(id=i, form=f, lemma=f, upos=u, head=h, deprel=d,
              feats=dict(feats or {}))
        for i, (f, u, h, d, feats) in enumerate(rows, 1)
    ]
    return Sentence(sent_id=sent_id, tokens=tokens)


tb = Treebank([
    # "his coffee" with the possessive attached as det: inconsistent.
    sentence("a", [
        ("his", "PRON", 2, "det", {"Poss": "Yes"}),
        ("coffee", "NOUN", 0, "root", None),
        (".", "PUNCT", 2, "punct", None)]),
    # "your dolly" annotated nmod:poss: consistent.
    sentence("b", [
        ("your", "PRON", 2, "nmod:poss", {"Poss": "Yes"}),
        ("dolly", "NOUN", 0, "root", None),
        (".", "PUNCT", 2, "punct", None)]),
    # "grape juice" with the premodifier as nmod: inconsistent.
    sentence("c", [
        ("grape", "NOUN", 2, "nmod", None),
        ("juice", "NOUN", 0, "root", None),
        (".", "PUNCT", 2, "punct", None)]),
    # "cup of tea": nmod with a case child is a true PP, left alone.
    sentence("d", [
        ("cup", "NOUN", 0, "root", None),
        ("of", "ADP", 3, "case", None),
        ("tea", "NOUN", 1, "nmod", None),
        (".", "PUNCT", 1, "punct", None)]),
])

reports = lint_all(tb)
for report in reports:
    print(f"{report.rule.value}: {report.n_flagged} flagged of "
          f"{report.n_candidates} candidates (rate {report.rate:.2f})")
    for f in report.findings:
        print(f"  {f.sent_id} token {f.token_id}: {f.gold_deprel} -> "
              f"{f.suggested_deprel}   [{f.context}]")

# Applying every suggestion reaches a fixed point: re-linting is clean.
fixed = apply_fixes(tb, [f for r in reports for f in r.findings])
print("after fixes:", [r.n_flagged for r in lint_all(fixed)])
