"""Reading, validating and repairing CoNLL-U.

Builds a small treebank in memory, writes it out, reads it back, then
takes a structurally broken sentence through lenient reading and
`normalize` repair.
"""

import io

from cait.conllu import (
    Strictness,
    default_label_map,
    normalize,
    read_conllu,
    validate,
    write_conllu,
)

# A well-formed utterance with CHILDES-style metadata.
good = """\
# sent_id = demo-1
# speaker = MOT
# child_age = 2;06.10
# text = it's a kite.
1\tit\tit\tPRON\tPRP\t_\t4\tnsubj\t_\tSpaceAfter=No
2\t's\tbe\tAUX\tVBZ\t_\t4\tcop\t_\t_
3\ta\ta\tDET\tDT\t_\t4\tdet\t_\t_
4\tkite\tkite\tNOUN\tNN\t_\t0\troot\t_\tSpaceAfter=No
5\t.\t.\tPUNCT\t.\t_\t4\tpunct\t_\t_

"""

tb = read_conllu(io.StringIO(good))
sentence = tb.sentences[0]
print("sent_id:       ", sentence.sent_id)
print("speaker role:  ", sentence.speaker_role.value)
print("child age (mo):", round(sentence.child_age_months, 2))
print("violations:    ", validate(sentence))

# Round trip is byte-exact for canonical input.
out = io.StringIO()
write_conllu(tb, out)
print("round-trip byte-identical:", out.getvalue() == good)

# Now a broken sentence: two roots, a dangling head, a ClearNLP label.
broken = """\
# sent_id = demo-2
1\tshe\tshe\tPRON\tPRP\t_\t2\tnsubjpass\t_\t_
2\tleft\tleave\tVERB\tVBD\t_\t0\troot\t_\t_
3\tyesterday\tyesterday\tNOUN\tNN\t_\t9\tnmod\t_\t_
4\tokay\tokay\tINTJ\tUH\t_\t0\troot\t_\t_

"""

# Strict reading refuses it; lenient reading keeps it with diagnostics.
lenient = read_conllu(io.StringIO(broken), Strictness.LENIENT)
bad = lenient.sentences[0]
for diag in bad.diagnostics:
    print("diagnostic:", diag.code, "-", diag.message)

# normalize relabels through the packaged ClearNLP table and repairs the
# structure; the result always validates cleanly.
repaired = normalize(bad, default_label_map())
print("after repair, violations:", validate(repaired))
for tok in repaired.tokens:
    print(f"  {tok.id}\t{tok.form}\thead={tok.head}\t{tok.deprel}")
for diag in repaired.diagnostics:
    print("repair:", diag.code, "-", diag.message)
