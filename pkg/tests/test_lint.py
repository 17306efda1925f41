from cait.lint import (
    LintRule,
    apply_fixes,
    lint_all,
    lint_nn_nmod,
    lint_poss_det,
)
from helpers import P, build_sentence, build_treebank


def poss_sentence(sent_id, deprel):
    # "<pron> dolly ."
    return build_sentence(sent_id, [
        ("your", "your", "PRON", 2, deprel, {"Poss": "Yes", "PronType": "Prs"}),
        ("dolly", "dolly", "NOUN", 0, "root"),
        P(2),
    ])


def nn_sentence(sent_id, deprel, with_case=False):
    # "the toy box ." or "cup of tea ." when with_case
    if with_case:
        return build_sentence(sent_id, [
            ("cup", "cup", "NOUN", 0, "root"),
            ("of", "of", "ADP", 3, "case"),
            ("tea", "tea", "NOUN", 1, deprel),
            P(1),
        ])
    return build_sentence(sent_id, [
        ("the", "the", "DET", 3, "det"),
        ("toy", "toy", "NOUN", 3, deprel),
        ("box", "box", "NOUN", 0, "root"),
        P(3),
    ])


def test_poss_det_flagged_with_suggestion():
    tb = build_treebank([poss_sentence("a", "det")])
    report = lint_poss_det(tb)
    assert report.n_flagged == 1
    assert report.findings[0].suggested_deprel == "nmod:poss"
    assert report.findings[0].token_id == 1
    assert "your dolly" in report.findings[0].context


def test_poss_det_nmod_poss_is_clean():
    tb = build_treebank([poss_sentence("a", "nmod:poss")])
    report = lint_poss_det(tb)
    assert report.n_flagged == 0
    assert report.n_candidates == 1


def test_poss_det_no_candidates_rate_zero():
    tb = build_treebank([nn_sentence("a", "compound")])
    report = lint_poss_det(tb)
    assert report.n_flagged == 0
    assert report.n_candidates == 0
    assert report.rate == 0.0


def test_nn_nmod_flagged():
    tb = build_treebank([nn_sentence("a", "nmod")])
    report = lint_nn_nmod(tb)
    assert report.n_flagged == 1
    assert report.findings[0].suggested_deprel == "compound"


def test_nn_nmod_case_child_excludes():
    tb = build_treebank([nn_sentence("a", "nmod", with_case=True)])
    report = lint_nn_nmod(tb)
    assert report.n_flagged == 0
    assert report.n_candidates == 0  # postmodifier, not a candidate at all


def test_nn_nmod_compound_counts_as_candidate():
    tb = build_treebank([nn_sentence("a", "compound")])
    report = lint_nn_nmod(tb)
    assert report.n_flagged == 0
    assert report.n_candidates == 1


def test_rate_5_of_100():
    sentences = [
        nn_sentence(f"s{i:03d}", "nmod" if i < 5 else "compound")
        for i in range(100)
    ]
    report = lint_nn_nmod(build_treebank(sentences))
    assert report.n_candidates == 100
    assert report.rate == 0.05


def test_rate_monotone_under_non_candidate_sentences():
    sentences = [
        poss_sentence(f"s{i}", "det" if i < 3 else "nmod:poss") for i in range(10)
    ]
    base = lint_poss_det(build_treebank(sentences))
    padded = lint_poss_det(
        build_treebank(sentences + [nn_sentence("pad", "compound")])
    )
    assert padded.rate == base.rate


def test_findings_sorted_by_sent_id_and_token():
    sentences = [poss_sentence("b", "det"), poss_sentence("a", "det")]
    report = lint_poss_det(build_treebank(sentences))
    assert [f.sent_id for f in report.findings] == ["a", "b"]


def test_fix_reaches_fixed_point():
    sentences = (
        [poss_sentence(f"p{i}", "det") for i in range(7)]
        + [poss_sentence(f"q{i}", "nmod:poss") for i in range(93)]
        + [nn_sentence(f"n{i}", "nmod") for i in range(5)]
        + [nn_sentence(f"m{i}", "compound") for i in range(95)]
    )
    tb = build_treebank(sentences)
    reports = lint_all(tb)
    assert reports[0].rate == 0.07
    assert reports[1].rate == 0.05
    fixed = apply_fixes(tb, [f for r in reports for f in r.findings])
    for report in lint_all(fixed):
        assert report.n_flagged == 0
    # Candidates are preserved, just relabeled.
    assert lint_poss_det(fixed).n_candidates == 100
    assert lint_nn_nmod(fixed).n_candidates == 100


def test_fix_does_not_touch_unrelated_tokens():
    tb = build_treebank([poss_sentence("a", "det")])
    fixed = apply_fixes(tb, lint_poss_det(tb).findings)
    assert fixed.sentences[0].tokens[1] == tb.sentences[0].tokens[1]
    assert fixed.sentences[0].tokens[0].deprel == "nmod:poss"
