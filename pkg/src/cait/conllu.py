"""CoNLL-U data model, reading, writing, validation and structural repair.

Handles the 10-column CoNLL-U format (UD v2) with CHILDES-style sentence
metadata (speaker role, child age), multiword-token ranges and empty nodes.
Reading can be strict (ill-formed trees are rejected) or lenient (they are
kept and reported as per-sentence diagnostics); ``normalize`` repairs any
leniently-read sentence into a valid tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterator, Mapping

__all__ = [
    "Strictness",
    "SpeakerRole",
    "Split",
    "Provenance",
    "Diagnostic",
    "ConlluError",
    "ConlluFormatError",
    "TreeValidationError",
    "Token",
    "MWTRange",
    "EmptyNode",
    "Sentence",
    "Treebank",
    "read_conllu",
    "write_conllu",
    "conllu_string",
    "validate",
    "normalize",
    "parse_feats",
    "format_feats",
    "detokenize",
    "load_label_map",
    "default_label_map",
    "load_role_map",
    "DEFAULT_ROLE_MAP",
]


class Strictness(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class SpeakerRole(Enum):
    CS = "CS"
    CDS = "CDS"
    OTHER = "OTHER"


class Split(Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"
    UNSPLIT = "unsplit"


class Provenance(Enum):
    GOLD = "gold"
    SILVER = "silver"
    PREDICTED = "predicted"


class ConlluError(Exception):
    pass


class ConlluFormatError(ConlluError):
    """Malformed CoNLL-U input (bad field count, ids, encoding, ...)."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class TreeValidationError(ConlluError):
    """A sentence violates tree invariants under strict reading."""

    def __init__(self, sent_id: str, diagnostics: list["Diagnostic"]):
        detail = "; ".join(d.message for d in diagnostics)
        super().__init__(f"sentence {sent_id}: {detail}")
        self.sent_id = sent_id
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class Diagnostic:
    """One violated invariant or applied repair, tied to token ids."""

    code: str
    message: str
    token_ids: tuple[int, ...] = ()


@dataclass
class Token:
    """One syntactic word (a regular 10-column token line)."""

    id: int
    form: str
    lemma: str = "_"
    upos: str = "_"
    xpos: str = "_"
    feats: dict[str, str] = field(default_factory=dict)
    head: int = 0
    deprel: str = "root"
    deps: str = "_"
    misc: str = "_"

    @property
    def deprel_base(self) -> str:
        return self.deprel.split(":", 1)[0]

    def effective_lemma(self) -> str:
        return self.lemma.lower() if self.lemma != "_" else self.form.lower()


@dataclass
class MWTRange:
    """A multiword-token line (``start-end`` id); excluded from scoring."""

    start: int
    end: int
    form: str
    misc: str = "_"


@dataclass
class EmptyNode:
    """An empty-node line (decimal id); preserved verbatim, never scored."""

    anchor: int
    sub: int
    columns: tuple[str, ...]


@dataclass
class Sentence:
    sent_id: str = ""
    speaker_role: SpeakerRole = SpeakerRole.OTHER
    child_age_months: float | None = None
    text: str | None = None
    tokens: list[Token] = field(default_factory=list)
    mwt: list[MWTRange] = field(default_factory=list)
    empty_nodes: list[EmptyNode] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)
    # Lenient-read violations and normalize repairs land here; excluded from
    # equality so round-trips and idempotence compare tree content only.
    diagnostics: list[Diagnostic] = field(default_factory=list, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def root(self) -> Token | None:
        for tok in self.tokens:
            if tok.head == 0:
                return tok
        return None


@dataclass
class Treebank:
    sentences: list[Sentence] = field(default_factory=list)
    split: Split = Split.UNSPLIT
    provenance: Provenance = Provenance.GOLD

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)


# ---------------------------------------------------------------------------
# Feats handling
# ---------------------------------------------------------------------------

def parse_feats(text: str) -> dict[str, str]:
    """Parse a pipe-separated FEATS string into a dict.

    Raises ValueError on items without ``=`` or duplicate keys; callers
    decide whether that is fatal (strict) or a diagnostic (lenient).
    """
    if text == "_" or text == "":
        return {}
    out: dict[str, str] = {}
    for item in text.split("|"):
        if "=" not in item:
            raise ValueError(f"malformed feature item {item!r}")
        key, value = item.split("=", 1)
        if key in out:
            raise ValueError(f"duplicate feature key {key!r}")
        out[key] = value
    return out


def format_feats(feats: Mapping[str, str]) -> str:
    """Serialize feats canonically: alphabetical (case-insensitive), piped."""
    if not feats:
        return "_"
    return "|".join(f"{k}={feats[k]}" for k in sorted(feats, key=str.lower))


# ---------------------------------------------------------------------------
# Metadata extraction
# ---------------------------------------------------------------------------

DEFAULT_ROLE_MAP: dict[str, SpeakerRole] = {
    "chi": SpeakerRole.CS,
    "mot": SpeakerRole.CDS,
    "fat": SpeakerRole.CDS,
    "adu": SpeakerRole.CDS,
    "inv": SpeakerRole.CDS,
    "caregiver": SpeakerRole.CDS,
    "adult": SpeakerRole.CDS,
}

_COMMENT_KV = re.compile(r"^#\s*([^=]+?)\s*=\s*(.*)$")
_CHAT_AGE = re.compile(r"^(\d+);(\d+)(?:\.(\d+))?$")

# Mean Gregorian month, used to fold the day part of CHAT ages into months.
_DAYS_PER_MONTH = 30.4375


def parse_chat_age(value: str) -> float | None:
    """Parse an age given either as CHAT ``Y;MM.DD`` or as plain months."""
    value = value.strip()
    m = _CHAT_AGE.match(value)
    if m:
        years, months = int(m.group(1)), int(m.group(2))
        days = int(m.group(3)) if m.group(3) else 0
        return years * 12 + months + days / _DAYS_PER_MONTH
    try:
        age = float(value)
    except ValueError:
        return None
    return age if age >= 0 else None


def _extract_metadata(
    comments: list[str], role_map: Mapping[str, SpeakerRole]
) -> tuple[str | None, str | None, SpeakerRole, float | None, list[Diagnostic]]:
    sent_id = None
    text = None
    role = SpeakerRole.OTHER
    age: float | None = None
    diags: list[Diagnostic] = []
    for line in comments:
        m = _COMMENT_KV.match(line)
        if not m:
            continue
        key = m.group(1).lower()
        value = m.group(2)
        if key == "sent_id":
            sent_id = value
        elif key == "text":
            text = value
        elif key == "speaker":
            role = role_map.get(value.strip().lower(), SpeakerRole.OTHER)
        elif key in ("child_age", "age_months"):
            age = parse_chat_age(value)
            if age is None:
                diags.append(Diagnostic("bad-age", f"unparseable age {value!r}"))
    return sent_id, text, role, age, diags


def load_role_map(source: str | Path) -> dict[str, SpeakerRole]:
    """Load a two-column TSV mapping speaker codes to CS/CDS/OTHER."""
    mapping: dict[str, SpeakerRole] = {}
    for raw in Path(source).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        code, _, role = line.partition("\t")
        mapping[code.strip().lower()] = SpeakerRole(role.strip().upper())
    return mapping


# ---------------------------------------------------------------------------
# Reading
# ---------------------------------------------------------------------------

_INT_ID = re.compile(r"^\d+$")
_MWT_ID = re.compile(r"^(\d+)-(\d+)$")
_EMPTY_ID = re.compile(r"^(\d+)\.(\d+)$")


def _read_text(source) -> str:
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            return data.decode("utf-8")
        return data
    if isinstance(source, bytes):
        return source.decode("utf-8")
    return Path(source).read_text(encoding="utf-8")


def read_conllu(
    source: str | Path | bytes | IO,
    strictness: Strictness = Strictness.STRICT,
    role_map: Mapping[str, SpeakerRole] | None = None,
) -> Treebank:
    """Read CoNLL-U from a path, byte string or file object.

    Format errors (field count, non-integer ids/heads, sentences without
    tokens) abort in both modes. Tree-level violations abort only under
    STRICT; under LENIENT they are attached to the sentence as diagnostics
    for a later ``normalize`` pass.
    """
    strict = strictness is Strictness.STRICT
    roles = DEFAULT_ROLE_MAP if role_map is None else role_map
    try:
        text = _read_text(source)
    except UnicodeDecodeError as exc:
        raise ConlluFormatError(f"input is not valid UTF-8: {exc}", 0) from None
    if text.startswith("﻿"):
        text = text[1:]

    tb = Treebank()
    seen_ids: set[str] = set()

    comments: list[str] = []
    tokens: list[Token] = []
    token_lines: list[int] = []
    mwt: list[MWTRange] = []
    empty: list[EmptyNode] = []
    parse_diags: list[Diagnostic] = []
    block_line = 0

    def flush(at_line: int) -> None:
        nonlocal comments, tokens, token_lines, mwt, empty, parse_diags
        if not comments and not tokens:
            return
        if not tokens:
            raise ConlluFormatError("sentence block has no token lines", at_line)
        seen: dict[int, int] = {}
        for tid, line_no in zip((t.id for t in tokens), token_lines):
            if tid in seen:
                if strict:
                    raise ConlluFormatError(f"duplicate token id {tid}", line_no)
                parse_diags.append(
                    Diagnostic("duplicate-id", f"duplicate token id {tid}", (tid,))
                )
            seen.setdefault(tid, line_no)
        sent_id, stext, role, age, meta_diags = _extract_metadata(comments, roles)
        if sent_id is None:
            sent_id = f"s{len(tb.sentences) + 1}"
        sentence = Sentence(
            sent_id=sent_id,
            speaker_role=role,
            child_age_months=age,
            text=stext,
            tokens=tokens,
            mwt=mwt,
            empty_nodes=empty,
            comments=comments,
        )
        tree_diags = validate(sentence)
        if sent_id in seen_ids:
            tree_diags = tree_diags + [
                Diagnostic("duplicate-sent-id", f"duplicate sent_id {sent_id!r}")
            ]
        seen_ids.add(sent_id)
        if strict and tree_diags:
            raise TreeValidationError(sent_id, tree_diags)
        sentence.diagnostics = parse_diags + meta_diags + tree_diags
        tb.sentences.append(sentence)
        comments, tokens, token_lines = [], [], []
        mwt, empty, parse_diags = [], [], []

    for line_no, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r")
        if line == "":
            flush(line_no)
            continue
        if line.startswith("#"):
            if not tokens and not comments:
                block_line = line_no
            comments.append(line)
            continue
        fields = line.split("\t")
        if len(fields) != 10:
            raise ConlluFormatError(
                f"expected 10 tab-separated fields, got {len(fields)}", line_no
            )
        if not tokens and not comments:
            block_line = line_no
        idf = fields[0]
        if _INT_ID.match(idf):
            if not _INT_ID.match(fields[6]) and fields[6] != "_":
                raise ConlluFormatError(f"non-integer head {fields[6]!r}", line_no)
            try:
                feats = parse_feats(fields[5])
            except ValueError as exc:
                if strict:
                    raise ConlluFormatError(str(exc), line_no) from None
                parse_diags.append(Diagnostic("bad-feats", f"{exc} (kept first value)"))
                feats = _salvage_feats(fields[5])
            head = 0 if fields[6] == "_" else int(fields[6])
            tokens.append(
                Token(
                    id=int(idf),
                    form=fields[1],
                    lemma=fields[2],
                    upos=fields[3],
                    xpos=fields[4],
                    feats=feats,
                    head=head,
                    deprel=fields[7],
                    deps=fields[8],
                    misc=fields[9],
                )
            )
            token_lines.append(line_no)
        elif m := _MWT_ID.match(idf):
            mwt.append(
                MWTRange(int(m.group(1)), int(m.group(2)), fields[1], fields[9])
            )
        elif m := _EMPTY_ID.match(idf):
            empty.append(EmptyNode(int(m.group(1)), int(m.group(2)), tuple(fields)))
        else:
            raise ConlluFormatError(f"non-integer id {idf!r}", line_no)

    flush(block_line or 1)
    return tb


def _salvage_feats(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    if text in ("_", ""):
        return out
    for item in text.split("|"):
        if "=" in item:
            key, value = item.split("=", 1)
            out.setdefault(key, value)
    return out


# ---------------------------------------------------------------------------
# Writing
# ---------------------------------------------------------------------------

def sentence_lines(sentence: Sentence) -> list[str]:
    lines = list(sentence.comments)
    mwt_at = {r.start: r for r in sentence.mwt}
    empty_after: dict[int, list[EmptyNode]] = {}
    for node in sentence.empty_nodes:
        empty_after.setdefault(node.anchor, []).append(node)
    for node in empty_after.get(0, []):
        lines.append("\t".join(node.columns))
    for tok in sentence.tokens:
        r = mwt_at.get(tok.id)
        if r is not None:
            lines.append(
                "\t".join(
                    [f"{r.start}-{r.end}", r.form, "_", "_", "_", "_", "_", "_", "_", r.misc]
                )
            )
        lines.append(
            "\t".join(
                [
                    str(tok.id),
                    tok.form,
                    tok.lemma,
                    tok.upos,
                    tok.xpos,
                    format_feats(tok.feats),
                    str(tok.head),
                    tok.deprel,
                    tok.deps,
                    tok.misc,
                ]
            )
        )
        for node in empty_after.get(tok.id, []):
            lines.append("\t".join(node.columns))
    return lines


def conllu_string(tb: Treebank) -> str:
    """Serialize a treebank; ends with one blank line after the last sentence."""
    if not tb.sentences:
        return ""
    chunks = []
    for sentence in tb.sentences:
        chunks.append("\n".join(sentence_lines(sentence)))
    return "\n\n".join(chunks) + "\n\n"


def write_conllu(tb: Treebank, sink: str | Path | IO) -> None:
    text = conllu_string(tb)
    if hasattr(sink, "write"):
        try:
            sink.write(text)
        except TypeError:
            sink.write(text.encode("utf-8"))
        return
    Path(sink).write_text(text, encoding="utf-8")


def detokenize(sentence: Sentence) -> str:
    """Rebuild surface text from forms, honouring MISC SpaceAfter=No."""
    parts: list[str] = []
    covered_by = {r.start: r for r in sentence.mwt}
    skip_until = 0
    for tok in sentence.tokens:
        if tok.id <= skip_until:
            continue
        r = covered_by.get(tok.id)
        if r is not None:
            form, misc = r.form, r.misc
            skip_until = r.end
        else:
            form, misc = tok.form, tok.misc
        parts.append(form)
        if "SpaceAfter=No" not in misc:
            parts.append(" ")
    return "".join(parts).rstrip()


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(sentence: Sentence) -> list[Diagnostic]:
    """Check every sentence invariant; empty result means a valid tree.

    Total function: never raises, reports all violations it can name.
    Cycles are found by walking from every token toward head 0.
    """
    diags: list[Diagnostic] = []
    toks = sentence.tokens
    n = len(toks)
    ids = [t.id for t in toks]
    ids_ok = ids == list(range(1, n + 1))
    if not ids_ok:
        diags.append(
            Diagnostic("token-ids", f"token ids are not exactly 1..{n} in order")
        )

    id_set = set(ids)
    for tok in toks:
        if tok.head == tok.id:
            diags.append(
                Diagnostic("self-loop", f"self-loop at token {tok.id}", (tok.id,))
            )
        elif tok.head != 0 and tok.head not in id_set:
            diags.append(
                Diagnostic(
                    "head-range",
                    f"token {tok.id} head {tok.head} is out of range",
                    (tok.id,),
                )
            )
        if (tok.head == 0) != (tok.deprel == "root"):
            diags.append(
                Diagnostic(
                    "root-deprel",
                    f"token {tok.id}: head {tok.head} with deprel {tok.deprel!r}",
                    (tok.id,),
                )
            )

    roots = [t.id for t in toks if t.head == 0]
    if n and not roots:
        diags.append(Diagnostic("no-root", "no root token"))
    elif len(roots) > 1:
        diags.append(
            Diagnostic(
                "multiple-roots",
                "multiple roots: tokens " + ", ".join(map(str, roots)),
                tuple(roots),
            )
        )

    if ids_ok:
        for members in _find_cycles(toks):
            if len(members) == 1:
                continue  # 1-cycles already reported as self-loops
            diags.append(
                Diagnostic(
                    "cycle",
                    "cycle {" + ",".join(map(str, sorted(members))) + "}",
                    tuple(sorted(members)),
                )
            )

    seen_ranges: list[MWTRange] = []
    for r in sentence.mwt:
        if r.start >= r.end:
            diags.append(
                Diagnostic("mwt-range", f"invalid multiword range {r.start}-{r.end}")
            )
        elif r.start not in id_set or r.end not in id_set:
            diags.append(
                Diagnostic(
                    "mwt-range",
                    f"multiword range {r.start}-{r.end} covers missing token ids",
                )
            )
        for prev in seen_ranges:
            if r.start <= prev.end and prev.start <= r.end:
                diags.append(
                    Diagnostic(
                        "mwt-overlap",
                        f"multiword ranges {prev.start}-{prev.end} and "
                        f"{r.start}-{r.end} overlap",
                    )
                )
        seen_ranges.append(r)
    return diags


def _find_cycles(toks: list[Token]) -> list[frozenset[int]]:
    head_of = {t.id: t.head for t in toks}
    reaches_end: set[int] = {0}
    on_cycle: set[int] = set()
    cycles: list[frozenset[int]] = []
    for tok in toks:
        path: list[int] = []
        index: dict[int, int] = {}
        cur = tok.id
        while True:
            if cur in reaches_end or cur in on_cycle:
                reaches_end.update(path)
                break
            if cur in index:
                members = path[index[cur]:]
                cycles.append(frozenset(members))
                on_cycle.update(members)
                reaches_end.update(path[: index[cur]])
                break
            index[cur] = len(path)
            path.append(cur)
            nxt = head_of.get(cur)
            if nxt is None or (nxt != 0 and nxt not in head_of):
                # dangling head: chain ends, no cycle
                reaches_end.update(path)
                break
            cur = nxt
    return cycles


# ---------------------------------------------------------------------------
# Normalization and repair
# ---------------------------------------------------------------------------

def normalize(
    sentence: Sentence, label_map: Mapping[str, str] | None = None
) -> Sentence:
    """Relabel through ``label_map`` and repair structure into a valid tree.

    Repairs, in order: renumber token ids to 1..n (heads follow, with
    reset-style duplicate ids resolved to the nearest preceding occurrence),
    establish a single root (zero roots: shallowest cycle-free token;
    multiple roots: later ones re-attach to the first as parataxis),
    re-attach dangling heads to the root, break cycles by re-heading the
    smallest-id member to the root, and reconcile the deprel-root pairing.
    Every repair is logged as a diagnostic on the returned sentence.
    Token count is preserved and the result always passes ``validate``.
    """
    label_map = label_map or {}
    diags: list[Diagnostic] = []
    toks = [replace(t, feats=dict(t.feats)) for t in sentence.tokens]
    mwt = [replace(r) for r in sentence.mwt]
    empty = [replace(e) for e in sentence.empty_nodes]

    for tok in toks:
        mapped = label_map.get(tok.deprel)
        if mapped is not None and mapped != tok.deprel:
            diags.append(
                Diagnostic(
                    "relabel", f"token {tok.id}: {tok.deprel} -> {mapped}", (tok.id,)
                )
            )
            tok.deprel = mapped

    toks, mwt, empty, renumber_diags = _renumber(toks, mwt, empty)
    diags.extend(renumber_diags)

    n = len(toks)
    if n == 0:
        return replace(
            sentence, tokens=toks, mwt=mwt, empty_nodes=empty, diagnostics=diags
        )

    by_id = {t.id: t for t in toks}

    # Single root.
    roots = [t for t in toks if t.head == 0]
    if not roots:
        chosen = _shallowest_cycle_free(toks)
        diags.append(
            Diagnostic("add-root", f"re-headed token {chosen.id} to root", (chosen.id,))
        )
        chosen.head = 0
        chosen.deprel = "root"
        root_tok = chosen
    else:
        root_tok = roots[0]
        for extra in roots[1:]:
            extra.head = root_tok.id
            extra.deprel = "parataxis"
            diags.append(
                Diagnostic(
                    "extra-root",
                    f"re-attached extra root {extra.id} under {root_tok.id} "
                    "as parataxis",
                    (extra.id,),
                )
            )

    # Dangling heads and self-loops attach to the root.
    for tok in toks:
        if tok is root_tok:
            continue
        if tok.head == tok.id or tok.head not in by_id:
            diags.append(
                Diagnostic(
                    "reattach",
                    f"re-headed token {tok.id} (head {tok.head}) to the root",
                    (tok.id,),
                )
            )
            tok.head = root_tok.id
            if tok.deprel == "root":
                tok.deprel = "dep"

    # Break remaining cycles: smallest-id member re-heads to the root.
    while True:
        cycles = _find_cycles(toks)
        if not cycles:
            break
        members = sorted(min(cycles, key=min))
        fix = by_id[members[0]]
        diags.append(
            Diagnostic(
                "break-cycle",
                "broke cycle {" + ",".join(map(str, members)) + "} at token "
                f"{fix.id}",
                tuple(members),
            )
        )
        fix.head = root_tok.id
        if fix.deprel == "root":
            fix.deprel = "dep"

    # deprel "root" if and only if head 0.
    for tok in toks:
        if tok.head == 0 and tok.deprel != "root":
            diags.append(
                Diagnostic("root-label", f"token {tok.id} relabeled root", (tok.id,))
            )
            tok.deprel = "root"
        elif tok.head != 0 and tok.deprel == "root":
            diags.append(
                Diagnostic("root-label", f"token {tok.id} relabeled dep", (tok.id,))
            )
            tok.deprel = "dep"

    # Drop multiword ranges the repaired sentence cannot support.
    valid_mwt: list[MWTRange] = []
    prev_end = 0
    for r in sorted(mwt, key=lambda r: (r.start, r.end)):
        if r.start < r.end and 1 <= r.start and r.end <= n and r.start > prev_end:
            valid_mwt.append(r)
            prev_end = r.end
        else:
            diags.append(
                Diagnostic("drop-mwt", f"dropped multiword range {r.start}-{r.end}")
            )
    return replace(
        sentence, tokens=toks, mwt=valid_mwt, empty_nodes=empty, diagnostics=diags
    )


def _renumber(
    toks: list[Token], mwt: list[MWTRange], empty: list[EmptyNode]
) -> tuple[list[Token], list[MWTRange], list[EmptyNode], list[Diagnostic]]:
    n = len(toks)
    old_ids = [t.id for t in toks]
    if old_ids == list(range(1, n + 1)):
        return toks, mwt, empty, []
    diags = [Diagnostic("renumber", f"renumbered token ids to 1..{n}")]
    positions: dict[int, list[int]] = {}
    for pos, tid in enumerate(old_ids):
        positions.setdefault(tid, []).append(pos)

    def resolve(old_head: int, dep_pos: int) -> int:
        # Nearest occurrence at or before the dependent, else the first after;
        # mirrors mid-sentence index resets where references stay local.
        occ = positions.get(old_head)
        if not occ:
            return -1
        before = [p for p in occ if p < dep_pos]
        if before:
            return before[-1] + 1
        after = [p for p in occ if p > dep_pos]
        if after:
            return after[0] + 1
        return -1

    old_first = {tid: occ[0] + 1 for tid, occ in positions.items()}
    for pos, tok in enumerate(toks):
        tok.id = pos + 1
        if tok.head != 0:
            new_head = resolve(tok.head, pos)
            tok.head = new_head if new_head > 0 else n + 1  # dangling, fixed later
    for r in mwt:
        r.start = old_first.get(r.start, 0)
        r.end = old_first.get(r.end, 0)
    for node in empty:
        anchor = old_first.get(node.anchor, 0)
        node.anchor = anchor
        cols = list(node.columns)
        cols[0] = f"{anchor}.{node.sub}"
        node.columns = tuple(cols)
    return toks, mwt, empty, diags


def _shallowest_cycle_free(toks: list[Token]) -> Token:
    by_id = {t.id: t for t in toks}
    on_cycle: set[int] = set()
    for members in _find_cycles(toks):
        on_cycle.update(members)
    best: tuple[int, int] | None = None
    best_tok: Token | None = None
    for tok in toks:
        if tok.id in on_cycle:
            continue
        depth = 0
        cur = tok
        seen = set()
        while cur.head != 0 and cur.head in by_id and cur.id not in seen:
            if cur.head in on_cycle:
                break
            seen.add(cur.id)
            cur = by_id[cur.head]
            depth += 1
        key = (depth, tok.id)
        if best is None or key < best:
            best = key
            best_tok = tok
    if best_tok is not None:
        return best_tok
    return min(toks, key=lambda t: t.id)  # everything sits on a cycle


# ---------------------------------------------------------------------------
# Label maps
# ---------------------------------------------------------------------------

def load_label_map(source: str | Path) -> dict[str, str]:
    """Load a two-column TSV (source_label TAB ud_label) deprel map."""
    mapping: dict[str, str] = {}
    for raw in Path(source).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        src, _, dst = line.partition("\t")
        if dst:
            mapping[src.strip()] = dst.strip()
    return mapping


def default_label_map() -> dict[str, str]:
    """The packaged ClearNLP-style to UD v2 deprel correspondence."""
    mapping: dict[str, str] = {}
    data = resources.files("cait").joinpath("data/deprel_map_clearnlp.tsv")
    for raw in data.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        src, _, dst = line.partition("\t")
        if dst:
            mapping[src.strip()] = dst.strip()
    return mapping
