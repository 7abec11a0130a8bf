"""POS tagging, shallow chunking, and limited PP attachment.

Tagging follows the classic transformation-rule architecture: a lexicon
assigns each token its most frequent tag (with a small unknown-word
heuristic), then an ordered list of contextual rewrite rules patches the
initial assignment.  Rules and lexicon are plain data files so the
bundled versions can be replaced per domain.

Chunking is regex-over-tags.  At each token the NP, VP and PP patterns
compete and the longest match wins (NP preferred on ties); uncovered
tokens become one-token O chunks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import Sentence, Token

TAGSET = frozenset(
    """
    CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$
    RB RBR RBS RP SYM TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB
    , . : ( ) '' ``
    """.split()
)

_PUNCT_TAGS = {
    ",": ",",
    ".": ".",
    "?": ".",
    "!": ".",
    ";": ":",
    ":": ":",
    "(": "(",
    ")": ")",
    "[": "(",
    "]": ")",
    '"': "''",
    "'": "''",
}

_TEMPLATES = {
    "PREVTAG": 1,
    "NEXTTAG": 1,
    "PREV1OR2TAG": 1,
    "NEXT1OR2TAG": 1,
    "PREVWD": 1,
    "NEXTWD": 1,
    "CURWD": 1,
    "SURROUNDTAG": 2,
    "PREVBIGRAM": 2,
    "WDPREVTAG": 2,  # previous tag is arg1 and current word is arg2
}


@dataclass(frozen=True)
class TransformationRule:
    from_tag: str
    to_tag: str
    template: str
    args: tuple[str, ...]

    def applies(self, tokens: Sequence[Token], tags: list[str], i: int) -> bool:
        def tag(j: int) -> str | None:
            return tags[j] if 0 <= j < len(tags) else None

        def word(j: int) -> str | None:
            return tokens[j].norm if 0 <= j < len(tokens) else None

        t = self.template
        a = self.args
        if t == "PREVTAG":
            return tag(i - 1) == a[0]
        if t == "NEXTTAG":
            return tag(i + 1) == a[0]
        if t == "PREV1OR2TAG":
            return a[0] in (tag(i - 1), tag(i - 2))
        if t == "NEXT1OR2TAG":
            return a[0] in (tag(i + 1), tag(i + 2))
        if t == "PREVWD":
            return word(i - 1) == a[0]
        if t == "NEXTWD":
            return word(i + 1) == a[0]
        if t == "CURWD":
            return word(i) == a[0]
        if t == "SURROUNDTAG":
            return tag(i - 1) == a[0] and tag(i + 1) == a[1]
        if t == "PREVBIGRAM":
            return tag(i - 2) == a[0] and tag(i - 1) == a[1]
        if t == "WDPREVTAG":
            return tag(i - 1) == a[0] and word(i) == a[1]
        raise ValueError(f"unknown template {t!r}")


def load_lexicon(path: str | Path) -> dict[str, list[str]]:
    """Lexicon file: ``word TAB tag1,tag2,...`` with the most frequent tag first."""
    lexicon: dict[str, list[str]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            word, tags = line.split("\t")
        except ValueError:
            raise ValueError(f"{path}:{lineno}: expected 'word<TAB>tags'")
        taglist = [t.strip() for t in tags.split(",") if t.strip()]
        bad = [t for t in taglist if t not in TAGSET]
        if bad or not taglist:
            raise ValueError(f"{path}:{lineno}: bad tags {bad or tags!r}")
        lexicon[word] = taglist
    return lexicon


def load_rules(path: str | Path) -> list[TransformationRule]:
    """Rule file: one ``from to TEMPLATE arg [arg]`` transformation per line."""
    rules = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 4 or parts[2] not in _TEMPLATES:
            raise ValueError(f"{path}:{lineno}: expected 'from to TEMPLATE arg'")
        nargs = _TEMPLATES[parts[2]]
        if len(parts) != 3 + nargs:
            raise ValueError(f"{path}:{lineno}: {parts[2]} takes {nargs} argument(s)")
        if parts[0] == parts[1]:
            raise ValueError(f"{path}:{lineno}: rule must change the tag")
        rules.append(
            TransformationRule(parts[0], parts[1], parts[2], tuple(parts[3:]))
        )
    return rules


def _initial_tag(token: Token, index: int, lexicon: dict[str, list[str]]) -> str:
    if token.norm in _PUNCT_TAGS:
        return _PUNCT_TAGS[token.norm]
    entry = lexicon.get(token.surface) or lexicon.get(token.norm)
    if entry:
        return entry[0]
    if token.surface.isdigit():
        return "CD"
    if token.surface[:1].isupper() and index > 0:
        return "NNP"
    return "NN"


def pos_tag(
    sentence: Sentence,
    lexicon: dict[str, list[str]],
    rules: Sequence[TransformationRule],
) -> list[str]:
    """Tag every token: lexicon lookup, then ordered contextual rules.

    Each rule scans left to right and retags in place, so later positions
    see the effect of earlier rewrites within the same rule pass.
    """
    tokens = sentence.tokens
    tags = [_initial_tag(tok, i, lexicon) for i, tok in enumerate(tokens)]
    for rule in rules:
        for i in range(len(tags)):
            if tags[i] == rule.from_tag and rule.applies(tokens, tags, i):
                tags[i] = rule.to_tag
    return tags


class Tagger:
    """Immutable lexicon + rules bundle."""

    def __init__(self, lexicon: dict[str, list[str]], rules: Sequence[TransformationRule]):
        self.lexicon = dict(lexicon)
        self.rules = tuple(rules)

    @classmethod
    def from_files(cls, lexicon_path: str | Path, rules_path: str | Path) -> "Tagger":
        return cls(load_lexicon(lexicon_path), load_rules(rules_path))

    def tag(self, sentence: Sentence) -> list[str]:
        return pos_tag(sentence, self.lexicon, self.rules)


# ---------------------------------------------------------------------------
# Chunking


@dataclass(frozen=True)
class Chunk:
    kind: str  # NP | VP | PP | O
    token_span: tuple[int, int]  # inclusive
    head_index: int
    attach: int | None = None  # index of the host NP chunk, set by attach_pp

    def indices(self) -> range:
        return range(self.token_span[0], self.token_span[1] + 1)


_DET = r"(?:<DT>|<PDT>|<PRP\$>)"
_MOD = r"(?:<JJ>|<VBN>|<VBG>)"
_NOUN = r"(?:<NN>|<NNS>|<NNP>|<NNPS>)"
_QNP = rf"(?:<''>{_MOD}*{_NOUN}+(?:<,>|<\.>)?<''>)"
_NP_RE = re.compile(rf"(?:{_DET}?{_MOD}*{_NOUN}+{_QNP}?|{_QNP})")
_VERB = r"(?:<MD>|<VB>|<VBD>|<VBZ>|<VBP>|<VBN>|<VBG>)"
_VP_RE = re.compile(rf"{_VERB}+(?:<RB>)*")
_PP_RE = re.compile(rf"<IN>{_NP_RE.pattern}")


def _encode(tags: Sequence[str]) -> tuple[str, list[int]]:
    offsets = [0]
    parts = []
    for t in tags:
        parts.append(f"<{t}>")
        offsets.append(offsets[-1] + len(t) + 2)
    return "".join(parts), offsets


def chunk(tokens: Sequence[Token], tags: Sequence[str]) -> list[Chunk]:
    """Partition the sentence into NP/VP/PP chunks with O filling gaps."""
    if len(tokens) != len(tags):
        raise ValueError("tags must align with tokens")
    encoded, offsets = _encode(tags)
    pos_of = {off: i for i, off in enumerate(offsets)}

    chunks: list[Chunk] = []
    i = 0
    n = len(tags)
    while i < n:
        start = offsets[i]
        best_kind, best_end = None, start
        for kind, rx in (("NP", _NP_RE), ("VP", _VP_RE), ("PP", _PP_RE)):
            m = rx.match(encoded, start)
            if m and m.end() > best_end:
                best_kind, best_end = kind, m.end()
        if best_kind is None:
            chunks.append(Chunk("O", (i, i), i))
            i += 1
            continue
        last = pos_of[best_end] - 1
        chunks.append(Chunk(best_kind, (i, last), _head_index(tags, i, last, best_kind)))
        i = last + 1
    return chunks


def _head_index(tags: Sequence[str], first: int, last: int, kind: str) -> int:
    if kind == "NP":
        for j in range(last, first - 1, -1):
            if tags[j].startswith("NN"):
                return j
        return last
    if kind == "VP":
        for j in range(last, first - 1, -1):
            if tags[j].startswith("VB") or tags[j] == "MD":
                return j
        return first
    return first  # PP head is the preposition


ATTACH_PREPOSITIONS = frozenset({"of", "for", "in", "with", "on"})


def attach_pp(chunks: Sequence[Chunk], tokens: Sequence[Token]) -> list[Chunk]:
    """Link of/for/in/with/on PPs to an immediately preceding NP.

    The linked pair behaves as one extended NP for slot extraction; all
    other PPs are left unattached.
    """
    out = list(chunks)
    for idx, ch in enumerate(out):
        if ch.kind != "PP" or idx == 0:
            continue
        prep = tokens[ch.token_span[0]].norm
        if prep in ATTACH_PREPOSITIONS and out[idx - 1].kind == "NP":
            out[idx] = Chunk(ch.kind, ch.token_span, ch.head_index, attach=idx - 1)
    return out


def extended_np_span(chunks: Sequence[Chunk], np_index: int) -> tuple[int, int]:
    """Token span of an NP plus any PP linked to it."""
    first, last = chunks[np_index].token_span
    j = np_index + 1
    while j < len(chunks) and chunks[j].attach == np_index:
        last = chunks[j].token_span[1]
        j += 1
    return first, last


def np_core_span(chunks: Sequence[Chunk], index: int) -> tuple[int, int]:
    """For a PP chunk, the span of its internal NP; otherwise the chunk span."""
    ch = chunks[index]
    if ch.kind == "PP":
        return (ch.token_span[0] + 1, ch.token_span[1])
    return ch.token_span
