"""Trigger-pattern inventory compilation and candidate extraction.

Patterns are short token-level templates ("known" "as", "called" QUOTE,
...).  The inventory lives in a plain text file so it can be extended per
domain without touching code; compiling it yields an immutable cascade
that is scanned over every sentence to nominate candidate sentences for
the downstream filters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document, Sentence, segment_sentences

VERB_MARKER = "verb-marker"
DESCRIPTOR_MARKER = "descriptor-marker"
MIXED = "mixed"

_DESCRIPTOR_LEXEMES = {"term", "word"}


class PatternSyntaxError(ValueError):
    """Raised for malformed pattern files, carrying the line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"pattern file line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Atom:
    """One slot of a pattern: a literal, an alternative set, or a quote."""

    kind: str  # "lit" | "alt" | "quote"
    values: frozenset[str] = frozenset()

    def matches(self, norm: str) -> bool:
        if self.kind == "quote":
            return norm in ('"', "'")
        return norm in self.values


@dataclass(frozen=True)
class TriggerPattern:
    id: str
    sequence: tuple[Atom, ...]
    marker_index: int
    marker_lexeme: str
    category: str
    priority: int
    order: int  # position in the pattern file, used as final tiebreak

    @property
    def marker_lexemes(self) -> frozenset[str]:
        return self.sequence[self.marker_index].values

    def __len__(self) -> int:
        return len(self.sequence)


@dataclass(frozen=True)
class TriggerMatch:
    pattern_id: str
    sentence_ref: tuple[str, int]
    token_span: tuple[int, int]  # inclusive token indices
    marker_index: int


@dataclass(frozen=True)
class EmoCandidate:
    sentence: Sentence
    matches: tuple[TriggerMatch, ...]

    def __post_init__(self):
        if not self.matches:
            raise ValueError("candidate requires at least one match")


class Cascade:
    """An immutable, compiled pattern inventory."""

    def __init__(self, patterns: Sequence[TriggerPattern]):
        self.patterns = tuple(patterns)

    def __len__(self) -> int:
        return len(self.patterns)

    def by_id(self, pattern_id: str) -> TriggerPattern:
        for pat in self.patterns:
            if pat.id == pattern_id:
                return pat
        raise KeyError(pattern_id)


_ATOM_RE = re.compile(r'"([^"]*)"|\{([^{}]*)\}|(QUOTE)|(\w+=\S+)')


def _parse_atoms(lineno: int, body: str):
    atoms: list[Atom] = []
    options: dict[str, str] = {}
    pos = 0
    for m in _ATOM_RE.finditer(body):
        if body[pos : m.start()].strip():
            raise PatternSyntaxError(lineno, f"unparsable text {body[pos:m.start()]!r}")
        lit, alt, quote, opt = m.groups()
        if opt is not None:
            key, _, value = opt.partition("=")
            options[key] = value
        elif options:
            raise PatternSyntaxError(lineno, "options must follow all atoms")
        elif quote is not None:
            atoms.append(Atom("quote"))
        elif lit is not None:
            if not lit:
                raise PatternSyntaxError(lineno, "empty literal")
            atoms.append(Atom("lit", frozenset({lit.lower()})))
        else:
            alts = frozenset(a.strip().lower() for a in alt.split("|") if a.strip())
            if not alts:
                raise PatternSyntaxError(lineno, "empty alternative set")
            atoms.append(Atom("alt", alts))
        pos = m.end()
    if body[pos:].strip():
        raise PatternSyntaxError(lineno, f"unparsable text {body[pos:]!r}")
    return atoms, options


def _default_category(atoms: Sequence[Atom], marker_lexeme: str) -> str:
    if any(a.kind == "quote" for a in atoms):
        return MIXED
    if marker_lexeme in _DESCRIPTOR_LEXEMES:
        return DESCRIPTOR_MARKER
    return VERB_MARKER


def compile_patterns(spec: str) -> Cascade:
    """Compile a pattern file's content into a matcher cascade.

    Line format: ``id: atom atom ...`` where an atom is ``"literal"``,
    ``{alt1|alt2}``, or ``QUOTE``; optional trailing ``priority=N``,
    ``marker=N`` (atom index of the head marker, default first lexical
    atom) and ``category=`` overrides.  Full-line ``#`` comments.
    """
    patterns: list[TriggerPattern] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(spec.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, body = line.partition(":")
        if not sep or not head.strip():
            raise PatternSyntaxError(lineno, "expected 'id: atoms...'")
        pid = head.strip()
        if pid in seen:
            raise PatternSyntaxError(lineno, f"duplicate pattern id {pid!r}")
        atoms, options = _parse_atoms(lineno, body)
        if not atoms:
            raise PatternSyntaxError(lineno, "pattern has no atoms")

        try:
            priority = int(options.pop("priority", "0"))
        except ValueError:
            raise PatternSyntaxError(lineno, "priority must be an integer")
        if "marker" in options:
            try:
                marker_index = int(options.pop("marker"))
            except ValueError:
                raise PatternSyntaxError(lineno, "marker must be an atom index")
        else:
            marker_index = next(
                (i for i, a in enumerate(atoms) if a.kind != "quote"), -1
            )
        if not 0 <= marker_index < len(atoms) or atoms[marker_index].kind == "quote":
            raise PatternSyntaxError(lineno, "marker must point at a lexical atom")
        marker_lexeme = min(atoms[marker_index].values)
        category = options.pop("category", "") or _default_category(
            atoms, marker_lexeme
        )
        if category not in (VERB_MARKER, DESCRIPTOR_MARKER, MIXED):
            raise PatternSyntaxError(lineno, f"unknown category {category!r}")
        if options:
            raise PatternSyntaxError(lineno, f"unknown options {sorted(options)}")

        seen.add(pid)
        patterns.append(
            TriggerPattern(
                id=pid,
                sequence=tuple(atoms),
                marker_index=marker_index,
                marker_lexeme=marker_lexeme,
                category=category,
                priority=priority,
                order=len(patterns),
            )
        )
    return Cascade(patterns)


def load_patterns(path: str | Path) -> Cascade:
    return compile_patterns(Path(path).read_text(encoding="utf-8"))


def _match_length(pattern: TriggerPattern, sentence: Sentence, start: int) -> int:
    tokens = sentence.tokens
    if start + len(pattern) > len(tokens):
        return 0
    for k, atom in enumerate(pattern.sequence):
        if not atom.matches(tokens[start + k].norm):
            return 0
    return len(pattern)


def scan(sentence: Sentence, cascade: Cascade) -> list[TriggerMatch]:
    """All non-overlapping matches, left to right, longest first.

    Ties on length are broken by pattern priority, then file order.
    """
    matches: list[TriggerMatch] = []
    i = 0
    n = len(sentence.tokens)
    while i < n:
        best: TriggerPattern | None = None
        for pat in cascade.patterns:
            length = _match_length(pat, sentence, i)
            if length == 0:
                continue
            if (
                best is None
                or length > len(best)
                or (length == len(best) and pat.priority > best.priority)
            ):
                best = pat
        if best is None:
            i += 1
            continue
        matches.append(
            TriggerMatch(
                pattern_id=best.id,
                sentence_ref=sentence.ref,
                token_span=(i, i + len(best) - 1),
                marker_index=i + best.marker_index,
            )
        )
        i += len(best)
    return matches


def candidates_from_sentences(
    sentences: Iterable[Sentence], cascade: Cascade
) -> list[EmoCandidate]:
    out = []
    for sentence in sentences:
        found = scan(sentence, cascade)
        if found:
            out.append(EmoCandidate(sentence=sentence, matches=tuple(found)))
    return out


def extract_candidates(doc: Document, cascade: Cascade) -> list[EmoCandidate]:
    """One candidate per sentence with at least one trigger match."""
    return candidates_from_sentences(segment_sentences(doc), cascade)
