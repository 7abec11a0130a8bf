"""Document ingestion, sentence segmentation and tokenization.

Every later stage of the pipeline consumes the Sentence/Token structures
produced here.  Tokenization is deliberately simple: whitespace split plus
peeling of punctuation characters into their own tokens, with hyphenated
words kept whole.  Quotation marks are kept as individual tokens because
they act as markers in their own right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

# Characters that always become single-character tokens.
_SPLIT_CHARS = set(',.;:"\'()[]?!')

_DOUBLE_QUOTES = {'"', '“', '”', '„'}
_SINGLE_QUOTES = {"'", '‘', '’'}

_SENT_FINAL = ".!?"


def _norm_char(ch: str) -> str:
    if ch in _DOUBLE_QUOTES:
        return '"'
    if ch in _SINGLE_QUOTES:
        return "'"
    return ch.lower()


def norm_surface(surface: str) -> str:
    """Lowercased surface with curly quotes mapped to straight ones."""
    return "".join(_norm_char(ch) for ch in surface)


@dataclass(frozen=True)
class Document:
    """A raw input text, preserved byte-for-byte."""

    id: str
    text: str
    domain_tag: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")


@dataclass(frozen=True)
class Token:
    surface: str
    index: int
    span: tuple[int, int]
    norm: str = field(default="")

    def __post_init__(self):
        if not self.norm:
            object.__setattr__(self, "norm", norm_surface(self.surface))

    @property
    def is_quote(self) -> bool:
        return self.norm in ('"', "'")


@dataclass(frozen=True)
class Sentence:
    doc_id: str
    index: int
    tokens: tuple[Token, ...]

    @property
    def span(self) -> tuple[int, int]:
        return (self.tokens[0].span[0], self.tokens[-1].span[1])

    @property
    def ref(self) -> tuple[str, int]:
        return (self.doc_id, self.index)

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


def tokenize(text: str, offset: int = 0) -> list[Token]:
    """Split ``text`` into tokens with exact character spans.

    Spans are relative to ``text`` shifted by ``offset``, so callers
    segmenting a document can record document-absolute offsets.
    """
    tokens: list[Token] = []

    def emit(surface: str, start: int) -> None:
        tokens.append(
            Token(
                surface=surface,
                index=len(tokens),
                span=(offset + start, offset + start + len(surface)),
            )
        )

    for m in re.finditer(r"\S+", text):
        chunk, start = m.group(), m.start()
        run = 0
        for j, ch in enumerate(chunk):
            if ch in _SPLIT_CHARS or ch in _DOUBLE_QUOTES or ch in _SINGLE_QUOTES:
                if run < j:
                    emit(chunk[run:j], start + run)
                emit(ch, start + j)
                run = j + 1
        if run < len(chunk):
            emit(chunk[run:], start + run)
    return tokens


def _is_abbreviation(text: str, period_pos: int, abbreviations: Iterable[str]) -> bool:
    head = text[: period_pos + 1]
    return any(head.endswith(abbr) for abbr in abbreviations)


def segment_sentences(
    doc: Document, abbreviations: Iterable[str] | None = None
) -> list[Sentence]:
    """Split a document into tokenized sentences.

    A boundary is a run of sentence-final punctuation followed by
    whitespace and a capital letter or quote, unless the word ending at
    the punctuation is on the abbreviation guard list.  Trailing text
    without final punctuation still forms a sentence, so every
    non-whitespace character of the document lands in exactly one
    sentence.
    """
    if abbreviations is None:
        from .defaults import default_abbreviations

        abbreviations = default_abbreviations()
    abbreviations = tuple(abbreviations)

    text = doc.text
    boundaries: list[int] = []
    # Closing quotes/brackets may trail the final punctuation ("...ends.”").
    for m in re.finditer(r"([.!?]+)([\"'”’)\]]*)", text):
        end = m.end()
        rest = text[end:]
        stripped = rest.lstrip()
        if not stripped:
            boundaries.append(end)
            break
        if len(stripped) == len(rest):
            continue  # no whitespace after the punctuation
        lead = stripped[0]
        opens_sentence = lead.isupper() or lead in _DOUBLE_QUOTES | _SINGLE_QUOTES
        if not opens_sentence:
            continue
        if "." in m.group(1) and _is_abbreviation(text, m.end(1) - 1, abbreviations):
            continue
        boundaries.append(end)

    sentences: list[Sentence] = []
    start = 0
    for end in boundaries + [len(text)]:
        if end <= start:
            continue
        piece = text[start:end]
        tokens = tokenize(piece, offset=start)
        if tokens:
            sentences.append(
                Sentence(doc_id=doc.id, index=len(sentences), tokens=tuple(tokens))
            )
        start = end
    return sentences


def load_document(path: str | Path, doc_id: str | None = None,
                  domain_tag: str | None = None) -> Document:
    path = Path(path)
    return Document(
        id=doc_id if doc_id is not None else path.stem,
        text=path.read_text(encoding="utf-8"),
        domain_tag=domain_tag,
    )


def load_corpus_dir(directory: str | Path) -> list[Document]:
    """One document per ``*.txt`` file, file stem as document id."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {directory}")
    docs = [load_document(p) for p in sorted(directory.glob("*.txt"))]
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise ValueError(f"duplicate document id: {doc.id}")
        seen.add(doc.id)
    return docs


def load_manifest(path: str | Path) -> list[Document]:
    """Corpus manifest: one ``id TAB path TAB domain_tag`` line per document."""
    path = Path(path)
    docs = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"{path}:{lineno}: expected 'id<TAB>path[<TAB>domain]'")
        doc_id, rel = parts[0], parts[1]
        tag = parts[2] if len(parts) > 2 and parts[2] else None
        docs.append(load_document(path.parent / rel, doc_id=doc_id, domain_tag=tag))
    return docs
