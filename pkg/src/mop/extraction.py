"""Constituent labeling of filtered candidates and MID template filling.

Each surviving trigger match is analyzed with a marker-specific argument
frame: naming verbs in the passive put the new name after the marker and
the described material before it, active conferrals add an agent and take
two post-marker arguments, descriptor markers ("the term X") name the
autonym directly.  Slot strings are always verbatim substrings of the
source sentence; pronouns are emitted unresolved and unexpressed slots
get the "$x" placeholder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document, Sentence, segment_sentences
from .filtering import (
    POS,
    WORD,
    YES,
    CollocationRule,
    MaxEntModel,
    NaiveBayesModel,
    apply_collocation_filter,
    classify,
    featurize,
)
from .patterns import Cascade, EmoCandidate, TriggerMatch, candidates_from_sentences
from .tagger import Chunk, Tagger, attach_pp, chunk, extended_np_span, np_core_span

# Constituent labels
AUTONYM = "Autonym"
AGENT = "Agent"
MARKER_OPERATOR = "MarkerOperator"
ANAPHORIC = "Anaphoric"
NOUN_CHUNK = "NounChunk"
INFO_SEGMENT = "InfoSegment"

# Argument frames
NAME_CONFERRAL = "NameConferral"
NAME_BEARING = "NameBearing"
UNASSIGNED = "Unassigned"

# Entry flags
FLAG_ANAPHORIC = "anaphoric-unresolved"
FLAG_EXISTENTIAL = "existential-placeholder"
FLAG_SORTAL = "sortal"

PLACEHOLDER = "$x"

_AUX = frozenset(
    """
    is are was were be been being am has have had will would can could
    may might must shall should do does did
    """.split()
)

_PUNCT_NORMS = frozenset({",", ".", ";", ":", "(", ")", "?", "!", '"', "'"})
_CLAUSE_BOUNDARY = frozenset({",", ";", ":", "(", ")", '"', "'"})
_PRONOUNS = frozenset(
    "i you he she it we they this that those these one something someone".split()
)
_WH = frozenset({"what", "which", "who", "whom", "whatever"})
_SORTAL_LEAD = frozenset({"these", "those"})

_CALL_FORMS = frozenset({"call", "calls", "called", "calling"})
_KNOW_FORMS = frozenset({"known"})
_DEFINE_FORMS = frozenset({"define", "defines", "defined", "defining"})
_TERMED_FORMS = frozenset({"termed"})
_COIN_FORMS = frozenset({"coin", "coins", "coined", "coining"})
_DUB_FORMS = frozenset({"dub", "dubs", "dubbed", "dubbing"})
_DENOTE_FORMS = frozenset({"denote", "denotes", "denoted", "denoting"})
_REFER_FORMS = frozenset({"refer", "refers", "referred", "referring"})
_DESCRIPTOR_FORMS = frozenset({"term", "word"})

# Verb forms absorbable as marker material inside descriptor remainders
# ("the term X *was coined* to ...").
_MARKER_VERB_FORMS = (
    _CALL_FORMS | _KNOW_FORMS | _DEFINE_FORMS | _TERMED_FORMS | _COIN_FORMS
    | _DUB_FORMS | _DENOTE_FORMS | _REFER_FORMS | frozenset({"introduced"})
)


@dataclass
class EmoAnalysis:
    sentence: Sentence
    match: TriggerMatch
    frame: str
    autonym_span: tuple[int, int] | None
    info_span: tuple[int, int] | None
    agent_span: tuple[int, int] | None
    marker_indices: tuple[int, ...]
    flags: frozenset[str]
    labeled_chunks: list[tuple[Chunk, str]] = field(default_factory=list)
    confidence: float = 1.0
    # Token indices treated as marker material; matches fully contained in
    # this set were absorbed by the analysis and yield no entry of their own.
    absorbed: frozenset[int] = frozenset()

    @property
    def sentence_ref(self) -> tuple[str, int]:
        return self.sentence.ref


@dataclass(frozen=True)
class MidEntry:
    reference: str
    autonym: str
    information: str
    markers: str
    agent: str | None
    flags: frozenset[str]
    confidence: float
    sentence_ref: tuple[str, int] | None = None  # internal, not exported

    def __post_init__(self):
        if not self.markers:
            raise ValueError("markers must be non-empty")
        if not self.autonym:
            raise ValueError("autonym must be non-empty (use the placeholder)")


# ---------------------------------------------------------------------------
# Units: argument candidates around the marker


@dataclass(frozen=True)
class _Unit:
    kind: str  # "np" | "qnp" | "pron" | "wh"
    span: tuple[int, int]  # slot token span (quotes/punctuation stripped)
    raw_span: tuple[int, int]  # full span including wrapping quotes


def _strip_edges(tokens, first: int, last: int) -> tuple[int, int] | None:
    while first <= last and tokens[first].norm in _PUNCT_NORMS:
        first += 1
    while last >= first and tokens[last].norm in _PUNCT_NORMS:
        last -= 1
    if first > last:
        return None
    return first, last


def _is_quote_wrapped(tokens, span: tuple[int, int]) -> bool:
    return (
        span[1] > span[0]
        and tokens[span[0]].is_quote
        and tokens[span[1]].is_quote
    )


def _units_after(sentence, chunks, tags, start_tok: int) -> list[_Unit]:
    tokens = sentence.tokens
    units: list[_Unit] = []
    for idx, ch in enumerate(chunks):
        if len(units) >= 3:
            break
        if ch.token_span[1] < start_tok:
            continue
        if ch.kind == "VP":
            break
        if ch.kind == "O":
            tok = tokens[ch.token_span[0]]
            if tok.norm in (",", ";", ":") or tags[ch.token_span[0]] == ".":
                break
            if tags[ch.token_span[0]] == "PRP" or tok.norm in _PRONOUNS:
                units.append(_Unit("pron", ch.token_span, ch.token_span))
            elif tags[ch.token_span[0]] in ("WP", "WDT"):
                units.append(_Unit("wh", ch.token_span, ch.token_span))
            continue
        if ch.kind == "PP" and ch.attach is None:
            core = np_core_span(chunks, idx)
            core = (max(core[0], start_tok), core[1])
            stripped = _strip_edges(tokens, *core)
            if stripped:
                units.append(_Unit("np", stripped, ch.token_span))
            continue
        if ch.kind == "NP":
            raw = extended_np_span(chunks, idx)
            first, last = ch.token_span
            if _is_quote_wrapped(tokens, ch.token_span):
                stripped = _strip_edges(tokens, first, last)
                if stripped:
                    units.append(_Unit("qnp", stripped, raw))
                continue
            # A quote-wrapped tail inside the chunk is its own argument
            # ("dubbed the fine vessels "capillaries"").
            tail = next(
                (i for i in range(first, last + 1) if tokens[i].is_quote), None
            )
            if tail is not None and tokens[last].is_quote and tail > first:
                base = _strip_edges(tokens, max(first, start_tok), tail - 1)
                if base:
                    units.append(_Unit("np", base, (first, tail - 1)))
                inner = _strip_edges(tokens, tail, last)
                if inner:
                    units.append(_Unit("qnp", inner, (tail, last)))
                continue
            clipped = (max(raw[0], start_tok), raw[1])
            stripped = _strip_edges(tokens, *clipped)
            if stripped:
                units.append(_Unit("np", stripped, raw))
    return units


def _nearest_unit_before(sentence, chunks, tags, stop_tok: int) -> _Unit | None:
    """Nearest argument-like chunk ending before ``stop_tok``."""
    tokens = sentence.tokens
    for idx in range(len(chunks) - 1, -1, -1):
        ch = chunks[idx]
        if ch.token_span[1] >= stop_tok:
            continue
        if ch.kind == "O":
            tok = tokens[ch.token_span[0]]
            if tok.norm in _PUNCT_NORMS:
                continue
            if tags[ch.token_span[0]] == "PRP" or tok.norm in _PRONOUNS:
                return _Unit("pron", ch.token_span, ch.token_span)
            if tags[ch.token_span[0]] in ("WP", "WDT"):
                return _Unit("wh", ch.token_span, ch.token_span)
            return None
        if ch.kind == "PP":
            host = ch.attach
            if host is not None:
                span = extended_np_span(chunks, host)
                stripped = _strip_edges(tokens, *span)
                return _Unit("np", stripped, span) if stripped else None
            core = _strip_edges(tokens, *np_core_span(chunks, idx))
            return _Unit("np", core, ch.token_span) if core else None
        if ch.kind == "NP":
            span = extended_np_span(chunks, idx)
            # The extension may reach past stop_tok; clip it back.
            span = (span[0], min(span[1], stop_tok - 1))
            if _is_quote_wrapped(tokens, ch.token_span):
                stripped = _strip_edges(tokens, *ch.token_span)
                return _Unit("qnp", stripped, ch.token_span) if stripped else None
            stripped = _strip_edges(tokens, *span)
            return _Unit("np", stripped, span) if stripped else None
        if ch.kind == "VP":
            return None
    return None


def _family(match: TriggerMatch, sentence: Sentence) -> str:
    norms = [sentence.tokens[i].norm for i in range(match.token_span[0],
                                                    match.token_span[1] + 1)]
    nset = set(norms)
    if "so-called" in nset or ("so" in nset and nset & _CALL_FORMS):
        return "so_called"
    if nset & _KNOW_FORMS:
        return "bearing"
    if nset & _REFER_FORMS and "as" in nset:
        return "bearing"
    if nset & _COIN_FORMS and nset & _DESCRIPTOR_FORMS:
        return "coined_term"
    if nset & _DESCRIPTOR_FORMS:
        return "descriptor"
    if nset & _DEFINE_FORMS:
        return "define"
    if nset & _DENOTE_FORMS:
        return "denote"
    if nset & (_CALL_FORMS | _TERMED_FORMS | _DUB_FORMS | _COIN_FORMS):
        return "naming_verb"
    return "generic"


def _aux_run_before(sentence, tags, start: int) -> list[int]:
    """Auxiliary/adverb run immediately preceding the match, in order."""
    run: list[int] = []
    i = start - 1
    while i >= 0 and (sentence.tokens[i].norm in _AUX or tags[i] == "RB"):
        run.append(i)
        i -= 1
    run.reverse()
    # A run consisting only of adverbs is not an auxiliary group.
    if run and all(tags[i] == "RB" for i in run):
        return []
    return run


def _clause_span_before(sentence, end_tok: int) -> tuple[int, int] | None:
    tokens = sentence.tokens
    start = 0
    for i in range(end_tok - 1, -1, -1):
        if tokens[i].norm in _CLAUSE_BOUNDARY:
            start = i + 1
            break
    return _strip_edges(tokens, start, end_tok - 1)


def _remainder_span(sentence, start_tok: int) -> tuple[int, int] | None:
    return _strip_edges(sentence.tokens, start_tok, len(sentence.tokens) - 1)


def label_constituents(
    sentence: Sentence,
    chunks: Sequence[Chunk],
    tags: Sequence[str],
    match: TriggerMatch,
) -> EmoAnalysis:
    """Apply the marker-specific argument frame to one trigger match."""
    tokens = sentence.tokens
    first, last = match.token_span
    family = _family(match, sentence)
    aux_run = _aux_run_before(sentence, tags, first)
    passive = bool(aux_run)

    marker_indices = set(aux_run) | set(range(first, last + 1))
    absorbed = set(range(first, last + 1))
    flags: set[str] = set()
    frame = UNASSIGNED
    autonym: _Unit | None = None
    info: _Unit | None = None
    info_span: tuple[int, int] | None = None
    agent: _Unit | None = None

    units = _units_after(sentence, chunks, tags, last + 1)
    nps_after = [u for u in units if u.kind in ("np", "qnp")]

    def subject_before(stop: int):
        """Pre-marker subject: pronoun right before, else nearest plain NP.

        Oblique PP material is skipped so that "a virus particle outside
        a host cell is termed ..." picks the particle, not the cell.
        """
        unit = _nearest_unit_before(sentence, chunks, tags, stop)
        if unit is not None and unit.kind in ("pron", "wh"):
            return unit
        for idx in range(len(chunks) - 1, -1, -1):
            ch = chunks[idx]
            if ch.token_span[1] >= stop:
                continue
            if ch.kind == "O":
                tok = tokens[ch.token_span[0]]
                if tags[ch.token_span[0]] == "PRP" or tok.norm in _PRONOUNS:
                    return _Unit("pron", ch.token_span, ch.token_span)
                continue
            if ch.kind == "NP" and ch.attach is None:
                span = extended_np_span(chunks, idx)
                span = (span[0], min(span[1], stop - 1))
                stripped = _strip_edges(tokens, *span)
                if stripped:
                    return _Unit("np", stripped, span)
        return None

    if family in ("bearing", "generic") or (
        family in ("naming_verb",) and passive
    ):
        frame = NAME_BEARING
        autonym = next(iter(nps_after), None)
        if passive:
            start_of_group = aux_run[0]
            before = _nearest_unit_before(sentence, chunks, tags, start_of_group)
            if before is not None and before.kind in ("pron", "wh"):
                info = before
            else:
                info_span = _clause_span_before(sentence, start_of_group)
        else:
            info = _nearest_unit_before(sentence, chunks, tags, first)
    elif family == "naming_verb":
        frame = NAME_CONFERRAL
        agent = subject_before(first)
        wh = None
        if agent is not None and agent.kind == "np":
            before_agent = _nearest_unit_before(sentence, chunks, tags,
                                                agent.raw_span[0])
            if before_agent is not None and before_agent.kind == "wh":
                wh = before_agent
        if wh is not None:
            info = wh
            autonym = next(iter(nps_after), None)
        elif len(units) >= 2:
            u1, u2 = units[0], units[1]
            if u1.kind in ("pron", "wh"):
                info, autonym = u1, u2 if u2.kind in ("np", "qnp") else None
            elif u1.kind == "qnp" and u2.kind != "qnp":
                autonym, info = u1, u2
            else:
                info, autonym = u1, u2
        elif len(units) == 1:
            if units[0].kind in ("pron", "wh"):
                info = units[0]
            else:
                autonym = units[0]
    elif family == "so_called":
        frame = NAME_BEARING
        autonym = next(iter(nps_after), None)
    elif family == "define":
        if passive:
            frame = NAME_BEARING
            autonym = subject_before(aux_run[0])
            info_span = _remainder_span(sentence, last + 1)
        else:
            frame = NAME_CONFERRAL
            agent = subject_before(first)
            autonym = next(iter(nps_after), None)
            start = autonym.raw_span[1] + 1 if autonym else last + 1
            if start < len(tokens) and tokens[start].norm == "as":
                marker_indices.add(start)
                start += 1
            info_span = _remainder_span(sentence, start)
    elif family == "denote":
        frame = NAME_BEARING
        autonym = subject_before(first)
        info_span = _remainder_span(sentence, last + 1)
    elif family in ("descriptor", "coined_term"):
        frame = NAME_BEARING if family == "descriptor" else NAME_CONFERRAL
        if family == "coined_term":
            agent = subject_before(first)
        autonym = next(iter(nps_after), None)
        start = autonym.raw_span[1] + 1 if autonym else last + 1
        # Absorb a following auxiliary + naming-verb group into the marker
        # material ("the term X *was coined* to ...").
        while start < len(tokens) and (
            tokens[start].norm in _AUX
            or tokens[start].norm in _MARKER_VERB_FORMS
            or tags[start] == "RB"
        ):
            marker_indices.add(start)
            absorbed.add(start)
            start += 1
        info_span = _remainder_span(sentence, start)

    # Resolve spans and flags.
    autonym_span = autonym.span if autonym else None
    if autonym is not None and autonym.kind == "qnp":
        for i in (autonym.raw_span[0], autonym.raw_span[1]):
            if tokens[i].is_quote:
                marker_indices.add(i)
    if autonym_span is not None:
        for i in (autonym_span[0] - 1, autonym_span[1] + 1):
            if 0 <= i < len(tokens) and tokens[i].is_quote:
                marker_indices.add(i)
        autonym_span = _acronym_extension(tokens, autonym_span)

    if info is not None:
        info_span = info.span
        if info.kind in ("pron", "wh"):
            flags.add(FLAG_ANAPHORIC)
        elif tokens[info.span[0]].norm in _SORTAL_LEAD:
            flags.add(FLAG_SORTAL)
    elif info_span is not None:
        if tokens[info_span[0]].norm in _SORTAL_LEAD:
            flags.add(FLAG_SORTAL)
    if info_span is None:
        flags.add(FLAG_EXISTENTIAL)
    if autonym_span is None:
        flags.add(FLAG_EXISTENTIAL)

    analysis = EmoAnalysis(
        sentence=sentence,
        match=match,
        frame=frame,
        autonym_span=autonym_span,
        info_span=info_span,
        agent_span=agent.span if agent else None,
        marker_indices=tuple(sorted(marker_indices)),
        flags=frozenset(flags),
        absorbed=frozenset(absorbed | marker_indices),
    )
    analysis.labeled_chunks = _label_chunks(chunks, analysis)
    return analysis


def _acronym_extension(tokens, span: tuple[int, int]) -> tuple[int, int]:
    """Absorb a trailing parenthesized all-caps token into the autonym."""
    first, last = span
    if (
        last + 3 < len(tokens)
        and tokens[last + 1].norm == "("
        and tokens[last + 2].surface.isalpha()
        and tokens[last + 2].surface.isupper()
        and tokens[last + 3].norm == ")"
    ):
        return (first, last + 3)
    return span


def _label_chunks(chunks: Sequence[Chunk], analysis: EmoAnalysis):
    def overlaps(ch: Chunk, span: tuple[int, int] | None) -> bool:
        return span is not None and not (
            ch.token_span[1] < span[0] or ch.token_span[0] > span[1]
        )

    marker_set = set(analysis.marker_indices)
    labeled = []
    for ch in chunks:
        if overlaps(ch, analysis.autonym_span):
            # One representative Autonym chunk; spillover chunks from
            # extended spans stay plain noun chunks.
            if ch.token_span[0] <= analysis.autonym_span[0] <= ch.token_span[1]:
                label = AUTONYM
            elif ch.kind in ("NP", "PP"):
                label = NOUN_CHUNK
            else:
                continue
        elif analysis.flags & {FLAG_ANAPHORIC} and overlaps(ch, analysis.info_span):
            label = ANAPHORIC
        elif overlaps(ch, analysis.info_span):
            label = INFO_SEGMENT
        elif overlaps(ch, analysis.agent_span):
            label = AGENT
        elif any(i in marker_set for i in ch.indices()):
            label = MARKER_OPERATOR
        elif ch.kind == "NP":
            label = NOUN_CHUNK
        else:
            continue
        labeled.append((ch, label))
    return labeled


# ---------------------------------------------------------------------------
# Template filling and the full pipeline


def _span_text(doc: Document, sentence: Sentence, span: tuple[int, int]) -> str:
    start = sentence.tokens[span[0]].span[0]
    end = sentence.tokens[span[1]].span[1]
    return doc.text[start:end]


def fill_template(analysis: EmoAnalysis, doc: Document, sample_counter: int) -> MidEntry:
    """Fill one database record from a labeled analysis.

    Slot strings are the exact source surfaces; unexpressed slots carry
    the "$x" placeholder and pronouns are emitted as-is (no antecedent is
    ever substituted).
    """
    sentence = analysis.sentence
    sentence_tokens = sentence.tokens

    autonym = (
        _span_text(doc, sentence, analysis.autonym_span)
        if analysis.autonym_span
        else PLACEHOLDER
    )
    information = (
        _span_text(doc, sentence, analysis.info_span)
        if analysis.info_span
        else PLACEHOLDER
    )
    markers = " ".join(sentence_tokens[i].surface for i in analysis.marker_indices)
    agent = (
        _span_text(doc, sentence, analysis.agent_span)
        if analysis.agent_span
        else None
    )
    return MidEntry(
        reference=f"{doc.id} sample # {sample_counter}",
        autonym=autonym,
        information=information,
        markers=markers,
        agent=agent,
        flags=analysis.flags,
        confidence=analysis.confidence,
        sentence_ref=analysis.sentence_ref,
    )


@dataclass
class PipelineResources:
    """Loaded stage resources for the extract pipeline."""

    cascade: Cascade
    tagger: Tagger
    collocations: Sequence[CollocationRule] = ()
    filter_mode: str = "collocation"  # collocation | classifier | none
    model: NaiveBayesModel | MaxEntModel | None = None
    abbreviations: Sequence[str] | None = None

    def __post_init__(self):
        if self.filter_mode not in ("collocation", "classifier", "none"):
            raise ValueError(f"bad filter mode {self.filter_mode!r}")
        if self.filter_mode == "classifier" and self.model is None:
            raise ValueError("classifier filtering requires a model")


def analyze_document(doc: Document, resources: PipelineResources) -> list[EmoAnalysis]:
    """Segment, scan, filter and label one document's matches."""
    sentences = segment_sentences(doc, resources.abbreviations)
    candidates = candidates_from_sentences(sentences, resources.cascade)
    analyses: list[EmoAnalysis] = []
    for cand in candidates:
        tags = resources.tagger.tag(cand.sentence)
        chunks = attach_pp(chunk(cand.sentence.tokens, tags), cand.sentence.tokens)
        absorbed: set[int] = set()
        for match in cand.matches:
            span_tokens = set(range(match.token_span[0], match.token_span[1] + 1))
            if span_tokens <= absorbed:
                continue  # consumed as marker material by an earlier match
            confidence = 1.0
            if resources.filter_mode == "collocation":
                decision = apply_collocation_filter(cand, match, resources.collocations)
                if not decision.kept:
                    continue
            elif resources.filter_mode == "classifier":
                model = resources.model
                vec = featurize(cand, match, model.kind, model.width,
                                tags=tags if model.kind == POS else None)
                label, score = classify(model, vec)
                if label != YES:
                    continue
                confidence = score
            analysis = label_constituents(cand.sentence, chunks, tags, match)
            analysis.confidence = confidence
            absorbed |= set(analysis.absorbed)
            analyses.append(analysis)
    return analyses


def build_mid(docs: Iterable[Document], resources: PipelineResources) -> list[MidEntry]:
    """Run the full pipeline; entries ordered by (document, sentence, match)."""
    entries: list[MidEntry] = []
    for doc in sorted(docs, key=lambda d: d.id):
        counter = 0
        for analysis in analyze_document(doc, resources):
            counter += 1
            entries.append(fill_template(analysis, doc, counter))
    return entries


# ---------------------------------------------------------------------------
# MID serialization

_EXPORT_FIELDS = ("reference", "autonym", "information", "markers", "agent",
                  "flags", "confidence")


def entry_to_json(entry: MidEntry) -> str:
    record = {
        "reference": entry.reference,
        "autonym": entry.autonym,
        "information": entry.information,
        "markers": entry.markers,
        "agent": entry.agent,
        "flags": sorted(entry.flags),
        "confidence": entry.confidence,
    }
    return json.dumps(record, ensure_ascii=False)


def entry_from_json(line: str) -> MidEntry:
    record = json.loads(line)
    unknown = set(record) - set(_EXPORT_FIELDS)
    if unknown:
        raise ValueError(f"unknown MID fields: {sorted(unknown)}")
    return MidEntry(
        reference=record["reference"],
        autonym=record["autonym"],
        information=record["information"],
        markers=record["markers"],
        agent=record.get("agent"),
        flags=frozenset(record.get("flags", [])),
        confidence=float(record.get("confidence", 1.0)),
    )


def write_mid(entries: Sequence[MidEntry], path: str | Path) -> None:
    text = "".join(entry_to_json(e) + "\n" for e in entries)
    Path(path).write_text(text, encoding="utf-8")


def read_mid(path: str | Path) -> list[MidEntry]:
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            entries.append(entry_from_json(line))
    return entries


def write_paper_view(entries: Sequence[MidEntry], path: str | Path) -> None:
    """Four-column TSV: reference, autonym, information, markers."""
    lines = ["\t".join(("Reference", "Autonym", "Information", "Markers/Operators"))]
    for e in entries:
        lines.append("\t".join((e.reference, e.autonym, e.information, e.markers)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
