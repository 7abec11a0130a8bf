"""Scoring against gold annotations: filtering P/R/F and slot similarity.

Slot comparison uses token recall against the gold string with a 65%
threshold by default, so an answer covering at least two thirds of the
correct tokens counts as positive.  Undefined ratios (empty denominators)
are reported as NA rather than silently coerced to 0 or 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import tokenize
from .extraction import MidEntry

DEFAULT_THRESHOLD = 0.65

_PUNCT = set(',.;:"\'()[]?!')


class AlignmentError(ValueError):
    """Prediction and gold sentence sets do not cover the same refs."""


@dataclass(frozen=True)
class GoldRecord:
    sentence_ref: tuple[str, int]
    is_emo: bool
    autonym: str | None = None
    information: str | None = None
    markers: str | None = None

    def __post_init__(self):
        if self.is_emo and not (self.autonym and self.markers):
            raise ValueError(f"{self.sentence_ref}: EMO gold needs slot values")
        if not self.is_emo and (self.autonym or self.information or self.markers):
            raise ValueError(f"{self.sentence_ref}: non-EMO gold must not carry slots")


def load_gold(path: str | Path) -> list[GoldRecord]:
    """Gold file: JSON Lines {doc, sentence, is_emo, autonym?, information?, markers?}."""
    records = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        raw = json.loads(line)
        try:
            records.append(
                GoldRecord(
                    sentence_ref=(raw["doc"], int(raw["sentence"])),
                    is_emo=bool(raw["is_emo"]),
                    autonym=raw.get("autonym"),
                    information=raw.get("information"),
                    markers=raw.get("markers"),
                )
            )
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return records


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    fn: int
    beta: float = 1.0

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def f_measure(self) -> float | None:
        return f_measure(self.precision, self.recall, self.beta)


def f_measure(precision: float | None, recall: float | None, beta: float = 1.0) -> float | None:
    if precision is None or recall is None:
        return None
    if precision == 0.0 and recall == 0.0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * precision * recall / (b2 * precision + recall)


def compute_prf(tp: int, fp: int, fn: int, beta: float = 1.0) -> Metrics:
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be non-negative")
    return Metrics(tp=tp, fp=fp, fn=fn, beta=beta)


def round2(value: float | None) -> str:
    """Two decimals, half-up, NA for undefined values."""
    if value is None:
        return "NA"
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _slot_tokens(text: str) -> list[str]:
    return [t.norm for t in tokenize(text) if t.norm not in _PUNCT]


def slot_similarity(candidate: str, gold: str) -> float:
    """Share of gold tokens covered by the candidate (multiset recall)."""
    gold_tokens = _slot_tokens(gold)
    if not gold_tokens:
        raise ValueError(f"malformed gold slot {gold!r}")
    pool = list(_slot_tokens(candidate))
    hit = 0
    for tok in gold_tokens:
        if tok in pool:
            pool.remove(tok)
            hit += 1
    return hit / len(gold_tokens)


def markers_match(candidate: str, gold: str) -> bool:
    """Marker slots are short; score them by lexeme containment instead."""
    need = _slot_tokens(gold)
    have = list(_slot_tokens(candidate))
    for tok in need:
        if tok not in have:
            return False
        have.remove(tok)
    return True


@dataclass(frozen=True)
class EntryScore:
    autonym: bool
    information: bool
    markers: bool

    def positive(self, policy: str = "all") -> bool:
        if policy == "all":
            return self.autonym and self.information
        if policy == "any":
            return self.autonym or self.information
        raise ValueError(f"unknown entry policy {policy!r}")


def score_entry(
    entry: MidEntry,
    gold: GoldRecord | MidEntry,
    threshold: float = DEFAULT_THRESHOLD,
) -> EntryScore:
    """Per-slot booleans for one entry against its gold record."""
    if isinstance(gold, GoldRecord) and not gold.is_emo:
        raise ValueError("score_entry needs an EMO gold record")
    gold_autonym = gold.autonym
    gold_info = gold.information
    gold_markers = gold.markers
    return EntryScore(
        autonym=slot_similarity(entry.autonym, gold_autonym) >= threshold,
        information=(
            slot_similarity(entry.information, gold_info) >= threshold
            if gold_info
            else entry.information == gold_info
        ),
        markers=markers_match(entry.markers, gold_markers) if gold_markers else True,
    )


def evaluate_filtering(
    predictions: Mapping[tuple[str, int], bool],
    gold: Sequence[GoldRecord],
    beta: float = 1.0,
    golden_standard: bool = False,
    extractable: Iterable[tuple[str, int]] | None = None,
) -> Metrics:
    """Sentence-level P/R/F of EMO predictions against gold labels.

    In golden-standard mode, gold EMO sentences that no pattern in the
    active inventory can reach (not in ``extractable``) are removed before
    counting, isolating filter quality from inventory coverage.
    """
    gold_refs = {g.sentence_ref for g in gold}
    pred_refs = set(predictions)
    if gold_refs != pred_refs:
        missing = sorted(gold_refs - pred_refs)
        extra = sorted(pred_refs - gold_refs)
        raise AlignmentError(
            f"unaligned sentence refs: missing={missing[:10]} extra={extra[:10]}"
        )
    if golden_standard and extractable is None:
        raise ValueError("golden-standard mode needs the extractable sentence set")
    reachable = set(extractable) if extractable is not None else None

    tp = fp = fn = 0
    for record in gold:
        ref = record.sentence_ref
        if golden_standard and record.is_emo and ref not in reachable:
            continue
        predicted = predictions[ref]
        if predicted and record.is_emo:
            tp += 1
        elif predicted:
            fp += 1
        elif record.is_emo:
            fn += 1
    return Metrics(tp=tp, fp=fp, fn=fn, beta=beta)


@dataclass(frozen=True)
class MidReport:
    autonym: Metrics
    information: Metrics
    entry: Metrics
    n_records: int

    def summary(self) -> str:
        """Record count with the global (entry-level) F, e.g. "(25/1.00)"."""
        return f"({self.n_records}/{round2(self.entry.f_measure)})"


def evaluate_mid(
    entries: Sequence[MidEntry],
    gold_mid: Sequence[MidEntry | GoldRecord],
    threshold: float = DEFAULT_THRESHOLD,
    entry_policy: str = "all",
    beta: float = 1.0,
) -> MidReport:
    """Slot-level and entry-level metrics of a MID against a gold MID.

    Gold records of either shape are accepted: gold MID entries align by
    their reference string, annotation records by sentence ref (which the
    scored entries must then carry).
    """

    def key(obj):
        if isinstance(obj, MidEntry):
            return obj.reference
        return obj.sentence_ref

    gold_by_key: dict = {}
    for g in gold_mid:
        if isinstance(g, GoldRecord) and not g.is_emo:
            continue
        gold_by_key[key(g)] = g

    def entry_key(entry: MidEntry):
        if gold_by_key and isinstance(next(iter(gold_by_key.values())), GoldRecord):
            if entry.sentence_ref is None:
                raise ValueError("entries lack sentence refs; cannot align")
            return entry.sentence_ref
        return entry.reference

    counts = {slot: [0, 0, 0] for slot in ("autonym", "information", "entry")}

    def bump(slot: str, hit: bool):
        if hit:
            counts[slot][0] += 1
        else:
            counts[slot][1] += 1
            counts[slot][2] += 1

    seen = set()
    for entry in entries:
        k = entry_key(entry)
        gold = gold_by_key.get(k)
        if gold is None or k in seen:
            for slot in counts:
                counts[slot][1] += 1  # spurious entry: false positive
            continue
        seen.add(k)
        score = score_entry(entry, gold, threshold)
        bump("autonym", score.autonym)
        bump("information", score.information)
        bump("entry", score.positive(entry_policy))
    for k in gold_by_key:
        if k not in seen:
            for slot in counts:
                counts[slot][2] += 1  # missed gold record: false negative

    return MidReport(
        autonym=Metrics(*counts["autonym"], beta=beta),
        information=Metrics(*counts["information"], beta=beta),
        entry=Metrics(*counts["entry"], beta=beta),
        n_records=len(entries),
    )
