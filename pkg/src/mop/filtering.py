"""Candidate filtering: collocation reject rules and trained classifiers.

Two interchangeable strategies decide, per trigger match, whether a
candidate sentence really talks about a term.  The rule-based path rejects
matches whose marker keeps known bad company ("called attention", "gold
coin").  The statistical path featurizes a small window around the marker
(word forms or POS tags, one to three positions each side) and trains
either a position-aware naive Bayes model or a conditional maximum-entropy
model fitted by generalized or improved iterative scaling.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Sentence
from .patterns import EmoCandidate, TriggerMatch

YES = "YES"
NO = "NO"
LABELS = (YES, NO)
BOUNDARY = "BOUNDARY"
POS = "POS"
WORD = "WORD"

MODEL_FORMAT = "MOP-MODEL v1"


# ---------------------------------------------------------------------------
# Collocation rules


@dataclass(frozen=True)
class CollocationRule:
    marker: str
    side: str  # "preceding" | "subsequent"
    window: int
    words: frozenset[str]

    def __post_init__(self):
        if self.side not in ("preceding", "subsequent"):
            raise ValueError(f"bad side {self.side!r}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not self.words:
            raise ValueError("rule needs at least one word")

    @property
    def id(self) -> str:
        return f"{self.marker}:{self.side}"


@dataclass(frozen=True)
class FilterDecision:
    kept: bool
    rule: CollocationRule | None = None


def load_collocations(path: str | Path) -> list[CollocationRule]:
    """Rules file: ``marker TAB side TAB window TAB comma-separated-words``."""
    rules = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
        marker, side, window, words = parts
        rules.append(
            CollocationRule(
                marker=marker.strip().lower(),
                side=side.strip(),
                window=int(window),
                words=frozenset(w.strip().lower() for w in words.split(",") if w.strip()),
            )
        )
    return rules


def _sentence_of(candidate: EmoCandidate | Sentence) -> Sentence:
    return candidate.sentence if isinstance(candidate, EmoCandidate) else candidate


def apply_collocation_filter(
    candidate: EmoCandidate | Sentence,
    match: TriggerMatch,
    rules: Sequence[CollocationRule],
) -> FilterDecision:
    """Reject iff a rule word occurs within the rule window beside the marker."""
    sentence = _sentence_of(candidate)
    tokens = sentence.tokens
    marker = tokens[match.marker_index].norm
    for rule in rules:
        if rule.marker != marker:
            continue
        if rule.side == "preceding":
            lo = max(0, match.marker_index - rule.window)
            neighborhood = tokens[lo : match.marker_index]
        else:
            neighborhood = tokens[
                match.marker_index + 1 : match.marker_index + 1 + rule.window
            ]
        if any(tok.norm in rule.words for tok in neighborhood):
            return FilterDecision(kept=False, rule=rule)
    return FilterDecision(kept=True)


# ---------------------------------------------------------------------------
# Feature vectors


@dataclass(frozen=True)
class FeatureVector:
    left: tuple[str, ...]
    marker: str
    right: tuple[str, ...]
    kind: str  # POS | WORD
    width: int

    def __post_init__(self):
        if self.kind not in (POS, WORD):
            raise ValueError(f"bad feature kind {self.kind!r}")
        if self.width not in (1, 2, 3):
            raise ValueError("width must be 1, 2 or 3")
        if len(self.left) != self.width or len(self.right) != self.width:
            raise ValueError("left/right must be padded to the window width")

    def items(self) -> list[tuple[int, str]]:
        """(position offset, value) pairs; offset 0 is the marker itself."""
        out = [(-self.width + i, v) for i, v in enumerate(self.left)]
        out.append((0, self.marker))
        out.extend((i + 1, v) for i, v in enumerate(self.right))
        return out


@dataclass(frozen=True)
class LabeledExample:
    vector: FeatureVector
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"label must be YES or NO, got {self.label!r}")


def featurize(
    candidate: EmoCandidate | Sentence,
    match: TriggerMatch,
    kind: str,
    width: int,
    tags: Sequence[str] | None = None,
) -> FeatureVector:
    """Window of ``width`` context items each side of the match's marker.

    Items are POS tags or lowercased word forms; the marker slot is always
    the word form.  Positions beyond the sentence edge hold BOUNDARY.
    """
    sentence = _sentence_of(candidate)
    tokens = sentence.tokens
    m = match.marker_index
    if not 0 <= m < len(tokens):
        raise ValueError(f"marker index {m} out of range")
    if kind == POS:
        if tags is None:
            raise ValueError("POS features require a tag sequence")
        if len(tags) != len(tokens):
            raise ValueError("tags must align with tokens")
        source: Sequence[str] = tags
    else:
        source = [t.norm for t in tokens]

    def item(i: int) -> str:
        return source[i] if 0 <= i < len(tokens) else BOUNDARY

    left = tuple(item(i) for i in range(m - width, m))
    right = tuple(item(i) for i in range(m + 1, m + 1 + width))
    return FeatureVector(left=left, marker=tokens[m].norm, right=right,
                         kind=kind, width=width)


def _check_uniform(examples: Sequence[LabeledExample]) -> tuple[str, int]:
    if not examples:
        raise ValueError("no training examples")
    kind = examples[0].vector.kind
    width = examples[0].vector.width
    for ex in examples:
        if ex.vector.kind != kind or ex.vector.width != width:
            raise ValueError("mixed feature kind/width in training set")
    labels = {ex.label for ex in examples}
    if labels != set(LABELS):
        raise ValueError(f"training set must contain both labels, got {sorted(labels)}")
    return kind, width


# ---------------------------------------------------------------------------
# Naive Bayes


@dataclass
class NaiveBayesModel:
    kind: str
    width: int
    alpha: float
    priors: dict[str, float]
    # tables[label][position][value] -> smoothed probability; the reserved
    # None key holds the UNSEEN mass for that (label, position).
    tables: dict[str, dict[int, dict[str | None, float]]]

    def positions(self) -> list[int]:
        return sorted(self.tables[YES].keys())


def train_nb(examples: Sequence[LabeledExample], alpha: float = 1.0) -> NaiveBayesModel:
    """Count-table naive Bayes with add-alpha smoothing.

    Conditional tables are indexed by position offset; the per-position
    vocabulary is shared across labels and extended with one UNSEEN slot,
    so each conditional distribution sums to one.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    kind, width = _check_uniform(examples)

    n_label = {lab: 0 for lab in LABELS}
    counts: dict[str, dict[int, dict[str, int]]] = {lab: {} for lab in LABELS}
    vocab: dict[int, set[str]] = {}
    for ex in examples:
        n_label[ex.label] += 1
        for pos, value in ex.vector.items():
            vocab.setdefault(pos, set()).add(value)
            table = counts[ex.label].setdefault(pos, {})
            table[value] = table.get(value, 0) + 1

    tables: dict[str, dict[int, dict[str | None, float]]] = {lab: {} for lab in LABELS}
    for lab in LABELS:
        for pos, values in vocab.items():
            denom = n_label[lab] + alpha * (len(values) + 1)
            row: dict[str | None, float] = {}
            for v in values:
                c = counts[lab].get(pos, {}).get(v, 0)
                row[v] = (c + alpha) / denom if denom else 0.0
            row[None] = alpha / denom if denom else 0.0
            tables[lab][pos] = row

    total = sum(n_label.values())
    priors = {lab: n_label[lab] / total for lab in LABELS}
    return NaiveBayesModel(kind=kind, width=width, alpha=alpha,
                           priors=priors, tables=tables)


def _nb_posterior(model: NaiveBayesModel, vector: FeatureVector) -> float:
    joint = {}
    for lab in LABELS:
        p = model.priors[lab]
        for pos, value in vector.items():
            row = model.tables[lab][pos]
            p *= row.get(value, row[None])
        joint[lab] = p
    z = joint[YES] + joint[NO]
    if z == 0.0:
        # alpha=0 with an unseen feature: fall back to the priors alone.
        return model.priors[YES]
    return joint[YES] / z


# ---------------------------------------------------------------------------
# Maximum entropy


@dataclass
class MaxEntModel:
    kind: str
    width: int
    method: str  # GIS | IIS
    feature_index: dict[tuple[int, str, str], int]  # (position, value, label) -> id
    weights: np.ndarray
    gis_constant: int | None  # None for IIS; includes the slack feature for GIS
    iterations: int = 0
    final_ll: float = float("nan")
    ll_history: list[float] = field(default_factory=list)

    @property
    def slack_id(self) -> int | None:
        return len(self.feature_index) if self.gis_constant is not None else None


def _active_ids(
    model_index: dict[tuple[int, str, str], int],
    items: Sequence[tuple[int, str]],
    label: str,
) -> list[int]:
    ids = []
    for pos, value in items:
        fid = model_index.get((pos, value, label))
        if fid is not None:
            ids.append(fid)
    return ids


def _maxent_scores(model: MaxEntModel, items: Sequence[tuple[int, str]]) -> dict[str, float]:
    scores = {}
    for lab in LABELS:
        active = _active_ids(model.feature_index, items, lab)
        s = float(sum(model.weights[f] for f in active))
        if model.gis_constant is not None:
            s += float(model.weights[model.slack_id]) * (
                model.gis_constant - len(active)
            )
        scores[lab] = s
    return scores


def _maxent_posterior(model: MaxEntModel, vector: FeatureVector) -> float:
    scores = _maxent_scores(model, vector.items())
    m = max(scores.values())
    ey = math.exp(scores[YES] - m)
    en = math.exp(scores[NO] - m)
    return ey / (ey + en)


def train_maxent(
    examples: Sequence[LabeledExample],
    method: str = "GIS",
    max_iters: int = 200,
    ll_tolerance: float = 1e-6,
) -> MaxEntModel:
    """Fit maxent weights by generalized or improved iterative scaling.

    Iterates until the training log-likelihood improves by less than
    ``ll_tolerance`` or ``max_iters`` is reached.  GIS uses a slack
    feature so that active feature counts sum to a constant; IIS solves
    the per-feature update equation by Newton root finding.
    """
    method = method.upper()
    if method not in ("GIS", "IIS"):
        raise ValueError(f"unknown training method {method!r}")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    kind, width = _check_uniform(examples)

    items_per_example = [ex.vector.items() for ex in examples]
    index: dict[tuple[int, str, str], int] = {}
    for ex, items in zip(examples, items_per_example):
        for pos, value in items:
            key = (pos, value, ex.label)
            if key not in index:
                index[key] = len(index)
    n_features = len(index)

    # Active feature ids per (example, label).
    active: list[dict[str, list[int]]] = [
        {lab: _active_ids(index, items, lab) for lab in LABELS}
        for items in items_per_example
    ]

    if method == "GIS":
        # Strictly greater than the largest active count, so the slack
        # feature keeps a positive empirical count for every example.
        C = max(len(ids) for acts in active for ids in acts.values()) + 1
        weights = np.zeros(n_features + 1)
    else:
        C = None
        weights = np.zeros(n_features)

    empirical = np.zeros(len(weights))
    for ex, acts in zip(examples, active):
        ids = acts[ex.label]
        for f in ids:
            empirical[f] += 1.0
        if C is not None:
            empirical[n_features] += C - len(ids)

    model = MaxEntModel(kind=kind, width=width, method=method,
                        feature_index=index, weights=weights, gis_constant=C)

    def posteriors() -> tuple[list[dict[str, float]], float]:
        dists = []
        ll = 0.0
        for ex, acts in zip(examples, active):
            scores = {}
            for lab in LABELS:
                s = float(sum(weights[f] for f in acts[lab]))
                if C is not None:
                    s += float(weights[n_features]) * (C - len(acts[lab]))
                scores[lab] = s
            m = max(scores.values())
            exps = {lab: math.exp(scores[lab] - m) for lab in LABELS}
            z = sum(exps.values())
            dist = {lab: exps[lab] / z for lab in LABELS}
            dists.append(dist)
            ll += math.log(dist[ex.label])
        return dists, ll

    prev_ll = None
    for iteration in range(1, max_iters + 1):
        dists, ll = posteriors()
        if not math.isfinite(ll):
            raise RuntimeError(
                f"non-finite log-likelihood at iteration {iteration}; "
                "check the training data for degenerate features"
            )
        model.ll_history.append(ll)
        model.iterations = iteration
        if prev_ll is not None and ll - prev_ll < ll_tolerance:
            break
        prev_ll = ll

        if method == "GIS":
            expected = np.zeros(len(weights))
            for dist, acts in zip(dists, active):
                for lab in LABELS:
                    p = dist[lab]
                    for f in acts[lab]:
                        expected[f] += p
                    expected[n_features] += p * (C - len(acts[lab]))
            weights += (np.log(empirical) - np.log(expected)) / C
        else:
            weights += _iis_deltas(dists, active, empirical, n_features)

    model.weights = weights
    model.final_ll = model.ll_history[-1]
    return model


def _iis_deltas(
    dists: list[dict[str, float]],
    active: list[dict[str, list[int]]],
    empirical: np.ndarray,
    n_features: int,
    tol: float = 1e-10,
    max_newton: int = 100,
) -> np.ndarray:
    """Per-feature IIS updates.

    For each feature solve sum_m a[m] * exp(delta * m) = empirical count,
    where a[m] collects model mass p(label|x) of (example, label) pairs
    that activate the feature with m features active in total.
    """
    coeffs: list[dict[int, float]] = [dict() for _ in range(n_features)]
    for dist, acts in zip(dists, active):
        for lab in LABELS:
            ids = acts[lab]
            m = len(ids)
            if m == 0:
                continue
            p = dist[lab]
            for f in ids:
                coeffs[f][m] = coeffs[f].get(m, 0.0) + p

    deltas = np.zeros(n_features)
    for f in range(n_features):
        target = empirical[f]
        a = coeffs[f]
        delta = 0.0
        for _ in range(max_newton):
            g = sum(c * math.exp(delta * m) for m, c in a.items()) - target
            gp = sum(c * m * math.exp(delta * m) for m, c in a.items())
            step = g / gp
            delta -= step
            if abs(step) < tol:
                break
        deltas[f] = delta
    return deltas


# ---------------------------------------------------------------------------
# Classification


def classify(
    model: NaiveBayesModel | MaxEntModel, vector: FeatureVector
) -> tuple[str, float]:
    """(label, posterior probability of YES); exact ties resolve to NO."""
    if vector.kind != model.kind or vector.width != model.width:
        raise ValueError(
            f"model expects kind={model.kind} width={model.width}, "
            f"vector has kind={vector.kind} width={vector.width}"
        )
    if isinstance(model, NaiveBayesModel):
        score = _nb_posterior(model, vector)
    else:
        score = _maxent_posterior(model, vector)
    return (YES if score > 0.5 else NO), score


# ---------------------------------------------------------------------------
# Sweep over configurations


@dataclass(frozen=True)
class SweepExample:
    """One trigger match with its sentence, tags and gold label."""

    sentence: Sentence
    match: TriggerMatch
    tags: tuple[str, ...]
    label: str


@dataclass(frozen=True)
class SweepRow:
    algorithm: str
    kind: str
    width: int
    feature_count: int
    accuracy: float
    precision: float | None
    recall: float | None


def vectorize_examples(items: Sequence[SweepExample], kind: str, width: int) -> list[LabeledExample]:
    out = []
    for it in items:
        vec = featurize(it.sentence, it.match, kind, width,
                        tags=it.tags if kind == POS else None)
        out.append(LabeledExample(vector=vec, label=it.label))
    return out


def evaluate_sweep(
    train: Sequence[SweepExample],
    test: Sequence[SweepExample],
    algorithms: Sequence[str] = ("NB", "GIS", "IIS"),
    kinds: Sequence[str] = (POS, WORD),
    widths: Sequence[int] = (1, 2, 3),
    alpha: float = 1.0,
    max_iters: int = 200,
    ll_tolerance: float = 1e-6,
) -> list[SweepRow]:
    """Train and score every (algorithm, kind, width) combination."""
    if not test:
        raise ValueError("empty test set")
    rows = []
    for algorithm in algorithms:
        for kind in kinds:
            for width in widths:
                train_ex = vectorize_examples(train, kind, width)
                test_ex = vectorize_examples(test, kind, width)
                features = {(pos, v) for ex in train_ex for pos, v in ex.vector.items()}
                if algorithm == "NB":
                    model: NaiveBayesModel | MaxEntModel = train_nb(train_ex, alpha)
                else:
                    model = train_maxent(train_ex, method=algorithm,
                                         max_iters=max_iters,
                                         ll_tolerance=ll_tolerance)
                tp = fp = fn = correct = 0
                for ex in test_ex:
                    label, _ = classify(model, ex.vector)
                    if label == ex.label:
                        correct += 1
                    if label == YES and ex.label == YES:
                        tp += 1
                    elif label == YES:
                        fp += 1
                    elif ex.label == YES:
                        fn += 1
                rows.append(
                    SweepRow(
                        algorithm=algorithm,
                        kind=kind,
                        width=width,
                        feature_count=len(features),
                        accuracy=correct / len(test_ex),
                        precision=tp / (tp + fp) if tp + fp else None,
                        recall=tp / (tp + fn) if tp + fn else None,
                    )
                )
    return rows


# ---------------------------------------------------------------------------
# Labeled-example files and model persistence


def save_examples(examples: Iterable[LabeledExample], path: str | Path) -> None:
    lines = []
    for ex in examples:
        v = ex.vector
        lines.append(
            "\t".join(
                [ex.label, v.kind, str(v.width), " ".join(v.left), v.marker,
                 " ".join(v.right)]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_examples(path: str | Path) -> list[LabeledExample]:
    """One example per line: ``label kind width left marker right`` (tabs)."""
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 tab-separated fields")
        label, kind, width, left, marker, right = parts
        vec = FeatureVector(
            left=tuple(left.split()),
            marker=marker,
            right=tuple(right.split()),
            kind=kind,
            width=int(width),
        )
        out.append(LabeledExample(vector=vec, label=label))
    return out


_UNSEEN_LITERAL = "<UNSEEN>"


def save_model(model: NaiveBayesModel | MaxEntModel, path: str | Path) -> None:
    lines = [MODEL_FORMAT]
    today = _dt.date.today().isoformat()
    if isinstance(model, NaiveBayesModel):
        lines += [
            "model: nb",
            f"kind: {model.kind}",
            f"width: {model.width}",
            f"alpha: {model.alpha!r}",
            f"date: {today}",
            "",
        ]
        for lab in LABELS:
            lines.append(f"prior\t{lab}\t{model.priors[lab]!r}")
        for lab in LABELS:
            for pos in model.positions():
                for value, p in sorted(
                    model.tables[lab][pos].items(), key=lambda kv: (kv[0] is None, kv[0] or "")
                ):
                    name = _UNSEEN_LITERAL if value is None else value
                    lines.append(f"cond\t{lab}\t{pos}\t{name}\t{p!r}")
    else:
        lines += [
            f"model: {model.method.lower()}",
            f"kind: {model.kind}",
            f"width: {model.width}",
            f"C: {model.gis_constant if model.gis_constant is not None else '-'}",
            f"date: {today}",
            "",
        ]
        inverse = sorted(model.feature_index.items(), key=lambda kv: kv[1])
        for (pos, value, label), fid in inverse:
            lines.append(
                f"feature\t{pos}\t{value}\t{label}\t{float(model.weights[fid])!r}"
            )
        if model.gis_constant is not None:
            lines.append(f"slack\t{float(model.weights[model.slack_id])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> NaiveBayesModel | MaxEntModel:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or text[0] != MODEL_FORMAT:
        raise ValueError(
            f"{path}: not a {MODEL_FORMAT} file "
            f"(got {text[0] if text else 'empty file'!r})"
        )
    header: dict[str, str] = {}
    body_start = len(text)
    for i, line in enumerate(text[1:], 1):
        if not line.strip():
            body_start = i + 1
            break
        key, _, value = line.partition(":")
        header[key.strip()] = value.strip()

    kind = header["kind"]
    width = int(header["width"])
    model_type = header["model"]

    if model_type == "nb":
        priors: dict[str, float] = {}
        tables: dict[str, dict[int, dict[str | None, float]]] = {lab: {} for lab in LABELS}
        for line in text[body_start:]:
            if not line.strip():
                continue
            parts = line.split("\t")
            if parts[0] == "prior":
                priors[parts[1]] = float(parts[2])
            elif parts[0] == "cond":
                _, lab, pos, value, p = parts
                key = None if value == _UNSEEN_LITERAL else value
                tables[lab].setdefault(int(pos), {})[key] = float(p)
            else:
                raise ValueError(f"{path}: bad row {line!r}")
        return NaiveBayesModel(kind=kind, width=width, alpha=float(header["alpha"]),
                               priors=priors, tables=tables)

    if model_type in ("gis", "iis"):
        index: dict[tuple[int, str, str], int] = {}
        weights: list[float] = []
        slack: float | None = None
        for line in text[body_start:]:
            if not line.strip():
                continue
            parts = line.split("\t")
            if parts[0] == "feature":
                _, pos, value, label, w = parts
                index[(int(pos), value, label)] = len(weights)
                weights.append(float(w))
            elif parts[0] == "slack":
                slack = float(parts[1])
            else:
                raise ValueError(f"{path}: bad row {line!r}")
        c_field = header.get("C", "-")
        gis_constant = None if c_field == "-" else int(c_field)
        if gis_constant is not None:
            weights.append(slack if slack is not None else 0.0)
        return MaxEntModel(kind=kind, width=width, method=model_type.upper(),
                           feature_index=index, weights=np.array(weights),
                           gis_constant=gis_constant)

    raise ValueError(f"{path}: unknown model type {model_type!r}")
