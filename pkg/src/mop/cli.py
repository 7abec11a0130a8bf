"""Command-line surface: extract, train, eval, sweep, export.

Every run that writes a database also writes a manifest (config snapshot,
corpus hash, tool version, timestamp); re-running with the same inputs
reproduces the output files byte for byte.

Exit codes: 0 ok, 2 missing/unreadable resource, 3 bad training data,
4 gold/corpus alignment failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, defaults
from .corpus import Document, load_corpus_dir, load_manifest, segment_sentences
from .evaluation import (
    DEFAULT_THRESHOLD,
    AlignmentError,
    GoldRecord,
    evaluate_filtering,
    evaluate_mid,
    load_gold,
    round2,
)
from .extraction import (
    PipelineResources,
    analyze_document,
    build_mid,
    read_mid,
    write_mid,
    write_paper_view,
)
from .filtering import (
    POS,
    WORD,
    YES,
    SweepExample,
    apply_collocation_filter,
    evaluate_sweep,
    load_collocations,
    load_examples,
    load_model,
    save_model,
    train_maxent,
    train_nb,
    vectorize_examples,
)
from .patterns import candidates_from_sentences, load_patterns
from .tagger import Tagger

RESOURCE_ERROR = 2
DATA_ERROR = 3
ALIGNMENT_ERROR = 4


class ResourceError(RuntimeError):
    pass


class DataError(ValueError):
    pass


@dataclass
class PipelineConfig:
    patterns_path: Path = field(default_factory=defaults.patterns_path)
    collocations_path: Path = field(default_factory=defaults.collocations_path)
    lexicon_path: Path = field(default_factory=defaults.lexicon_path)
    rules_path: Path = field(default_factory=defaults.tagger_rules_path)
    filter_mode: str = "collocation"
    classifier: str = "GIS"
    feature_kind: str = WORD
    width: int = 1
    threshold: float = DEFAULT_THRESHOLD
    entry_policy: str = "all"
    model_path: Path | None = None

    def __post_init__(self):
        if self.width not in (1, 2, 3):
            raise DataError("width must be 1, 2 or 3")
        if self.filter_mode == "classifier" and self.model_path is None:
            raise ResourceError("classifier filtering requires --model")

    def snapshot(self) -> dict:
        return {
            "patterns": str(self.patterns_path),
            "collocations": str(self.collocations_path),
            "lexicon": str(self.lexicon_path),
            "rules": str(self.rules_path),
            "filter": self.filter_mode,
            "classifier": self.classifier,
            "kind": self.feature_kind,
            "width": self.width,
            "threshold": self.threshold,
            "entry_policy": self.entry_policy,
            "model": str(self.model_path) if self.model_path else None,
        }


def _read_config_file(path: Path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _build_config(args) -> PipelineConfig:
    file_values = _read_config_file(Path(args.config)) if getattr(args, "config", None) else {}

    def pick(flag, key, fallback):
        cli = getattr(args, flag, None)
        if cli is not None:
            return cli
        if key in file_values:
            return file_values[key]
        return fallback

    model = pick("model", "model", None)
    return PipelineConfig(
        patterns_path=Path(pick("patterns", "patterns", defaults.patterns_path())),
        collocations_path=Path(
            pick("collocations", "collocations", defaults.collocations_path())
        ),
        lexicon_path=Path(pick("lexicon", "lexicon", defaults.lexicon_path())),
        rules_path=Path(pick("rules", "rules", defaults.tagger_rules_path())),
        filter_mode=pick("filter", "filter", "collocation"),
        classifier=str(pick("algo", "algo", "GIS")).upper(),
        feature_kind=str(pick("kind", "kind", "word")).upper(),
        width=int(pick("width", "width", 1)),
        threshold=float(pick("threshold", "threshold", DEFAULT_THRESHOLD)),
        entry_policy=pick("entry_policy", "entry_policy", "all"),
        model_path=Path(model) if model else None,
    )


def _require(path: Path, what: str) -> Path:
    if not Path(path).exists():
        raise ResourceError(f"{what} not found: {path}")
    return Path(path)


def _load_resources(config: PipelineConfig) -> PipelineResources:
    cascade = load_patterns(_require(config.patterns_path, "pattern file"))
    tagger = Tagger.from_files(
        _require(config.lexicon_path, "lexicon"),
        _require(config.rules_path, "rule file"),
    )
    collocations = load_collocations(_require(config.collocations_path, "collocation file"))
    model = None
    if config.filter_mode == "classifier":
        model = load_model(_require(config.model_path, "model file"))
    return PipelineResources(
        cascade=cascade,
        tagger=tagger,
        collocations=collocations,
        filter_mode=config.filter_mode,
        model=model,
    )


def _load_docs(corpus: str) -> list[Document]:
    path = Path(corpus)
    if path.is_file():
        return load_manifest(path)
    if not path.is_dir():
        raise ResourceError(f"corpus not found: {path}")
    try:
        return load_corpus_dir(path)
    except OSError as exc:
        raise ResourceError(f"unreadable corpus file: {exc}") from exc


def _corpus_hash(docs) -> str:
    digest = hashlib.sha256()
    for doc in sorted(docs, key=lambda d: d.id):
        digest.update(doc.id.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(doc.text.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


def _write_run_manifest(path: Path, config: PipelineConfig, docs) -> None:
    manifest = {
        "tool": "mop",
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "corpus_sha256": _corpus_hash(docs),
        "config": config.snapshot(),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_extract(args) -> int:
    config = _build_config(args)
    resources = _load_resources(config)
    docs = _load_docs(args.corpus)
    entries = build_mid(docs, resources)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_mid(entries, out)
    write_paper_view(entries, out.with_suffix(".tsv"))
    _write_run_manifest(out.with_suffix(out.suffix + ".manifest.json"), config, docs)
    print(f"{len(entries)} entries -> {out}")
    return 0


def _gold_by_ref(gold: list[GoldRecord]) -> dict[tuple[str, int], GoldRecord]:
    return {g.sentence_ref: g for g in gold}


def _sweep_examples(docs, gold, resources) -> list[SweepExample]:
    """One example per trigger match in gold-covered candidate sentences."""
    by_ref = _gold_by_ref(gold)
    examples = []
    unaligned = []
    for doc in sorted(docs, key=lambda d: d.id):
        sentences = segment_sentences(doc)
        for cand in candidates_from_sentences(sentences, resources.cascade):
            record = by_ref.get(cand.sentence.ref)
            if record is None:
                unaligned.append(cand.sentence.ref)
                continue
            tags = tuple(resources.tagger.tag(cand.sentence))
            label = YES if record.is_emo else "NO"
            for match in cand.matches:
                examples.append(
                    SweepExample(sentence=cand.sentence, match=match,
                                 tags=tags, label=label)
                )
    if unaligned:
        raise AlignmentError(f"candidates without gold labels: {unaligned[:10]}")
    return examples


def cmd_train(args) -> int:
    config = _build_config(args)
    algo = args.algo.upper()
    kind = args.kind.upper()
    width = int(args.width)

    if args.data:
        examples = load_examples(_require(Path(args.data), "training data"))
        n_candidates = len(examples)
    else:
        if not (args.corpus and args.gold):
            raise DataError("train needs --data or both --corpus and --gold")
        resources = _load_resources(config)
        docs = _load_docs(args.corpus)
        gold = load_gold(_require(Path(args.gold), "gold file"))
        sweep_ex = _sweep_examples(docs, gold, resources)
        n_candidates = len({ex.sentence.ref for ex in sweep_ex})
        examples = vectorize_examples(sweep_ex, kind, width)

    try:
        if algo == "NB":
            model = train_nb(examples, alpha=args.alpha)
        else:
            model = train_maxent(examples, method=algo, max_iters=args.max_iters,
                                 ll_tolerance=args.ll_tolerance)
    except ValueError as exc:
        raise DataError(str(exc)) from exc

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, out)

    features = {(pos, v) for ex in examples for pos, v in ex.vector.items()}
    print(f"candidates: {n_candidates}")
    print(f"training vectors: {len(examples)}")
    print(f"distinct features: {len(features)}")
    if algo == "NB":
        sizes = {pos: len(model.tables[YES][pos]) - 1 for pos in model.positions()}
        print(f"vocabulary sizes per position: {sizes}")
    else:
        print(f"iterations: {model.iterations}")
        print(f"final log-likelihood: {model.final_ll:.6f}")
    print(f"model -> {out}")
    return 0


def _predictions(docs, resources) -> dict[tuple[str, int], bool]:
    predicted = {}
    for doc in docs:
        analyses = {a.sentence_ref for a in analyze_document(doc, resources)}
        for sentence in segment_sentences(doc):
            predicted[sentence.ref] = sentence.ref in analyses
    return predicted


def cmd_eval(args) -> int:
    config = _build_config(args)
    resources = _load_resources(config)
    docs = _load_docs(args.corpus)
    gold = load_gold(_require(Path(args.gold), "gold file"))

    predictions = _predictions(docs, resources)
    extractable = set()
    for doc in docs:
        for cand in candidates_from_sentences(segment_sentences(doc), resources.cascade):
            extractable.add(cand.sentence.ref)

    rows = []
    full = evaluate_filtering(predictions, gold, beta=args.beta)
    golden = evaluate_filtering(predictions, gold, beta=args.beta,
                                golden_standard=True, extractable=extractable)
    modes = [("golden-standard", golden)] if args.golden_standard else [
        ("full", full), ("golden-standard", golden)]
    print("filtering:")
    for name, metrics in modes:
        print(
            f"  {name:16s} tp={metrics.tp} fp={metrics.fp} fn={metrics.fn} "
            f"P={round2(metrics.precision)} R={round2(metrics.recall)} "
            f"F={round2(metrics.f_measure)}"
        )
        rows.append(("filtering/" + name, metrics))

    has_slots = any(g.is_emo and g.autonym for g in gold)
    if has_slots:
        entries = build_mid(docs, resources)
        report = evaluate_mid(entries, gold, threshold=args.threshold if args.threshold is not None else config.threshold,
                              entry_policy=args.entry_policy or config.entry_policy,
                              beta=args.beta)
        print("slots:")
        for name, metrics in (("autonym", report.autonym),
                              ("information", report.information),
                              ("entry", report.entry)):
            print(
                f"  {name:16s} tp={metrics.tp} fp={metrics.fp} fn={metrics.fn} "
                f"P={round2(metrics.precision)} R={round2(metrics.recall)} "
                f"F={round2(metrics.f_measure)}"
            )
            rows.append(("slots/" + name, metrics))
        print(f"records/global-F: {report.summary()}")

    if args.report_csv:
        path = Path(args.report_csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["section", "tp", "fp", "fn", "precision", "recall", "f"])
            for name, metrics in rows:
                writer.writerow(
                    [name, metrics.tp, metrics.fp, metrics.fn,
                     round2(metrics.precision), round2(metrics.recall),
                     round2(metrics.f_measure)]
                )
        print(f"report -> {path}")
    return 0


def cmd_sweep(args) -> int:
    config = _build_config(args)
    resources = _load_resources(config)
    docs = _load_docs(args.corpus)
    gold = load_gold(_require(Path(args.gold), "gold file"))
    examples = _sweep_examples(docs, gold, resources)
    if not examples:
        raise DataError("no candidates to sweep over")

    if args.mode == "held-out":
        train = [ex for i, ex in enumerate(examples) if i % 2 == 0]
        test = [ex for i, ex in enumerate(examples) if i % 2 == 1]
    else:
        train = test = examples

    try:
        rows = evaluate_sweep(train, test, alpha=args.alpha,
                              max_iters=args.max_iters,
                              ll_tolerance=args.ll_tolerance)
    except ValueError as exc:
        raise DataError(str(exc)) from exc

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "algorithm", "kind", "width", "feature_count",
                         "accuracy", "precision", "recall"])
        for row in rows:
            writer.writerow([
                args.mode, row.algorithm, row.kind, row.width, row.feature_count,
                f"{row.accuracy:.4f}",
                "NA" if row.precision is None else f"{row.precision:.4f}",
                "NA" if row.recall is None else f"{row.recall:.4f}",
            ])
    print(f"{len(rows)} rows -> {out}")
    return 0


def cmd_export(args) -> int:
    entries = read_mid(_require(Path(args.mid), "MID file"))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "tsv":
        write_paper_view(entries, out)
    else:
        write_mid(entries, out)
    print(f"{len(entries)} entries -> {out}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--patterns", help="trigger pattern file")
    p.add_argument("--collocations", help="collocation rules file")
    p.add_argument("--lexicon", help="tagging lexicon")
    p.add_argument("--rules", help="tagger transformation rules")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mop",
        description="Extract metalinguistic operations from text corpora "
                    "and compile them into MID databases.",
    )
    parser.add_argument("--version", action="version", version=f"mop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="run the pipeline and write a MID")
    _add_config_flags(p)
    p.add_argument("--corpus", required=True, help="corpus directory or manifest file")
    p.add_argument("--filter", choices=["collocation", "classifier", "none"],
                   dest="filter", default=None)
    p.add_argument("--model", help="trained filter model (classifier mode)")
    p.add_argument("--out", default="mid.jsonl")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train a candidate filter model")
    _add_config_flags(p)
    p.add_argument("--data", help="labeled example file")
    p.add_argument("--corpus", help="corpus directory (with --gold)")
    p.add_argument("--gold", help="gold annotations (with --corpus)")
    p.add_argument("--algo", choices=["nb", "gis", "iis"], required=True)
    p.add_argument("--kind", choices=["pos", "word"], required=True)
    p.add_argument("--width", type=int, choices=[1, 2, 3], required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--ll-tolerance", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score filtering and slots against gold")
    _add_config_flags(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--filter", choices=["collocation", "classifier", "none"],
                   dest="filter", default=None)
    p.add_argument("--model")
    p.add_argument("--golden-standard", action="store_true",
                   help="report only golden-standard filtering metrics")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--entry-policy", choices=["any", "all"], dest="entry_policy",
                   default=None)
    p.add_argument("--report-csv", dest="report_csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid of algorithm x kind x width scores")
    _add_config_flags(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--mode", choices=["held-in", "held-out"], default="held-in")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--ll-tolerance", type=float, default=1e-6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="re-export a MID file")
    p.add_argument("--mid", required=True)
    p.add_argument("--format", choices=["jsonl", "tsv"], default="jsonl")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AlignmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ALIGNMENT_ERROR
    except (DataError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (ResourceError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RESOURCE_ERROR


if __name__ == "__main__":
    sys.exit(main())
