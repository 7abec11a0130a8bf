"""Regenerate the desk corpus derived fixtures (gold MID and gold tags).

The pipeline regression suite asserts byte-identical output against
resources/desk_corpus/gold_mid.jsonl and exact tags against
gold_tags.tsv.  When a rule, pattern or lexicon change intentionally
alters the output, rerun this script and REVIEW THE DIFF line by line
before committing: these files are the behavioral contract.

The annotation file gold.jsonl is hand-authored and never regenerated.
"""

from pathlib import Path

from mop.corpus import load_corpus_dir, segment_sentences
from mop.defaults import (
    collocations_path,
    desk_corpus_dir,
    desk_gold_mid_path,
    desk_gold_tags_path,
    lexicon_path,
    patterns_path,
    tagger_rules_path,
)
from mop.extraction import PipelineResources, build_mid, write_mid
from mop.filtering import load_collocations
from mop.patterns import load_patterns
from mop.tagger import Tagger


def main() -> None:
    docs = load_corpus_dir(desk_corpus_dir())
    resources = PipelineResources(
        cascade=load_patterns(patterns_path()),
        tagger=Tagger.from_files(lexicon_path(), tagger_rules_path()),
        collocations=load_collocations(collocations_path()),
        filter_mode="collocation",
    )

    entries = build_mid(docs, resources)
    write_mid(entries, desk_gold_mid_path())
    print(f"wrote {desk_gold_mid_path()} ({len(entries)} entries)")

    lines = []
    for doc in docs:
        for sentence in segment_sentences(doc):
            tags = resources.tagger.tag(sentence)
            lines.append("\t".join([doc.id, str(sentence.index), " ".join(tags)]))
    Path(desk_gold_tags_path()).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {desk_gold_tags_path()} ({len(lines)} sentences)")


if __name__ == "__main__":
    main()
