"""End to end: compile a metalinguistic information database.

Runs the whole pipeline over the bundled desk corpus and prints the
resulting records in the four-column view, then shows the frame analysis
behind one of them.
"""

from mop import build_mid
from mop.corpus import load_corpus_dir
from mop.defaults import (
    collocations_path,
    desk_corpus_dir,
    lexicon_path,
    patterns_path,
    tagger_rules_path,
)
from mop.extraction import PipelineResources, analyze_document
from mop.filtering import load_collocations
from mop.patterns import load_patterns
from mop.tagger import Tagger

resources = PipelineResources(
    cascade=load_patterns(patterns_path()),
    tagger=Tagger.from_files(lexicon_path(), tagger_rules_path()),
    collocations=load_collocations(collocations_path()),
    filter_mode="collocation",
)
docs = load_corpus_dir(desk_corpus_dir())

entries = build_mid(docs, resources)
print(f"{len(entries)} records\n")
print(f"{'Reference':24} {'Autonym':28} {'Information':42} Markers")
for e in entries:
    info = e.information if len(e.information) <= 40 else e.information[:37] + "..."
    flags = f"  [{', '.join(sorted(e.flags))}]" if e.flags else ""
    print(f"{e.reference:24} {e.autonym:28} {info:42} {e.markers}{flags}")

# --- look inside one analysis ----------------------------------------------

doc = next(d for d in docs if d.id == "Sociology")
analysis = analyze_document(doc, resources)[0]
print(f"\nframe: {analysis.frame}")
for ch, label in analysis.labeled_chunks:
    words = " ".join(
        t.surface for t in analysis.sentence.tokens[ch.token_span[0]:ch.token_span[1] + 1]
    )
    print(f"  {label:14} {words!r}")

# Pronouns stay pronouns ("it", "They", "what"): nothing in the pipeline
# substitutes antecedents, and unexpressed slots carry the $x placeholder.
