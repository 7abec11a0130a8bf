"""From raw text to candidate sentences.

Walks the first pipeline stages: tokenization with exact character
spans, sentence segmentation, and the trigger-pattern cascade that
nominates sentences for metalinguistic analysis.
"""

from mop import Document, compile_patterns, extract_candidates, load_patterns, tokenize
from mop.defaults import patterns_path

# --- tokenization ---------------------------------------------------------

text = 'The fluid was so-called “cell sap”, a term nobody uses now.'
print("tokens:")
for tok in tokenize(text):
    print(f"  {tok.index:2d} {tok.span} {tok.surface!r:18} norm={tok.norm!r}")

# Curly quotes normalize for matching but the original characters stay in
# the surfaces and spans, so slot strings are always verbatim.

# --- the default cascade --------------------------------------------------

cascade = load_patterns(patterns_path())
print(f"\ndefault inventory: {len(cascade)} patterns")
print("sample:", ", ".join(p.id for p in cascade.patterns[:8]), "...")

doc = Document(
    id="demo",
    text="This means that they ingest oxygen from the air via fine hollow "
         "tubes, known as tracheae. The committee will meet tomorrow. "
         "In 1965 the term soliton was coined to describe waves.",
)
print("\ncandidates:")
for cand in extract_candidates(doc, cascade):
    surfaces = cand.sentence.surfaces()
    for match in cand.matches:
        first, last = match.token_span
        print(f"  sentence {cand.sentence.index}: pattern={match.pattern_id!r} "
              f"span={surfaces[first:last + 1]}")

# --- a custom inventory ----------------------------------------------------

# The inventory is data, not code: one line per pattern.
custom = compile_patterns(
    """
    baptized: "baptized"
    baptized_quote: "baptized" QUOTE priority=10
    """
)
doc2 = Document(id="demo2", text='The sect baptized the rite “renewal”.')
for cand in extract_candidates(doc2, custom):
    print("\ncustom inventory match:", cand.matches[0].pattern_id)
