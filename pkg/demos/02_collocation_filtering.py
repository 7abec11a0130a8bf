"""Rule-based disambiguation of candidate sentences.

The same marker word can introduce terminology or mean something plain
("called attention", "phone calls").  Collocation rules reject a match
when a known bad neighbor sits next to the marker.
"""

from mop import Document, apply_collocation_filter, extract_candidates, load_collocations, load_patterns
from mop.defaults import collocations_path, patterns_path

cascade = load_patterns(patterns_path())
rules = load_collocations(collocations_path())
print(f"{len(rules)} collocation rules loaded")

pairs = [
    # metalinguistic: a new name is conferred on a referent
    "Since the shame was seldom mentioned by the therapist, Lewis called "
    "it unacknowledged shame.",
    # plain usage of the same verb: "called attention to"
    "It was Lewis who called attention to emotional elements of the "
    "phenomenon.",
    # plain nominal usage of "coin"
    "The referee tossed a coin before the match.",
    # metalinguistic "coined the term"
    "Biologists coined the term organelle to describe these structures.",
]

for text in pairs:
    doc = Document(id="demo", text=text)
    for cand in extract_candidates(doc, cascade):
        for match in cand.matches:
            decision = apply_collocation_filter(cand, match, rules)
            marker = cand.sentence.tokens[match.marker_index].surface
            if decision.kept:
                print(f"KEEP   {marker!r:10} {text[:60]}...")
            else:
                print(f"REJECT {marker!r:10} rule={decision.rule.id!r} "
                      f"{text[:60]}...")

# Rules are a TSV file: marker, side, window, words.  Domain tuning means
# editing that file, not the code.
