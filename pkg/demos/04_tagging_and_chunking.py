"""The grammatical substrate: tagging, chunking, PP attachment.

A lexicon assigns most-frequent tags, transformation rules patch them in
context, a regex-over-tags grammar groups tokens into NP/VP/PP chunks,
and a limited attachment pass links of/for/in/with/on prepositional
phrases to their host noun phrase.
"""

from mop import Document, segment_sentences
from mop.defaults import lexicon_path, tagger_rules_path
from mop.tagger import Tagger, attach_pp, chunk, extended_np_span

tagger = Tagger.from_files(lexicon_path(), tagger_rules_path())

texts = [
    "The jellylike substance in cells is called cytoplasm.",
    "This leap brings cultural citizenship in line with what has been "
    "called the politics of citizenship.",
    "Such a mapping creates what Croft calls a description constraint.",
]

for text in texts:
    sentence = segment_sentences(Document(id="demo", text=text))[0]
    tags = tagger.tag(sentence)
    print(" ".join(f"{t.surface}/{g}" for t, g in zip(sentence.tokens, tags)))

    chunks = attach_pp(chunk(sentence.tokens, tags), sentence.tokens)
    parts = []
    for i, ch in enumerate(chunks):
        words = " ".join(t.surface for t in sentence.tokens[ch.token_span[0]:ch.token_span[1] + 1])
        mark = f"->NP{ch.attach}" if ch.attach is not None else ""
        parts.append(f"[{ch.kind}{mark} {words}]")
    print("  " + " ".join(parts))

    for i, ch in enumerate(chunks):
        if ch.kind == "NP":
            first, last = extended_np_span(chunks, i)
            if (first, last) != ch.token_span:
                ext = " ".join(t.surface for t in sentence.tokens[first:last + 1])
                print(f"  extended NP: {ext!r}")
    print()

# The participle rewrite is visible above: "called" surfaces as VBD from
# the lexicon but becomes VBN after an auxiliary, which is what separates
# "is called X" (name-bearing) from "Lewis called it X" (name-conferral).
