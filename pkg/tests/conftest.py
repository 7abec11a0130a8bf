import pytest

from mop.corpus import Document, load_corpus_dir, segment_sentences
from mop.defaults import (
    collocations_path,
    desk_corpus_dir,
    desk_gold_mid_path,
    desk_gold_path,
    desk_gold_tags_path,
    lexicon_path,
    patterns_path,
    tagger_rules_path,
)
from mop.extraction import PipelineResources
from mop.filtering import load_collocations
from mop.patterns import load_patterns
from mop.tagger import Tagger


@pytest.fixture(scope="session")
def cascade():
    return load_patterns(patterns_path())


@pytest.fixture(scope="session")
def tagger():
    return Tagger.from_files(lexicon_path(), tagger_rules_path())


@pytest.fixture(scope="session")
def collocations():
    return load_collocations(collocations_path())


@pytest.fixture(scope="session")
def resources(cascade, tagger, collocations):
    return PipelineResources(
        cascade=cascade,
        tagger=tagger,
        collocations=collocations,
        filter_mode="collocation",
    )


@pytest.fixture(scope="session")
def desk_docs():
    return load_corpus_dir(desk_corpus_dir())


def sentence_of(text: str, doc_id: str = "test"):
    """Single tokenized sentence from raw text."""
    sentences = segment_sentences(Document(id=doc_id, text=text))
    assert len(sentences) == 1, f"expected one sentence, got {len(sentences)}"
    return sentences[0]


@pytest.fixture(scope="session")
def make_sentence():
    return sentence_of
