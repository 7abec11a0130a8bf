"""mop: metalinguistic operation processor.

A library for locating sentences that introduce, name or explain
terminology (EMOs: explicit metalinguistic operations), filtering out
look-alikes, labeling their constituents, and compiling the results
into metalinguistic information databases (MIDs).
"""

__version__ = "0.1.0"

from .corpus import Document, Sentence, Token, load_corpus_dir, segment_sentences, tokenize
from .patterns import (
    Cascade,
    EmoCandidate,
    TriggerMatch,
    TriggerPattern,
    compile_patterns,
    extract_candidates,
    load_patterns,
    scan,
)
from .filtering import (
    BOUNDARY,
    NO,
    POS,
    WORD,
    YES,
    CollocationRule,
    FeatureVector,
    LabeledExample,
    MaxEntModel,
    NaiveBayesModel,
    apply_collocation_filter,
    classify,
    evaluate_sweep,
    featurize,
    load_collocations,
    load_model,
    save_model,
    train_maxent,
    train_nb,
)
from .tagger import Chunk, Tagger, attach_pp, chunk, pos_tag
from .extraction import (
    EmoAnalysis,
    MidEntry,
    PipelineResources,
    build_mid,
    fill_template,
    label_constituents,
    read_mid,
    write_mid,
)
from .evaluation import (
    GoldRecord,
    Metrics,
    compute_prf,
    evaluate_filtering,
    evaluate_mid,
    f_measure,
    load_gold,
    score_entry,
    slot_similarity,
)
