"""biotok: subword vocabularies, pretraining data and benchmark metrics
for biomedical NLP pipelines."""

__version__ = "0.1.0"

from .corpus import (
    CorpusStats,
    Document,
    Sentence,
    build_word_frequencies,
    load_corpus,
    load_word_frequencies,
    save_word_frequencies,
    split_sentences,
)
from .errors import BiotokError, ConfigError, DataError, VocabFormatError
from .metrics import (
    BlurbScore,
    MetricReport,
    accuracy,
    blurb_score,
    entity_f1,
    entity_f1_dataset,
    hoc_micro_f1,
    mean_score,
    micro_f1,
    pearson,
    word_macro_f1_pico,
)
from .pretrain import (
    IGNORE_INDEX,
    MaskedExample,
    MaskingPlan,
    MaskingSchedule,
    NspPair,
    apply_plan,
    build_nsp_pairs,
    make_masked_example,
    masking_rate,
    select_targets,
)
from .taskprep import (
    EntitySpan,
    PicoLabels,
    PreparedExample,
    RelationInstance,
    TagSequence,
    convert_scheme,
    expand_negatives,
    prepare_task_encoding,
    spans_to_tags,
    tags_to_spans,
    transform_relation,
)
from .tokenizer import (
    Encoding,
    TokenizerConfig,
    WordPieceTokenizer,
    decode,
    encode,
    encode_pair,
    normalize,
    pre_tokenize,
    wordpiece_tokenize,
)
from .vocab import (
    MergeRecord,
    VocabTrainConfig,
    Vocabulary,
    load_vocab,
    replay_merges,
    save_vocab,
    shatter,
    train_bpe,
    train_wordpiece,
)
from .analysis import avg_length, compare_vocabs, fragmentation_report
