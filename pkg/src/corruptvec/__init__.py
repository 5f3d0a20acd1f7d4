"""Document embeddings by averaging word vectors trained against a
corrupted whole-document context, plus evaluation and numerical
diagnostics of the corruption-induced regularizer."""

from .corpus import Document, Vocabulary, build_vocab, encode, subsample
from .corruption import (CorruptedContext, corrupt, corrupt_bag,
                         corruption_moments)
from .errors import (CorpusError, CorruptvecError, NonFiniteComputation,
                     ParameterError, TrainingDiverged, VectorFileError,
                     VocabError)
from .inference import (DocVector, embed_corpus, embed_document,
                        load_word_vectors, save_word_vectors)
from .model import (ModelParams, NegSampleTable, TrainingInstance,
                    draw_negatives, hidden_vector, init_params, nll_and_grads,
                    sigmoid)
from .rng import Rng
from .trainer import TrainConfig, TrainReport, lr_schedule, train

__version__ = "0.1.0"

__all__ = [
    "CorpusError", "CorruptedContext", "CorruptvecError", "DocVector",
    "Document", "ModelParams", "NegSampleTable", "NonFiniteComputation",
    "ParameterError", "Rng", "TrainConfig", "TrainReport", "TrainingDiverged",
    "TrainingInstance", "VectorFileError", "VocabError", "Vocabulary",
    "build_vocab", "corrupt", "corrupt_bag", "corruption_moments",
    "draw_negatives",
    "embed_corpus", "embed_document", "encode", "hidden_vector", "init_params",
    "load_word_vectors", "lr_schedule", "nll_and_grads", "save_word_vectors",
    "sigmoid", "subsample", "train",
]
