from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corruptvec import corpus as C
from corruptvec.errors import CorpusError
from corruptvec.rng import Rng

from conftest import random_docs, write_corpus


def test_cutoff_drops_rare_words():
    vocab = C.build_vocab(iter("a a b".split()), min_count=2)
    assert vocab.words == ["a"]
    assert vocab.counts.tolist() == [2]
    assert vocab.total_tokens == 2


def test_counts_match_independent_recount(rs):
    tokens = [f"w{i}" for i in rs.zipf(1.7, 1000) % 60]
    vocab = C.build_vocab(iter(tokens), min_count=1)
    recount = Counter(tokens)
    assert len(vocab) == len(recount)
    for word, count in recount.items():
        assert vocab.counts[vocab.id_of(word)] == count
    assert vocab.total_tokens == len(tokens)


def test_ordering_descending_count_with_lexicographic_ties():
    vocab = C.build_vocab(iter("b b c c a a a d".split()), min_count=1)
    assert vocab.words == ["a", "b", "c", "d"]
    assert vocab.counts.tolist() == [3, 2, 2, 1]


def test_build_vocab_is_deterministic(rs):
    tokens = [f"w{i}" for i in rs.randint(0, 40, 500)]
    v1 = C.build_vocab(iter(tokens), 2)
    v2 = C.build_vocab(iter(tokens), 2)
    assert v1.words == v2.words and np.array_equal(v1.counts, v2.counts)


def test_empty_stream_is_an_error():
    with pytest.raises(CorpusError, match="empty corpus"):
        C.build_vocab(iter([]), 1)


def test_cutoff_removing_everything_is_an_error():
    with pytest.raises(CorpusError, match="min_count"):
        C.build_vocab(iter("a b c".split()), min_count=5)


def test_encode_drops_oov_and_counts_survivors():
    vocab = C.build_vocab(iter("a a b b".split()), 1)
    doc = C.encode("a z a", vocab)
    assert doc.tokens.tolist() == [vocab.id_of("a")] * 2
    assert doc.original_length == 2
    assert C.encode("z z", vocab).original_length == 0


def test_discard_probability_formula():
    vocab = C.build_vocab(iter(["hot"] * 100 + ["cold"]), 1)
    t = vocab.frequency(vocab.id_of("hot")) / 100  # f = 100 t
    probs = vocab.discard_probs(t)
    assert probs[vocab.id_of("hot")] == pytest.approx(0.9, abs=1e-12)


def test_subsample_identity_when_threshold_dominates(tiny_vocab):
    doc = C.Document(np.arange(10, dtype=np.int32) % len(tiny_vocab), 10)
    out = C.subsample(doc, tiny_vocab, threshold=1.0, rng=Rng(1))
    assert out.tokens.tolist() == doc.tokens.tolist()


def test_subsample_empirical_rate_matches_formula():
    vocab = C.build_vocab(iter(["x"] * 99 + ["y"]), 1)
    t = 1e-4
    p = float(vocab.discard_probs(t)[vocab.id_of("x")])
    doc = C.Document(np.full(100_000, vocab.id_of("x"), dtype=np.int32), 100_000)
    out = C.subsample(doc, vocab, t, Rng(5))
    dropped = 1 - len(out.tokens) / len(doc.tokens)
    assert dropped == pytest.approx(p, rel=0.01)


@given(st.integers(min_value=0, max_value=2**32), st.floats(min_value=0, max_value=1))
def test_subsample_preserves_original_length(seed, threshold):
    vocab = C.build_vocab(iter("a a a b b c".split()), 1)
    doc = C.Document(np.array([0, 1, 2, 0, 1, 0], dtype=np.int32), 6)
    out = C.subsample(doc, vocab, threshold, Rng(seed))
    assert out.original_length == 6
    assert len(out.tokens) <= 6


def test_vocab_roundtrips_through_dump_format(tmp_path, tiny_vocab):
    path = tmp_path / "vocab.txt"
    C.save_vocab(tiny_vocab, path)
    lines = path.read_text().splitlines()
    assert all("\t" in ln for ln in lines)
    loaded = C.load_vocab(path)
    assert loaded.words == tiny_vocab.words
    assert np.array_equal(loaded.counts, tiny_vocab.counts)


def test_load_vocab_reports_malformed_line(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text("good\t3\nbad line\n")
    with pytest.raises(CorpusError, match="line 2"):
        C.load_vocab(path)


def test_encode_corpus_offsets_partition_the_token_array(tmp_path, rs):
    docs = random_docs(rs, 15, 12)
    path = write_corpus(tmp_path / "c.txt", docs)
    vocab = C.build_vocab(C.iter_tokens(path), 1)
    tokens, offsets, lengths = C.encode_corpus(path, vocab)
    assert offsets[0] == 0 and offsets[-1] == len(tokens)
    assert np.array_equal(np.diff(offsets), lengths)
    for d, doc in enumerate(docs):
        span = tokens[offsets[d]:offsets[d + 1]]
        assert [vocab.words[i] for i in span] == doc
