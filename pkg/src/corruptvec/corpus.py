"""Corpus handling: vocabulary construction, encoding, frequent-word subsampling.

The on-disk corpus format is one document per line, tokens separated by ASCII
whitespace, UTF-8. Tokenization is a bare whitespace split; case folding and
punctuation policy belong to preprocessing scripts, not here.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import CorpusError, VocabError


@dataclass
class Vocabulary:
    """Immutable word <-> id map with counts.

    Ids are dense in [0, v), ordered by descending count with lexicographic
    tie-break, so id 0 is the most frequent word and the "top n frequent
    words" of a report is simply the id prefix [0, n).
    """

    words: list[str]
    counts: np.ndarray
    total_tokens: int
    min_count: int
    _index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self._index:
            self._index = {w: i for i, w in enumerate(self.words)}

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def id_of(self, word: str) -> int:
        try:
            return self._index[word]
        except KeyError:
            raise VocabError(f"word not in vocabulary: {word!r}") from None

    def get(self, word: str) -> int | None:
        return self._index.get(word)

    def frequency(self, word_id: int) -> float:
        return float(self.counts[word_id]) / self.total_tokens

    def discard_probs(self, threshold: float) -> np.ndarray:
        """Per-word discard probability max(0, 1 - sqrt(t/f)) as float64.

        Returns an empty array when threshold <= 0, which downstream code
        reads as "subsampling disabled".
        """
        if threshold <= 0:
            return np.empty(0, dtype=np.float64)
        freqs = self.counts.astype(np.float64) / self.total_tokens
        probs = 1.0 - np.sqrt(threshold / freqs)
        np.clip(probs, 0.0, None, out=probs)
        return probs


@dataclass
class Document:
    """Token ids plus the pre-subsampling in-vocabulary length T.

    T is fixed at encode time and scales the global-context term; subsampling
    thins ``tokens`` but never touches ``original_length``.
    """

    tokens: np.ndarray
    original_length: int

    def __len__(self) -> int:
        return len(self.tokens)


def build_vocab(token_stream: Iterable[str], min_count: int = 10) -> Vocabulary:
    """Count tokens, drop words seen fewer than ``min_count`` times.

    Raises CorpusError on an empty stream or when the cutoff removes
    every word.
    """
    if min_count < 1:
        raise CorpusError(f"min_count must be >= 1, got {min_count}")
    tally = Counter()
    saw_any = False
    for tok in token_stream:
        saw_any = True
        tally[tok] += 1
    if not saw_any:
        raise CorpusError("empty corpus")
    kept = [(w, c) for w, c in tally.items() if c >= min_count]
    if not kept:
        raise CorpusError(
            f"no words survive min_count={min_count} "
            f"(most frequent has {max(tally.values())} occurrences)"
        )
    kept.sort(key=lambda wc: (-wc[1], wc[0]))
    words = [w for w, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    return Vocabulary(words, counts, int(counts.sum()), min_count)


def encode(text_line: str, vocab: Vocabulary) -> Document:
    """Map a raw line to ids, silently dropping out-of-vocabulary tokens."""
    ids = [i for tok in text_line.split() if (i := vocab.get(tok)) is not None]
    return Document(np.array(ids, dtype=np.int32), len(ids))


def subsample(doc: Document, vocab: Vocabulary, threshold: float, rng) -> Document:
    """Independently discard frequent-word tokens; T carries over unchanged.

    A token of word w survives with probability min(1, sqrt(t/f_w)); the
    survival test consumes exactly one rng draw per token, in order.
    """
    if threshold < 0:
        raise CorpusError(f"subsample threshold must be >= 0, got {threshold}")
    if threshold == 0 or len(doc.tokens) == 0:
        return Document(doc.tokens.copy(), doc.original_length)
    discard = vocab.discard_probs(threshold)
    draws = rng.uniforms(len(doc.tokens))
    kept = doc.tokens[draws >= discard[doc.tokens]]
    return Document(kept, doc.original_length)


def iter_tokens(path) -> Iterator[str]:
    """All tokens of a corpus file in order, streaming."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield from line.split()


def iter_lines(path) -> Iterator[str]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield line.rstrip("\n")


def encode_corpus(path, vocab: Vocabulary):
    """Flatten a corpus file into (tokens, offsets, lengths) arrays.

    ``offsets`` has one extra trailing entry so document d spans
    tokens[offsets[d]:offsets[d+1]]; ``lengths[d]`` is the in-vocabulary
    token count T of document d.
    """
    flat: list[np.ndarray] = []
    offsets = [0]
    pos = 0
    for line in iter_lines(path):
        doc = encode(line, vocab)
        flat.append(doc.tokens)
        pos += len(doc.tokens)
        offsets.append(pos)
    if not flat:
        raise CorpusError("empty corpus")
    tokens = np.concatenate(flat) if pos else np.empty(0, dtype=np.int32)
    offsets_arr = np.array(offsets, dtype=np.int64)
    lengths = np.diff(offsets_arr)
    return tokens.astype(np.int32), offsets_arr, lengths


def save_vocab(vocab: Vocabulary, path) -> None:
    """One "word<TAB>count" line per word, descending count."""
    with open(path, "w", encoding="utf-8") as fh:
        for word, count in zip(vocab.words, vocab.counts):
            fh.write(f"{word}\t{int(count)}\n")


def load_vocab(path, min_count: int = 1) -> Vocabulary:
    words: list[str] = []
    counts: list[int] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, count_s = line.split("\t")
                count = int(count_s)
            except ValueError:
                raise CorpusError(f"line {lineno}: expected 'word<TAB>count', got {line!r}")
            words.append(word)
            counts.append(count)
    if not words:
        raise CorpusError("empty vocabulary file")
    arr = np.array(counts, dtype=np.int64)
    return Vocabulary(words, arr, int(arr.sum()), min_count)
