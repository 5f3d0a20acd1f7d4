"""Document embedding (plain averaging) and vector-file serialization.

A document's representation is the average of its words' input vectors, no
corruption and no subsampling at test time. Tokens are summed in sorted-id
order so the result depends only on the bag of words, never on token order,
down to the last bit.
"""

from __future__ import annotations

import struct
import sys
from dataclasses import dataclass

import numpy as np

from .corpus import Document, Vocabulary, encode, iter_lines
from .errors import ParameterError, VectorFileError
from .model import ModelParams

BINARY_MAGIC = 0x43565731  # "CVW1"


@dataclass
class DocVector:
    values: np.ndarray
    source_length: int


def embed_document(params: ModelParams, doc: Document) -> DocVector:
    """Average of the input vectors of the document's tokens (float64).

    Multiplicity is respected; an empty document is an error because a zero
    vector would silently poison any downstream classifier.
    """
    n = len(doc.tokens)
    if n == 0:
        raise ParameterError("cannot embed empty document")
    order = np.sort(np.asarray(doc.tokens, dtype=np.int64))
    total = params.input_vectors[order].astype(np.float64).sum(axis=0)
    return DocVector(total / n, doc.original_length)


def embed_corpus(params: ModelParams, vocab: Vocabulary, corpus_path, out_path) -> int:
    """One embedding row per corpus line, written as space-separated %.6g.

    Lines with no in-vocabulary token get a row of zeros and a warning on
    stderr rather than failing the batch. Returns the number of rows written.
    """
    count = 0
    zeros = " ".join(["0"] * params.dim)
    with open(out_path, "w", encoding="utf-8") as out:
        for lineno, line in enumerate(iter_lines(corpus_path), start=1):
            doc = encode(line, vocab)
            if len(doc.tokens) == 0:
                print(f"warning: line {lineno} has no in-vocabulary tokens, "
                      "emitting zeros", file=sys.stderr)
                out.write(zeros + "\n")
            else:
                vec = embed_document(params, doc)
                out.write(" ".join(f"{x:.6g}" for x in vec.values) + "\n")
            count += 1
    return count


def save_word_vectors(params: ModelParams, vocab: Vocabulary, path,
                      binary: bool = False, which: str = "input") -> None:
    """Write one of the embedding matrices with its words.

    Text format: header line "v h", then one "word f1 ... fh" line per word
    with 6-significant-digit values. Binary format: three little-endian
    uint32 (magic 0x43565731, v, h), then per word a uint16 byte length, the
    UTF-8 word, and h little-endian float32 values. ``which`` selects the
    input (word) or output (context) matrix.
    """
    if which not in ("input", "output"):
        raise ParameterError(f"which must be 'input' or 'output', got {which!r}")
    mat = params.input_vectors if which == "input" else params.output_vectors
    if binary:
        with open(path, "wb") as fh:
            fh.write(struct.pack("<III", BINARY_MAGIC, params.vocab_size, params.dim))
            vecs = mat.astype("<f4")
            for w, word in enumerate(vocab.words):
                raw = word.encode("utf-8")
                fh.write(struct.pack("<H", len(raw)))
                fh.write(raw)
                fh.write(vecs[w].tobytes())
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{params.vocab_size} {params.dim}\n")
        for w, word in enumerate(vocab.words):
            row = " ".join(f"{x:.6g}" for x in mat[w])
            fh.write(f"{word} {row}\n")


def load_word_vectors(path):
    """Read a vector file (either format, detected by magic) back into
    (matrix, words). Parse failures carry the offending line number."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if len(head) == 4 and struct.unpack("<I", head)[0] == BINARY_MAGIC:
        return _load_binary(path)
    return _load_text(path)


def _load_text(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise VectorFileError("malformed header, expected 'v h'", line=1)
        try:
            v, h = int(parts[0]), int(parts[1])
        except ValueError:
            raise VectorFileError("malformed header, expected two integers", line=1)
        if v < 1 or h < 1:
            raise VectorFileError(f"non-positive dimensions {v} x {h}", line=1)
        mat = np.empty((v, h), dtype=np.float32)
        words: list[str] = []
        seen: set[str] = set()
        row = 0
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            if row >= v:
                raise VectorFileError(f"more than {v} vector rows", line=lineno)
            fields = line.split()
            word = fields[0]
            if word in seen:
                raise VectorFileError(f"duplicate word {word!r}", line=lineno)
            if len(fields) - 1 != h:
                raise VectorFileError(
                    f"expected {h} values for {word!r}, found {len(fields) - 1}",
                    line=lineno)
            try:
                mat[row] = [float(x) for x in fields[1:]]
            except ValueError:
                raise VectorFileError(f"non-numeric value in row for {word!r}",
                                      line=lineno)
            seen.add(word)
            words.append(word)
            row += 1
        if row != v:
            raise VectorFileError(f"header promised {v} rows, found {row}")
    return mat, words


def _load_binary(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12:
        raise VectorFileError("truncated binary header")
    magic, v, h = struct.unpack_from("<III", data, 0)
    if magic != BINARY_MAGIC:
        raise VectorFileError("bad magic number")
    if v < 1 or h < 1:
        raise VectorFileError(f"non-positive dimensions {v} x {h}")
    mat = np.empty((v, h), dtype=np.float32)
    words: list[str] = []
    seen: set[str] = set()
    pos = 12
    vec_bytes = 4 * h
    for row in range(v):
        if pos + 2 > len(data):
            raise VectorFileError(f"truncated at word {row}")
        (wlen,) = struct.unpack_from("<H", data, pos)
        pos += 2
        if pos + wlen + vec_bytes > len(data):
            raise VectorFileError(f"truncated at word {row}")
        word = data[pos:pos + wlen].decode("utf-8")
        pos += wlen
        if word in seen:
            raise VectorFileError(f"duplicate word {word!r}")
        seen.add(word)
        words.append(word)
        mat[row] = np.frombuffer(data, dtype="<f4", count=h, offset=pos)
        pos += vec_bytes
    if pos != len(data):
        raise VectorFileError(f"{len(data) - pos} trailing bytes after last vector")
    return mat, words
