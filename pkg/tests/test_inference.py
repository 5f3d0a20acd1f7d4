import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corruptvec import corpus as C
from corruptvec import inference as I
from corruptvec import model as M
from corruptvec.errors import ParameterError, VectorFileError


def _doc(ids):
    arr = np.array(ids, dtype=np.int32)
    return C.Document(arr, len(arr))


def _params(rs, v=12, h=5):
    return M.ModelParams(rs.randn(v, h).astype(np.float32),
                         np.zeros((v, h), dtype=np.float32))


def _vocab(v):
    words = [f"w{i}" for i in range(v)]
    counts = np.arange(v, 0, -1, dtype=np.int64)
    return C.Vocabulary(words, counts, int(counts.sum()), 1)


def test_single_token_doc_is_exactly_its_word_vector(rs):
    params = _params(rs)
    vec = I.embed_document(params, _doc([4]))
    assert np.array_equal(vec.values, params.input_vectors[4].astype(np.float64))


def test_multiplicity_weighted_average(rs):
    params = _params(rs)
    vec = I.embed_document(params, _doc([2, 2, 5]))
    u = params.input_vectors.astype(np.float64)
    assert np.allclose(vec.values, (2 * u[2] + u[5]) / 3, rtol=1e-15)


def test_empty_document_is_an_error(rs):
    with pytest.raises(ParameterError, match="cannot embed empty document"):
        I.embed_document(_params(rs), _doc([]))


@given(st.lists(st.integers(min_value=0, max_value=11), min_size=1, max_size=30),
       st.integers(min_value=0, max_value=2**32))
def test_embedding_is_exactly_permutation_invariant(ids, seed):
    rs = np.random.RandomState(seed % 2**31)
    params = _params(rs)
    shuffled = list(ids)
    rs.shuffle(shuffled)
    a = I.embed_document(params, _doc(ids)).values
    b = I.embed_document(params, _doc(shuffled)).values
    assert np.array_equal(a, b)


def test_concatenation_linearity_exact_on_dyadic_vectors():
    # entries are multiples of 2^-8 and lengths powers of two, so every
    # intermediate value is exact and the identity holds bitwise
    rs = np.random.RandomState(0)
    vals = rs.randint(-64, 65, size=(12, 5)).astype(np.float32) / 256.0
    params = M.ModelParams(vals, np.zeros_like(vals))
    a, b = [0, 3, 5, 1], [2, 2, 6, 7]
    da = I.embed_document(params, _doc(a)).values
    db = I.embed_document(params, _doc(b)).values
    dab = I.embed_document(params, _doc(a + b)).values
    assert np.array_equal(dab, (len(a) * da + len(b) * db) / (len(a) + len(b)))


def test_concatenation_linearity_general(rs):
    params = _params(rs)
    a, b = [0, 1, 2], [3, 4, 5, 6, 7]
    da = I.embed_document(params, _doc(a)).values
    db = I.embed_document(params, _doc(b)).values
    dab = I.embed_document(params, _doc(a + b)).values
    assert np.allclose(dab, (3 * da + 5 * db) / 8, rtol=1e-12)


def test_batch_embedding_equals_per_document_loop(tmp_path, rs):
    params = _params(rs)
    vocab = _vocab(12)
    lines = ["w1 w2 w1", "w5", "w0 w3 w4 w0 w0"]
    src = tmp_path / "docs.txt"
    src.write_text("\n".join(lines) + "\n")
    out = tmp_path / "vecs.txt"
    count = I.embed_corpus(params, vocab, src, out)
    assert count == 3
    rows = out.read_text().splitlines()
    for line, row in zip(lines, rows):
        expect = I.embed_document(params, C.encode(line, vocab)).values
        assert row == " ".join(f"{x:.6g}" for x in expect)


def test_oov_only_line_emits_zeros_and_warns(tmp_path, rs, capsys):
    params = _params(rs)
    vocab = _vocab(12)
    src = tmp_path / "docs.txt"
    src.write_text("w1 w2\nunknown tokens only\nw3\n")
    out = tmp_path / "vecs.txt"
    assert I.embed_corpus(params, vocab, src, out) == 3
    rows = out.read_text().splitlines()
    assert rows[1] == " ".join(["0"] * 5)
    assert "line 2" in capsys.readouterr().err


# ---------------------------------------------------------------- formats

def test_text_roundtrip_within_format_precision(tmp_path, rs):
    params = _params(rs, v=20, h=7)
    vocab = _vocab(20)
    path = tmp_path / "w.txt"
    I.save_word_vectors(params, vocab, path)
    header = path.read_text().splitlines()[0]
    assert header == "20 7"
    mat, words = I.load_word_vectors(path)
    assert words == vocab.words
    orig = params.input_vectors.astype(np.float64)
    # six significant digits per entry
    assert np.all(np.abs(mat - orig) <= 5e-6 * np.abs(orig) + 1e-12)


def test_binary_roundtrip_is_exact(tmp_path, rs):
    params = _params(rs, v=9, h=4)
    vocab = _vocab(9)
    path = tmp_path / "w.bin"
    I.save_word_vectors(params, vocab, path, binary=True)
    mat, words = I.load_word_vectors(path)
    assert words == vocab.words
    assert np.array_equal(mat, params.input_vectors)


def test_malformed_header_names_line_one(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("just-one-field\nword 1 2\n")
    with pytest.raises(VectorFileError, match="line 1"):
        I.load_word_vectors(path)


def test_wrong_row_width_names_its_line(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("2 3\nalpha 1 2 3\nbeta 1 2 3 4\n")
    with pytest.raises(VectorFileError, match="line 3"):
        I.load_word_vectors(path)


def test_duplicate_word_names_its_line(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("2 2\nsame 1 2\nsame 3 4\n")
    with pytest.raises(VectorFileError, match="line 3.*duplicate"):
        I.load_word_vectors(path)


def test_row_count_mismatch_is_detected(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("3 2\nalpha 1 2\nbeta 3 4\n")
    with pytest.raises(VectorFileError, match="promised 3"):
        I.load_word_vectors(path)


def test_truncated_binary_is_detected(tmp_path, rs):
    params = _params(rs, v=5, h=3)
    path = tmp_path / "w.bin"
    I.save_word_vectors(params, _vocab(5), path, binary=True)
    data = path.read_bytes()
    path.write_bytes(data[:-6])
    with pytest.raises(VectorFileError, match="truncated"):
        I.load_word_vectors(path)


def test_output_matrix_can_be_saved(tmp_path, rs):
    params = M.ModelParams(rs.randn(4, 3).astype(np.float32),
                           rs.randn(4, 3).astype(np.float32))
    path = tmp_path / "ctx.txt"
    I.save_word_vectors(params, _vocab(4), path, which="output")
    mat, _ = I.load_word_vectors(path)
    ctx = params.output_vectors.astype(np.float64)
    assert np.all(np.abs(mat - ctx) <= 5e-6 * np.abs(ctx) + 1e-12)
