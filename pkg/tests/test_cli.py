import json

import numpy as np
import pytest

from corruptvec import cli
from corruptvec.cli import config_from_flags, run

from conftest import structured_docs, write_corpus


@pytest.fixture
def corpus(tmp_path, rs):
    return str(write_corpus(tmp_path / "corpus.txt", structured_docs(rs, n_docs=60)))


TRAIN_FAST = ["--size", "8", "--epochs", "2", "--min-count", "1",
              "--sample", "0", "--threads", "1", "--negative", "3"]


def _train(corpus, out, extra=()):
    return run(["train", "--input", corpus, "--output-words", out,
                *TRAIN_FAST, *extra])


# ---------------------------------------------------------------- exit codes

def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    assert "train" in capsys.readouterr().out


def test_no_command_is_a_usage_error(capsys):
    assert run([]) == 1


def test_unknown_command_is_a_usage_error(capsys):
    assert run(["frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_unknown_flag_is_a_usage_error(corpus, capsys):
    assert run(["train", "--input", corpus, "--frobnicate"]) == 1


def test_conflicting_flags_are_rejected(corpus, capsys):
    code = run(["train", "--input", corpus, "--no-global-context",
                "--corruption", "0.5", *TRAIN_FAST])
    assert code == 1
    assert "--corruption" in capsys.readouterr().err


def test_out_of_range_rate_is_a_usage_error(corpus, capsys):
    assert run(["train", "--input", corpus, "--corruption", "1.5",
                *TRAIN_FAST]) == 1


def test_missing_input_file_is_a_runtime_error(tmp_path, capsys):
    assert run(["train", "--input", str(tmp_path / "nope.txt"),
                *TRAIN_FAST]) == 2


def test_vocab_model_mismatch_is_a_runtime_error(tmp_path, corpus, capsys):
    words = str(tmp_path / "w.txt")
    vocab = str(tmp_path / "v.tsv")
    assert _train(corpus, words, ["--save-vocab", vocab]) == 0
    (tmp_path / "other.tsv").write_text("alpha\t5\nbeta\t3\n")
    code = run(["norms", "--model", words, "--vocab", str(tmp_path / "other.tsv")])
    assert code == 2


# ---------------------------------------------------------------- flag mapping

def _parse_train(argv):
    return cli._build_parser().parse_args(["train", "--input", "x", *argv])


def test_default_flags_map_to_default_config():
    config = config_from_flags(_parse_train(["--threads", "4"]))
    assert config.dim == 100 and config.window == 5
    assert config.corruption == 0.9 and config.negatives == 5
    assert config.subsample == 1e-4 and config.learning_rate == 0.05
    assert config.epochs == 10 and config.min_count == 10
    assert config.global_context and config.combiner == "sum"
    assert config.workers == 4 and config.dtype == "float32"


def test_no_global_context_flag_flips_the_mode():
    config = config_from_flags(_parse_train(["--no-global-context",
                                             "--threads", "1"]))
    assert not config.global_context


def test_thread_env_fallback(monkeypatch):
    monkeypatch.setenv("CORRUPTVEC_THREADS", "3")
    assert config_from_flags(_parse_train([])).workers == 3
    monkeypatch.delenv("CORRUPTVEC_THREADS")
    assert config_from_flags(_parse_train([])).workers >= 1


# ---------------------------------------------------------------- pipelines

def test_train_writes_all_requested_artifacts(tmp_path, corpus, capsys):
    words = tmp_path / "w.txt"
    ctx = tmp_path / "c.txt"
    vocab = tmp_path / "v.tsv"
    code = run(["train", "--input", corpus, "--output-words", str(words),
                "--output-context", str(ctx), "--save-vocab", str(vocab),
                *TRAIN_FAST, "--report"])
    assert code == 0
    assert words.exists() and ctx.exists() and vocab.exists()
    report = json.loads(capsys.readouterr().out)
    assert report["positions"] > 0
    assert len(report["epoch_loss"]) == 2


def test_training_twice_writes_identical_bytes(tmp_path, corpus, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert _train(corpus, str(a), ["--seed", "7"]) == 0
    assert _train(corpus, str(b), ["--seed", "7"]) == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.txt"
    assert _train(corpus, str(c), ["--seed", "8"]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_embed_is_deterministic_and_row_aligned(tmp_path, corpus, capsys):
    words = str(tmp_path / "w.txt")
    assert _train(corpus, words) == 0
    out1, out2 = tmp_path / "d1.txt", tmp_path / "d2.txt"
    for out in (out1, out2):
        assert run(["embed", "--model", words, "--input", corpus,
                    "--output", str(out)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    n_docs = len(open(corpus).readlines())
    assert len(out1.read_text().splitlines()) == n_docs


def test_analogy_report_is_json(tmp_path, corpus, capsys):
    words = str(tmp_path / "w.txt")
    assert _train(corpus, words) == 0
    questions = tmp_path / "q.txt"
    questions.write_text(": topic\nt0 t1 t8 t9\nt0 t1 zz t9\n")
    capsys.readouterr()
    assert run(["analogy", "--model", words, "--questions", str(questions)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["scored"] == 1 and report["skipped"] == 1


def test_nn_lists_requested_count(tmp_path, corpus, capsys):
    words = str(tmp_path / "w.txt")
    assert _train(corpus, words) == 0
    capsys.readouterr()
    assert run(["nn", "--model", words, "--word", "t3", "--top", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["neighbors"]) == 4
    assert all(n["word"] != "t3" for n in out["neighbors"])


def test_norms_reads_counts_from_vocab_file(tmp_path, corpus, capsys):
    words = str(tmp_path / "w.txt")
    vocab = str(tmp_path / "v.tsv")
    assert _train(corpus, words, ["--save-vocab", vocab]) == 0
    capsys.readouterr()
    assert run(["norms", "--model", words, "--vocab", vocab, "--bottom", "5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["words"]) == 5
    norms = [row["norm"] for row in out["words"]]
    assert norms == sorted(norms)


def test_classify_round_trip(tmp_path, rs, capsys):
    x = np.vstack([rs.randn(30, 3) + 2, rs.randn(30, 3) - 2])
    y = np.array([1] * 30 + [0] * 30)
    np.savetxt(tmp_path / "x.txt", x)
    np.savetxt(tmp_path / "y.txt", y, fmt="%d")
    code = run(["classify", "--features", str(tmp_path / "x.txt"),
                "--labels", str(tmp_path / "y.txt"),
                "--test-features", str(tmp_path / "x.txt"),
                "--test-labels", str(tmp_path / "y.txt")])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["train_accuracy"] == 1.0
    assert out["test_error"] == 0.0


def test_diag_reports_positive_rank_correlation(tmp_path, rs, capsys):
    weights = 1.0 / np.arange(1, 21)
    weights /= weights.sum()
    docs = [[f"z{i}" for i in rs.choice(20, size=10, p=weights)]
            for _ in range(30)]
    corpus = str(write_corpus(tmp_path / "zipf.txt", docs))
    capsys.readouterr()
    assert run(["diag", "--input", corpus, "--size", "6", "--window", "3",
                "--negative", "3", "--max-docs", "30"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["spearman_rho"] > 0.0
    assert out["p_value"] < 0.05
