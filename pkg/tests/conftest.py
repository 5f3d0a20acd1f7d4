import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from corruptvec import corpus as C

# first kernel call in a session pays numba compilation; hypothesis must not
# time it out
settings.register_profile(
    "default", deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

DATA_DIR = None


def pytest_configure(config):
    global DATA_DIR
    DATA_DIR = config.rootpath / "data"


def require_dataset(name: str):
    path = DATA_DIR / name
    if not path.exists():
        pytest.skip(f"dataset {name} not present; run the matching scripts/fetch_*.py")
    return path


def write_corpus(path, docs):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(" ".join(doc) + "\n")
    return path


def random_docs(rs, n_docs, vocab_size, min_len=5, max_len=25, prefix="w"):
    docs = []
    for _ in range(n_docs):
        n = rs.randint(min_len, max_len + 1)
        docs.append([f"{prefix}{i}" for i in rs.randint(0, vocab_size, n)])
    return docs


def structured_docs(rs, n_docs=200, n_topics=5, words_per_topic=8, doc_len=30):
    """Topic-clustered documents: co-occurrence is strong inside a topic, so
    window prediction is learnable and training loss must fall."""
    docs = []
    for d in range(n_docs):
        topic = d % n_topics
        base = topic * words_per_topic
        ids = rs.randint(0, words_per_topic, doc_len) + base
        docs.append([f"t{i}" for i in ids])
    return docs


@pytest.fixture
def rs():
    return np.random.RandomState(20260814)


@pytest.fixture
def tiny_corpus(tmp_path, rs):
    docs = random_docs(rs, 40, 30)
    return write_corpus(tmp_path / "tiny.txt", docs)


@pytest.fixture
def tiny_vocab(tiny_corpus):
    return C.build_vocab(C.iter_tokens(tiny_corpus), min_count=1)
