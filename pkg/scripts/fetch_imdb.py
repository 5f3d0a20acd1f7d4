#!/usr/bin/env python3
"""Download the IMDB movie-review archive and flatten it to corpus files.

Produces five files under data/:
  imdb_train_unsup.txt   train pos+neg+unsup reviews, for representation learning
  imdb_train.txt         labeled train reviews, one per line
  imdb_train_labels.txt  1 (positive) / 0 (negative), aligned with the above
  imdb_test.txt          labeled test reviews
  imdb_test_labels.txt   aligned test labels
"""
import argparse
import re
import sys
import tarfile
import urllib.request
from pathlib import Path

URL = "https://ai.stanford.edu/~amaas/data/sentiment/aclImdb_v1.tar.gz"

_MARKUP = re.compile(r"<[^>]+>")
_NON_WORD = re.compile(r"[^a-z0-9' ]+")


def normalize(text: str) -> str:
    text = _MARKUP.sub(" ", text.lower())
    return " ".join(_NON_WORD.sub(" ", text).split())


def _reviews(tar: tarfile.TarFile, prefix: str):
    """Member order inside a tar is not guaranteed, so sort by path."""
    members = sorted(
        (m for m in tar.getmembers()
         if m.name.startswith(prefix) and m.name.endswith(".txt")),
        key=lambda m: m.name)
    for m in members:
        yield normalize(tar.extractfile(m).read().decode("utf-8"))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data",
                    type=Path, help="output directory")
    ap.add_argument("--url", default=URL)
    ap.add_argument("--archive", type=Path,
                    help="use a pre-downloaded aclImdb_v1.tar.gz instead")
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    if (args.out / "imdb_test_labels.txt").exists():
        print("imdb files already present, skipping")
        return 0

    archive = args.archive
    if archive is None:
        archive = args.out / "aclImdb_v1.tar.gz"
        if not archive.exists():
            print(f"downloading {args.url} (~80 MB) ...", file=sys.stderr)
            urllib.request.urlretrieve(args.url, archive)

    with tarfile.open(archive, "r:gz") as tar:
        splits = {
            "train_pos": list(_reviews(tar, "aclImdb/train/pos/")),
            "train_neg": list(_reviews(tar, "aclImdb/train/neg/")),
            "unsup": list(_reviews(tar, "aclImdb/train/unsup/")),
            "test_pos": list(_reviews(tar, "aclImdb/test/pos/")),
            "test_neg": list(_reviews(tar, "aclImdb/test/neg/")),
        }

    def dump(path, lines):
        with open(path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")

    dump(args.out / "imdb_train_unsup.txt",
         splits["train_pos"] + splits["train_neg"] + splits["unsup"])
    dump(args.out / "imdb_train.txt", splits["train_pos"] + splits["train_neg"])
    dump(args.out / "imdb_train_labels.txt",
         ["1"] * len(splits["train_pos"]) + ["0"] * len(splits["train_neg"]))
    dump(args.out / "imdb_test.txt", splits["test_pos"] + splits["test_neg"])
    dump(args.out / "imdb_test_labels.txt",
         ["1"] * len(splits["test_pos"]) + ["0"] * len(splits["test_neg"]))
    print(f"wrote imdb_* files to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
