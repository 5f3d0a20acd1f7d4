#!/usr/bin/env python3
"""Download the standard word-analogy question set (14 categories)."""
import argparse
import sys
import urllib.request
from pathlib import Path

URL = ("https://raw.githubusercontent.com/tmikolov/word2vec/master/"
       "questions-words.txt")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data",
                    type=Path, help="output directory")
    ap.add_argument("--url", default=URL)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / "questions-words.txt"
    if target.exists():
        print(f"{target} already present, skipping download")
        return 0
    print(f"downloading {args.url} ...", file=sys.stderr)
    target.write_bytes(urllib.request.urlopen(args.url).read())
    print(f"wrote {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
