#!/usr/bin/env python3
"""Download the text8 corpus and reshape it for the trainer.

text8 ships as one 100M-character line; the trainer treats each input line
as a document, so the corpus is re-chunked into fixed-length pseudo-documents
(1000 tokens by default, matching the usual benchmark setup).
"""
import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

URL = "http://mattmahoney.net/dc/text8.zip"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data",
                    type=Path, help="output directory")
    ap.add_argument("--tokens-per-doc", type=int, default=1000)
    ap.add_argument("--url", default=URL)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    target = args.out / "text8.txt"
    if target.exists():
        print(f"{target} already present, skipping download")
        return 0

    print(f"downloading {args.url} ...", file=sys.stderr)
    raw = urllib.request.urlopen(args.url).read()
    with zipfile.ZipFile(io.BytesIO(raw)) as zf:
        text = zf.read("text8").decode("ascii")

    tokens = text.split()
    n = args.tokens_per_doc
    with open(target, "w", encoding="ascii") as fh:
        for start in range(0, len(tokens), n):
            fh.write(" ".join(tokens[start:start + n]) + "\n")
    print(f"wrote {len(tokens)} tokens to {target}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
