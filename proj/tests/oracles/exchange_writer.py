"""Minimal stand-in for the embedder sidecar's writer.

Reads a JSONL corpus and writes one L2-normalized vector per document in
the exchange format, using a bag of hashed words instead of a model.
Usage: exchange_writer.py corpus.jsonl out.vec
"""
import hashlib
import json
import math
import sys

DIM = 32


def embed(text):
    v = [0.0] * DIM
    for word in text.lower().split():
        h = hashlib.sha256(word.strip(".").encode()).digest()
        v[h[0] % DIM] += 1.0 if h[1] % 2 else -1.0
    norm = math.sqrt(sum(x * x for x in v)) or 1.0
    return [x / norm for x in v]


def main(src, dst):
    with open(src, encoding="utf-8") as f:
        docs = [json.loads(line) for line in f if line.strip()]
    docs.reverse()  # order is free; the reader aligns rows to the corpus
    with open(dst, "w", encoding="utf-8") as out:
        out.write("#threatcluster-vectors v1 dim=%d kind=sbert_ht model=hash-bag count=%d\n"
                  % (DIM, len(docs)))
        for d in docs:
            out.write(d["id"] + "\t" + ",".join("%.9g" % x for x in embed(d["text"])) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
