#!/usr/bin/env python3
"""Generates a small synthetic text problem under demo/text/: five clean
source corpora, one with half its labels shifted to the next class, and a
target corpus. Run `shapsrc value --config demo/text.toml` afterwards; the
mislabeled source (src2) should come out with the lowest value."""
import json
import os
import random

CLASSES = 3
SOURCES = 6
NOISY = 2
PER_SOURCE = 400
TARGET = 400
DOC_LEN = 10
CLASS_VOCAB = 8
SHARED_VOCAB = 1200
DISC_RATE = 0.12

rng = random.Random(7)


def doc(label):
    toks = []
    for _ in range(DOC_LEN):
        if rng.random() < DISC_RATE:
            toks.append(f"c{label}w{rng.randrange(CLASS_VOCAB)}")
        else:
            toks.append(f"shared{rng.randrange(SHARED_VOCAB)}")
    return " ".join(toks)


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "text")
    os.makedirs(out_dir, exist_ok=True)
    for s in range(SOURCES):
        with open(os.path.join(out_dir, f"src{s}.jsonl"), "w") as f:
            for _ in range(PER_SOURCE):
                label = rng.randrange(CLASSES)
                text = doc(label)
                if s == NOISY and rng.random() < 0.5:
                    label = (label + 1) % CLASSES
                f.write(json.dumps({"text": text, "label": f"L{label}"}) + "\n")
    with open(os.path.join(out_dir, "target.jsonl"), "w") as f:
        for _ in range(TARGET):
            label = rng.randrange(CLASSES)
            f.write(json.dumps({"text": doc(label), "label": f"L{label}"}) + "\n")
    print(f"wrote {SOURCES} sources and one target under {out_dir}/")


if __name__ == "__main__":
    main()
