#!/usr/bin/env python3
"""Convert the Keras IMDB archive into the text layout read by `bowtie prepare kid`.

Writes `train_sequences.txt` and `test_sequences.txt` (one review per line,
`label<TAB>v1 v2 ...`) and copies the word index. Values are emitted the way
`keras.datasets.imdb.load_data()` returns them with default arguments: a start
marker 1 followed by each word rank plus 3.

    python3 scripts/kid_npz_to_text.py --npz imdb.npz \
        --word-index imdb_word_index.json --output data/kid
"""

import argparse
import shutil
from pathlib import Path

import numpy as np

START_CHAR = 1
INDEX_FROM = 3


def write_split(path, xs, ys):
    with open(path, "w") as f:
        for seq, label in zip(xs, ys):
            values = [START_CHAR] + [int(w) + INDEX_FROM for w in seq]
            f.write(f"{int(label)}\t{' '.join(map(str, values))}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--npz", required=True, type=Path)
    ap.add_argument("--word-index", required=True, type=Path)
    ap.add_argument("--output", required=True, type=Path)
    args = ap.parse_args()

    args.output.mkdir(parents=True, exist_ok=True)
    with np.load(args.npz, allow_pickle=True) as f:
        write_split(args.output / "train_sequences.txt", f["x_train"], f["y_train"])
        write_split(args.output / "test_sequences.txt", f["x_test"], f["y_test"])
    shutil.copyfile(args.word_index, args.output / "imdb_word_index.json")


if __name__ == "__main__":
    main()
