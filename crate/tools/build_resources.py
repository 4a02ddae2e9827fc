#!/usr/bin/env python3
"""Regenerate the derived resource files under crates/core/data/.

Inputs are unpacked upstream packages:
  --vader    directory containing vaderSentiment/vader_lexicon.txt (MIT)
  --pattern  root of the pattern3 sdist (BSD), for the known-word list

The emoji table comes from the installed `emoji` package (BSD).
"""
import argparse
import os
import re
import unicodedata

import emoji

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "crates", "core", "data")

WORD = re.compile(r"^[a-z][a-z'\-]*[a-z]$")

# Emoji whose names carry no scorable word but whose polarity is unambiguous.
EMOJI_OVERRIDES = {
    "red_heart": "pos", "thumbs_up": "pos", "thumbs_down": "neg",
    "broken_heart": "neg", "clapping_hands": "pos", "party_popper": "pos",
    "sparkling_heart": "pos", "two_hearts": "pos", "growing_heart": "pos",
    "pile_of_poo": "neg", "face_vomiting": "neg", "nauseated_face": "neg",
    "skull": "neg", "ok_hand": "pos", "raising_hands": "pos",
    "face_with_rolling_eyes": "neg", "unamused_face": "neg",
    "smiling_face_with_heart-eyes": "pos", "face_blowing_a_kiss": "pos",
}


def sanitize(name):
    name = unicodedata.normalize("NFKD", name)
    name = name.encode("ascii", "ignore").decode("ascii").lower()
    name = re.sub(r"[^a-z0-9_]+", "_", name)
    return re.sub(r"_+", "_", name).strip("_")


def load_vader(path):
    scores = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 2:
                continue
            scores[parts[0]] = float(parts[1])
    return scores


def write_lexicons(scores):
    pos = sorted(w for w, s in scores.items() if WORD.match(w) and s > 0)
    neg = sorted(w for w, s in scores.items() if WORD.match(w) and s < 0)
    header = ";; derived from the VADER sentiment lexicon (MIT); one word per line\n"
    for name, words in (("positive-words.txt", pos), ("negative-words.txt", neg)):
        with open(os.path.join(DATA, "lexicon", name), "w", encoding="utf-8") as fh:
            fh.write(header)
            fh.write("\n".join(words) + "\n")
    return len(pos), len(neg)


def write_emoji(scores):
    rows = {}
    for chars, info in emoji.EMOJI_DATA.items():
        name = sanitize(info["en"].strip(":"))
        if not name:
            continue
        key = " ".join("U+%04X" % ord(c) for c in chars)
        rows[key] = name
    with open(os.path.join(DATA, "emoji", "emoji-map.tsv"), "w", encoding="utf-8") as fh:
        for key in sorted(rows):
            fh.write("%s\t%s\n" % (key, rows[key]))

    polarity = {}
    for name in sorted(set(rows.values())):
        if name in EMOJI_OVERRIDES:
            polarity[name] = EMOJI_OVERRIDES[name]
            continue
        total = sum(scores.get(part, 0.0) for part in name.split("_"))
        if total > 0:
            polarity[name] = "pos"
        elif total < 0:
            polarity[name] = "neg"
    with open(os.path.join(DATA, "emoji", "emoji-polarity.tsv"), "w", encoding="utf-8") as fh:
        for name in sorted(polarity):
            fh.write("%s\t%s\n" % (name, polarity[name]))
    return len(rows), len(polarity)


def write_known_words(pattern_root):
    src = os.path.join(pattern_root, "pattern3", "text", "en", "en-spelling.txt")
    words = set()
    with open(src, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith(";;;"):
                continue
            parts = line.split()
            if parts and parts[0].isalpha():
                words.add(parts[0].lower())
    with open(os.path.join(DATA, "normalization", "known-words.txt"), "w", encoding="utf-8") as fh:
        fh.write(";; derived from the pattern spelling list (BSD); one word per line\n")
        fh.write("\n".join(sorted(words)) + "\n")
    return len(words)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--vader", required=True)
    ap.add_argument("--pattern", required=True)
    args = ap.parse_args()
    scores = load_vader(os.path.join(args.vader, "vaderSentiment", "vader_lexicon.txt"))
    print("lexicons pos/neg:", write_lexicons(scores))
    print("emoji map/polarity:", write_emoji(scores))
    print("known words:", write_known_words(args.pattern))


if __name__ == "__main__":
    main()
