#!/usr/bin/env python3
"""Write the bundled synthetic irony corpora used by tests and the fallback
acceptance run.

The tweets are template-generated stand-ins for the shape of the real data:
mentions, links, hashtags, elongations, emoji names, and four label classes
(0 non-irony, 1 polarity-contrast irony, 2 other verbal irony, 3 situational
irony). A fixed fraction of labels is flipped so the task is not trivially
separable.

    python3 tools/make_synthetic_corpus.py            # default sizes
    python3 tools/make_synthetic_corpus.py --n 800 --noise 0.1 --seed 7
"""
import argparse
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "crates", "core", "tests", "fixtures")

USERS = ["@jess_k", "@mikeyb", "@the_real_tom", "@sarahlou", "@dan_w", "@katie_r", "@nightowl"]
URLS = ["http://t.co/a8Xk2", "https://t.co/Qm3", "http://bit.ly/2zzR"]
TAGS = ["#monday", "#life", "#work", "#fml", "#blessed", "#commute", "#weekend", "#news"]
EMOJI_POS = [":red_heart:", ":smiling_face_with_smiling_eyes:", ":party_popper:", ":thumbs_up:"]
EMOJI_NEG = [":pouting_face:", ":crying_face:", ":broken_heart:", ":unamused_face:"]
EMOJI_WINK = [":winking_face:", ":face_with_rolling_eyes:", ":upside-down_face:"]

NEG_EVENTS = [
    "being stuck in traffic for two hours", "working a double shift on my birthday",
    "getting a parking ticket", "waking up with the flu", "my phone dying at 2 percent",
    "the wifi going down again", "missing the last bus home", "spilling coffee on my laptop",
    "doing taxes all weekend", "sitting in the dentist chair", "getting rained on",
    "having three exams tomorrow", "losing my keys again", "being ignored all day",
    "cleaning up after the party", "the train being delayed", "a flat tire on the highway",
    "waiting on hold for an hour", "the heating breaking in january", "burning dinner",
]
POS_EVENTS = [
    "a sunny day at the beach", "dinner with my best friends", "getting a promotion",
    "finishing my thesis", "a surprise visit from my sister", "the new album", "a lazy sunday",
    "pizza night", "finally seeing the concert", "my team winning the final",
    "a long weekend", "fresh snow on the mountains", "coffee with mom", "a quiet morning",
]
NEUTRAL = [
    "the meeting moved to 3pm", "new bus schedule starts next week", "city council votes on the budget tonight",
    "the store opens at nine", "reading a book about history", "weather forecast says clouds tomorrow",
    "the game starts at eight", "updated my phone this morning", "train to boston leaves at noon",
    "the library extended its hours", "election results expected later", "taking the dog for a walk",
]
POS_OPENERS = ["I just love", "Nothing better than", "So glad about", "Can't wait for more of",
               "Really enjoying", "Best feeling ever:", "Absolutely thrilled about", "Loving"]
NEG_OPENERS = ["I hate", "So annoyed about", "Really tired of", "Ugh,", "Worst day ever with",
               "Can't stand", "Feeling awful after", "Not happy about"]
POS_PLAIN = ["Really enjoyed", "So happy about", "Thankful for", "Loved", "Great time with", "Excited for"]
SARCASM = [
    "Oh yeah, because {x} is exactly what this country needs",
    "Sure {u}, {x} will totally fix everything",
    "Wow, what a shock, {x}",
    "Clearly {x} was the smartest plan anyone had",
    "Yeah right, {x}. Tell me another one",
    "Because obviously {x} makes perfect sense",
    "Oh sure, {x}, said nobody ever",
    "Genius move: {x}",
]
SARCASM_X = [
    "another meeting about meetings", "raising prices again", "a politician keeping a promise",
    "my landlord fixing the sink", "the printer working on the first try", "a quick five minute call",
    "the cable guy showing up on time", "adding more ads to the app", "moving the deadline forward",
    "a reply all to the whole company",
]
SITUATIONS = [
    "The fire station burned down last night", "Traffic safety seminar cancelled due to traffic",
    "Ran out of ink while printing the ink order", "Got a parking ticket at the police charity run",
    "The weather app crashed because of the storm", "Slipped on the wet floor sign",
    "The diet seminar had a free donut buffet", "My umbrella blew away in the first rain of the year",
    "The anti virus update gave my laptop a virus", "Lost my phone while posting about never losing my phone",
    "The punctuality workshop started an hour late", "The silent retreat was next to a construction site",
]


def elongate(word, rng):
    if len(word) < 3 or not word.isalpha():
        return word
    i = rng.randrange(len(word))
    return word[: i + 1] + word[i] * rng.randint(2, 4) + word[i + 1 :]


def decorate(text, rng, emoji_pool):
    words = text.split()
    if rng.random() < 0.25:
        j = rng.randrange(len(words))
        words[j] = elongate(words[j], rng)
    text = " ".join(words)
    if rng.random() < 0.3:
        text = rng.choice(USERS) + " " + text
    if rng.random() < 0.4 and emoji_pool:
        text += " " + rng.choice(emoji_pool)
    if rng.random() < 0.35:
        text += " " + rng.choice(TAGS)
    if rng.random() < 0.15:
        text += " " + rng.choice(URLS)
    if rng.random() < 0.2:
        text += rng.choice(["!", "!!!", "...", " lol", " :)"])
    return text


def tweet(label, rng):
    if label == 1:
        text = f"{rng.choice(POS_OPENERS)} {rng.choice(NEG_EVENTS)}"
        return decorate(text, rng, EMOJI_POS + EMOJI_WINK)
    if label == 2:
        text = rng.choice(SARCASM).format(x=rng.choice(SARCASM_X), u=rng.choice(USERS))
        return decorate(text, rng, EMOJI_WINK)
    if label == 3:
        return decorate(rng.choice(SITUATIONS), rng, EMOJI_NEG + EMOJI_WINK)
    kind = rng.random()
    if kind < 0.35:
        text = f"{rng.choice(POS_PLAIN)} {rng.choice(POS_EVENTS)}"
        return decorate(text, rng, EMOJI_POS)
    if kind < 0.7:
        text = f"{rng.choice(NEG_OPENERS)} {rng.choice(NEG_EVENTS)}"
        return decorate(text, rng, EMOJI_NEG)
    return decorate(rng.choice(NEUTRAL).capitalize(), rng, [])


def generate(n, noise, seed, weights):
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        label = rng.choices(range(4), weights=weights)[0]
        text = tweet(label, rng)
        if rng.random() < noise:
            label = rng.choice([c for c in range(4) if c != label])
        rows.append((i + 1, label, text))
    return rows


def write(path, rows, binary):
    with open(path, "w", encoding="utf-8") as f:
        f.write("Tweet index\tLabel\tTweet text\n")
        for i, label, text in rows:
            if binary:
                label = int(label > 0)
            f.write(f"{i}\t{label}\t{text}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=480)
    ap.add_argument("--noise", type=float, default=0.10)
    ap.add_argument("--seed", type=int, default=2018)
    ap.add_argument("--out", default=FIXTURES)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    weights = [0.5, 0.25, 0.15, 0.10]
    rows = generate(args.n, args.noise, args.seed, weights)
    write(os.path.join(args.out, "synthetic-A.txt"), rows, binary=True)
    write(os.path.join(args.out, "synthetic-B.txt"), rows, binary=False)

    toy = generate(30, 0.0, args.seed + 1, [0.4, 0.2, 0.2, 0.2])
    write(os.path.join(args.out, "toy-A.txt"), toy, binary=True)
    write(os.path.join(args.out, "toy-B.txt"), toy, binary=False)
    with open(os.path.join(args.out, "toy-unlabeled.txt"), "w", encoding="utf-8") as f:
        f.write("Tweet index\tTweet text\n")
        for i, _, text in generate(8, 0.0, args.seed + 2, weights):
            f.write(f"{i}\t{text}\n")


if __name__ == "__main__":
    main()
