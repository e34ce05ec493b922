#!/usr/bin/env python3
"""Generate the bundled synthetic archaic -> simple parallel corpus.

Each pair renders the same sentence plan twice: once with archaic
vocabulary and verb endings, once in plain modern English. The simple side
occasionally carries quotes, parenthetical glosses and asterisks so the
scrubbing step has something to remove. A share of pairs contain no archaic
forms at all and come out identical.
"""

import argparse
import random
from pathlib import Path

PRONOUNS = [
    # (archaic subject, simple subject, archaic object, simple object, person)
    ("thou", "you", "thee", "you", "2"),
    ("ye", "you", "you", "you", "2p"),
    ("he", "he", "him", "him", "3"),
    ("she", "she", "her", "her", "3"),
    ("I", "I", "me", "me", "1"),
    ("we", "we", "us", "us", "1p"),
    ("they", "they", "them", "them", "3p"),
]

NOUNS = [
    "king", "servant", "shepherd", "city", "house", "field", "river", "stone",
    "bread", "sword", "people", "prophet", "temple", "mountain", "gate", "vineyard",
    "daughter", "son", "brother", "woman", "man", "father", "mother", "elder",
    "camel", "sheep", "fire", "water", "road", "wall",
]

ADJECTIVES = ["old", "great", "small", "holy", "wise", "poor", "rich", "dark", "high", "young"]

# verb: (base, third person singular, past)
VERBS = [
    ("go", "goes", "went"), ("make", "makes", "made"), ("see", "sees", "saw"),
    ("take", "takes", "took"), ("give", "gives", "gave"), ("speak", "speaks", "spoke"),
    ("keep", "keeps", "kept"), ("bring", "brings", "brought"), ("love", "loves", "loved"),
    ("build", "builds", "built"), ("find", "finds", "found"), ("call", "calls", "called"),
    ("hear", "hears", "heard"), ("know", "knows", "knew"), ("seek", "seeks", "sought"),
]

ARCHAIC_PAST = {"spoke": "spake", "gave": "gave", "saw": "saw"}

PLACES = ["the city", "the field", "the river", "the temple", "the mountain", "the gate", "the house"]

AUX_ARCHAIC = {"2": ("shalt", "art", "hast", "dost"), "3": ("shall", "is", "hath", "doth")}


def archaic_present(verb, person):
    base, third, _ = verb
    if person == "2":
        return base + ("est" if not base.endswith("e") else "st")
    if person == "3":
        return (base if not base.endswith("e") else base[:-1]) + "eth"
    return base


def simple_present(verb, person):
    base, third, _ = verb
    return third if person == "3" else base


def noun_phrase(rng):
    noun = rng.choice(NOUNS)
    if rng.random() < 0.4:
        return f"the {rng.choice(ADJECTIVES)} {noun}", noun
    return f"the {noun}", noun


def make_pair(rng):
    """Returns (archaic, simple) raw lines."""
    kind = rng.randrange(8)
    asub, ssub, aobj, sobj, person = rng.choice(PRONOUNS)
    verb = rng.choice(VERBS)
    np, noun = noun_phrase(rng)
    place = rng.choice(PLACES)
    if kind == 0:
        a = f"{asub} {archaic_present(verb, person)} {np} unto {place} ."
        s = f"{ssub} {simple_present(verb, person)} {np} to {place} ."
    elif kind == 1:
        past = verb[2]
        a = f"and it came to pass that {asub} {ARCHAIC_PAST.get(past, past)} {np} ."
        s = f"then {ssub} {past} {np} ."
    elif kind == 2:
        a = f"behold , {np} is in {place} ."
        s = f"look , {np} is in {place} ."
    elif kind == 3:
        if person in ("2", "3"):
            a = f"{asub} {AUX_ARCHAIC[person][0]} {verb[0]} {np} ."
            s = f"{ssub} will {verb[0]} {np} ."
        else:
            a = f"{asub} shall {verb[0]} {np} ."
            s = f"{ssub} will {verb[0]} {np} ."
    elif kind == 4:
        a = f"wherefore {AUX_ARCHAIC['2'][3]} thou {verb[0]} {np} ?"
        s = f"why do you {verb[0]} {np} ?"
    elif kind == 5:
        a = f"verily I say unto {aobj} , {np} {archaic_present(verb, '3')} {place} ."
        s = f"truly I tell {sobj} , {np} {simple_present(verb, '3')} {place} ."
    elif kind == 6:
        a = f"thy {noun} hath {verb[2]} {place} ."
        s = f"your {noun} has {verb[2]} {place} ."
    else:
        # Nothing archaic: both sides agree.
        a = f"{np} {verb[2]} {place} ."
        s = a
    return a, s


def decorate_simple(rng, s):
    r = rng.random()
    words = s.split()
    if r < 0.06 and len(words) > 2:
        return '" ' + s + ' "'
    if r < 0.12:
        gloss = rng.choice(["( that is , long ago )", "( see above )", "( or perhaps )"])
        return " ".join(words[:-1] + [gloss, words[-1]])
    if r < 0.16:
        return "* " + s
    return s


def capitalize(s):
    return s[0].upper() + s[1:] if s and s[0].isalpha() else s


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "toy")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    normal, simple = [], []
    for _ in range(args.pairs):
        a, s = make_pair(rng)
        normal.append(capitalize(a))
        simple.append(decorate_simple(rng, capitalize(s)))
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "normal.txt").write_text("\n".join(normal) + "\n", encoding="utf-8")
    (args.out / "simple.txt").write_text("\n".join(simple) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
