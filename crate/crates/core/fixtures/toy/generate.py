#!/usr/bin/env python3
"""Regenerates the toy fixture: corpus/, thesaurus.tsv, sat.txt, nm.csv.

Deterministic (fixed seed). Pair words never occur in filler sentences, so
every phrase joining two pair words comes from a planted relational sentence.
"""
import os
import random
import re

HERE = os.path.dirname(os.path.abspath(__file__))
rng = random.Random(20050801)

RELATIONS = {
    "sound": {
        "pairs": [("cat", "meow"), ("dog", "bark"), ("cow", "moo"), ("duck", "quack"),
                  ("sheep", "bleat"), ("lion", "roar"), ("owl", "hoot")],
        "fwd": ["{a} says {b}", "the {a} gave a {b}", "every {a} can {b}"],
        "rev": ["{b} said the {a}", "a {b} from the {a}", "{b} came from a {a}"],
        "nm": ("product", "participatory"),
    },
    "material": {
        "pairs": [("mason", "stone"), ("carpenter", "wood"), ("potter", "clay"),
                  ("smith", "iron"), ("weaver", "wool"), ("glazier", "glass")],
        "fwd": ["{a} shapes the {b}", "{a} works with {b}", "the {a} carves {b}"],
        "rev": ["{b} shaped by the {a}", "{b} is worked by {a}"],
        "nm": ("material", "qualitative"),
    },
    "growth": {
        "pairs": [("cub", "bear"), ("foal", "mare"), ("chick", "hen"), ("fawn", "deer"),
                  ("tadpole", "frog"), ("larva", "beetle")],
        "fwd": ["{a} grows into a {b}", "{a} becomes a {b}", "{a} will become {b}"],
        "rev": ["{b} was once a {a}", "{b} raises its {a}"],
        "nm": ("time_through", "temporal"),
    },
    "container": {
        "pairs": [("bottle", "wine"), ("wallet", "money"), ("quiver", "arrow"),
                  ("vase", "tulip"), ("envelope", "letter"), ("jar", "honey")],
        "fwd": ["{a} holds the {b}", "{a} full of {b}", "{a} contains {b}"],
        "rev": ["{b} in the {a}", "{b} inside a {a}", "{b} poured into the {a}"],
        "nm": ("container", "qualitative"),
    },
    "part": {
        "pairs": [("wheel", "car"), ("page", "book"), ("finger", "hand"),
                  ("brick", "wall"), ("branch", "tree"), ("petal", "blossom")],
        "fwd": ["{a} of the {b}", "{a} belongs to a {b}", "{a} of a {b}"],
        "rev": ["{b} has a {a}", "{b} with its {a}", "{b} lost a {a}"],
        "nm": ("part", "participatory"),
    },
    "tool": {
        "pairs": [("pen", "write"), ("broom", "sweep"), ("shovel", "dig"),
                  ("needle", "sew"), ("hammer", "pound"), ("oar", "row")],
        "fwd": ["{a} is used to {b}", "{a} helps you {b}", "{a} lets people {b}"],
        "rev": ["{b} with a {a}", "{b} using the {a}"],
        "nm": ("instrument", "participatory"),
    },
    "cause": {
        "pairs": [("virus", "illness"), ("rain", "flood"), ("wind", "erosion"),
                  ("drought", "famine"), ("friction", "heat"), ("fire", "smoke")],
        "fwd": ["{a} causes {b}", "{a} leads to {b}", "{a} results in a {b}"],
        "rev": ["{b} caused by the {a}", "{b} due to {a}", "{b} after the {a}"],
        "nm": ("cause", "causal"),
    },
    "workplace": {
        "pairs": [("chef", "kitchen"), ("pilot", "cockpit"), ("farmer", "field"),
                  ("sailor", "ship"), ("teacher", "school"), ("monk", "monastery")],
        "fwd": ["{a} works in the {b}", "{a} at the {b}", "the {a} goes to {b}"],
        "rev": ["{b} employs a {a}", "{b} needs a {a}"],
        "nm": ("location", "spatial"),
    },
}

# Attributionally similar words. Words listed in GOOD also get planted
# sentences with the partner word; JUNK neighbors never meet the partner.
GOOD = {
    "cat": ["kitty", "feline"], "dog": ["hound", "mutt"], "cow": ["cattle"],
    "meow": ["mew"], "bark": ["yelp"], "lion": ["tiger"],
    "mason": ["stonecutter"], "stone": ["rock", "granite"], "wood": ["timber", "lumber"],
    "carpenter": ["joiner"], "clay": ["earthenware"],
    "cub": ["whelp"], "hen": ["chicken"], "deer": ["stag"],
    "bottle": ["flask"], "wine": ["liquor"], "money": ["cash"], "jar": ["pot"],
    "wheel": ["tire"], "book": ["novel"], "hand": ["palm"], "tree": ["oak"],
    "pen": ["pencil"], "dig": ["excavate"], "broom": ["brush"],
    "rain": ["storm"], "fire": ["blaze"], "virus": ["germ"], "illness": ["disease"],
    "chef": ["cook"], "ship": ["boat"], "school": ["academy"], "farmer": ["grower"],
}
JUNK = ["zebu", "quartzite", "marmot", "xylem", "fjord", "gazebo", "turnip",
        "walrus", "yodel", "zither", "kumquat", "lichen", "mongoose", "nougat"]

FILLER = ("morning evening river mountain village city road market garden window door "
          "table chair lamp paper story music song dance game team player game country "
          "people family friend neighbor student doctor lawyer driver worker painter "
          "writer singer reader traveler visitor stranger king queen prince soldier "
          "summer winter autumn spring season weather cloud sky sun moon star ocean lake "
          "island forest desert valley hill bridge tower castle church temple museum "
          "library office factory station airport harbor street corner park square "
          "yesterday today tomorrow often rarely quietly slowly quickly happily sadly "
          "bright dark warm cold green blue red yellow old new young small large tall short "
          "very quite rather almost always never sometimes usually and or but so then when "
          "while because although the a an this that these those some many few every each "
          "is was were are be been has had have do did does will would could should might "
          "walked talked looked waited smiled laughed cried slept ate drank read wrote sang "
          "ran jumped danced played worked rested opened closed carried brought found lost "
          "near across around behind beside between beyond above below under over through "
          "about against along among toward upon within without after before during since "
          "until into onto from to of in on at by for with as like").split()
PAD = ("yesterday today often quietly slowly happily bright dark warm cold old new "
       "small large very quite almost always never sometimes usually").split()

pair_words = {w for r in RELATIONS.values() for p in r["pairs"] for w in p}
good_words = {w for ws in GOOD.values() for w in ws}
FILLER = [w for w in FILLER if w not in pair_words and w not in good_words]
assert not (set(PAD) & pair_words)


def planted(a, b, rel, n):
    out = []
    for _ in range(n):
        if rng.random() < 0.55:
            t = rng.choice(rel["fwd"])
        else:
            t = rng.choice(rel["rev"])
        s = t.format(a=a, b=b)
        if rng.random() < 0.5:
            s = rng.choice(PAD) + " " + s
        if rng.random() < 0.5:
            s = s + " " + rng.choice(PAD)
        out.append(s)
    return out


def main():
    sentences = []
    for rel in RELATIONS.values():
        for a, b in rel["pairs"]:
            sentences += planted(a, b, rel, rng.randint(10, 22))
            for a2 in GOOD.get(a, []):
                sentences += planted(a2, b, rel, rng.randint(2, 7))
            for b2 in GOOD.get(b, []):
                sentences += planted(a, b2, rel, rng.randint(2, 7))
    tokens = sum(len(s.split()) for s in sentences)
    while tokens < 98000:
        n = rng.randint(6, 14)
        s = " ".join(rng.choice(FILLER) for _ in range(n))
        sentences.append(s)
        tokens += n
    rng.shuffle(sentences)

    corpus_dir = os.path.join(HERE, "corpus")
    for f in os.listdir(corpus_dir):
        os.remove(os.path.join(corpus_dir, f))
    ndocs = 5
    chunk = (len(sentences) + ndocs - 1) // ndocs
    for d in range(ndocs):
        part = sentences[d * chunk:(d + 1) * chunk]
        lines = []
        for i in range(0, len(part), 6):
            lines.append(" ".join(s[0].upper() + s[1:] + "." for s in part[i:i + 6]))
        with open(os.path.join(corpus_dir, "doc%02d.txt" % d), "w") as fh:
            fh.write("\n".join(lines) + "\n")

    with open(os.path.join(HERE, "thesaurus.tsv"), "w") as fh:
        for w in sorted(pair_words):
            neigh = list(GOOD.get(w, []))
            junk = rng.sample(JUNK, rng.randint(1, 3))
            neigh = neigh + junk
            if w in ("owl", "monastery", "hoot"):
                continue
            score = 0.4 + 0.3 * rng.random()
            items = []
            for n in neigh:
                items.append("%s:%.3f" % (n, score))
                score *= 0.6 + 0.35 * rng.random()
            fh.write("%s\tnoun\t%s\n" % (w, ",".join(items)))

    names = list(RELATIONS)
    with open(os.path.join(HERE, "sat.txt"), "w") as fh:
        for qi in range(10):
            rel_name = names[qi % len(names)]
            rel = RELATIONS[rel_name]
            stem, correct = rng.sample(rel["pairs"], 2)
            others = [n for n in names if n != rel_name]
            distract = [rng.choice(RELATIONS[n]["pairs"]) for n in rng.sample(others, 4)]
            choices = distract[:]
            ans = rng.randrange(5)
            choices.insert(ans, correct)
            fh.write("%s %s n:n\n" % stem)
            for c in choices:
                fh.write("%s %s n:n\n" % c)
            fh.write("%s\n\n" % "abcde"[ans])

    with open(os.path.join(HERE, "nm.csv"), "w") as fh:
        fh.write("modifier,head,class30,class5\n")
        for rel in RELATIONS.values():
            c30, c5 = rel["nm"]
            for a, b in rel["pairs"][:4]:
                fh.write("%s,%s,%s,%s\n" % (a, b, c30, c5))

    text = ""
    for f in sorted(os.listdir(corpus_dir)):
        text += open(os.path.join(corpus_dir, f)).read()
    print("tokens", len(re.findall(r"[A-Za-z0-9]+", text)))


if __name__ == "__main__":
    main()
