#!/usr/bin/env python3
"""Regenerates the binary and synthetic test fixtures.

Everything is written with Python's struct/json modules only, so the SAXE
bytes here are an independent encoding of the format, not a round trip
through the C++ writer. Run from this directory; output is deterministic.
"""
import json
import math
import random
import struct
from pathlib import Path

HERE = Path(__file__).resolve().parent


def saxe_bytes(records, dim, version=1, sort=True):
    """records: list of (key, [floats]). Little-endian throughout."""
    out = bytearray(b"SAXE")
    out += struct.pack("<IIQ", version, dim, len(records))
    items = sorted(records) if sort else records
    for key, values in items:
        k = key.encode("utf-8")
        out += struct.pack("<H", len(k)) + k
        out += struct.pack("<%df" % dim, *values)
    return bytes(out)


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def write_saxe(path, records, dim):
    path.write_bytes(saxe_bytes(records, dim))


def jsonl(path, rows):
    path.write_text("".join(json.dumps(r, separators=(",", ":")) + "\n" for r in rows))


# --- embed-store fixtures -------------------------------------------------------------

def store_fixtures():
    d = HERE / "store"
    d.mkdir(exist_ok=True)
    # Exactly representable in float32, so the oracle values are plain decimals.
    three = [("alpha", [1.5, -2.0]), ("beta", [0.25, 8.0]), ("gamma", [-0.125, 3.75])]
    write_saxe(d / "three_dim2.saxe", three, 2)
    write_saxe(d / "empty_dim4.saxe", [], 4)

    good = saxe_bytes(three, 2)
    (d / "bad_magic.saxe").write_bytes(b"SAXF" + good[4:])               # offset 0
    (d / "bad_version.saxe").write_bytes(good[:4] + struct.pack("<I", 7) + good[8:])  # offset 4
    (d / "zero_dim.saxe").write_bytes(good[:8] + struct.pack("<I", 0) + good[12:])    # offset 8
    (d / "huge_count.saxe").write_bytes(good[:12] + struct.pack("<Q", 1 << 40) + good[20:])  # 12
    (d / "short_header.saxe").write_bytes(good[:10])                     # offset 8
    # Cut inside the third record's values. Records are 2+5+8, 2+4+8 bytes
    # after the 20-byte header, so gamma starts at 49 and its values at 56.
    # Long enough that the record-count bound alone does not trip.
    (d / "truncated_record.saxe").write_bytes(good[:58])                 # offset 56
    (d / "trailing_bytes.saxe").write_bytes(good + b"\x00\x01")          # offset len(good)
    nan = bytearray(good)
    struct.pack_into("<f", nan, 20 + 2 + 5 + 4, float("nan"))           # alpha[1] at 31
    (d / "nan_value.saxe").write_bytes(bytes(nan))

    # z-score sample: 5 vectors of dim 3, values chosen so mean/std are exact.
    z = [("s%d" % i, v) for i, v in enumerate(
        [[1, 2, 0], [3, 2, 0], [5, 2, 0], [7, 2, 0], [9, 2, 0]])]
    write_saxe(d / "zscore_sample.saxe", z, 3)


# --- lexicon fixtures ----------------------------------------------------------------

def syn(id_, lemmas, similar=(), ant=None, pos=None):
    row = {"id": id_, "pos": pos or id_.split(".")[1], "lemmas": list(lemmas),
           "similar_to": list(similar)}
    if ant is not None:
        row["antonym_of"] = ant
    return row


TOY_DB = [
    syn("good.a.01", ["good"], ["fine.s.01", "nice.s.01"], "bad.a.01"),
    syn("fine.s.01", ["fine", "superb"]),
    syn("nice.s.01", ["nice", "pleasant"]),
    syn("bad.a.01", ["bad"], ["awful.s.01", "poor.s.01"], "good.a.01"),
    syn("awful.s.01", ["awful", "terrible"]),
    syn("poor.s.01", ["poor", "lousy"]),
    syn("hot.a.01", ["hot"], ["warm.s.01", "spicy.s.01"], "cold.a.01"),
    syn("warm.s.01", ["warm", "tepid"]),
    syn("spicy.s.01", ["spicy", "peppery"]),
    syn("cold.a.01", ["cold"], ["cool.s.01", "tepid.s.02"], "hot.a.01"),
    syn("cool.s.01", ["cool", "chilly"]),
    syn("tepid.s.02", ["tepid", "lukewarm"]),
    syn("big.a.01", ["big", "large"], ["huge.s.01"], "small.a.01"),
    syn("huge.s.01", ["huge", "XXL"]),
    syn("small.a.01", ["small"], ["tiny.s.01"], "big.a.01"),
    syn("tiny.s.01", ["tiny", "wee", "sm"]),
    syn("happy.a.01", ["happy"], ["glad.s.01"], "sad.a.01"),
    syn("glad.s.01", ["glad", "joyful"]),
    syn("sad.a.01", ["sad"], ["gloomy.s.01"], "happy.a.01"),
    syn("gloomy.s.01", ["gloomy", "morose"]),
    syn("light.a.01", ["light"], ["airy.s.01", "missing.s.99"], "heavy.a.01"),
    syn("airy.s.01", ["airy", "weightless", "feathery"]),
    syn("heavy.a.01", ["heavy"], ["hefty.s.01"], "light.a.01"),
    syn("hefty.s.01", ["hefty", "weighty", "massive"]),
    syn("run.v.01", ["run"], [], "walk.v.01"),
    syn("walk.v.01", ["walk"], [], "run.v.01"),
    syn("old.a.01", ["old", "aged"], ["ancient.s.01"], "young.a.01"),
    syn("ancient.s.01", ["ancient", "antique"]),
    syn("young.a.01", ["young", "youthful"], ["juvenile.s.01"]),
    syn("juvenile.s.01", ["juvenile", "immature"]),
    syn("strong.a.01", ["strong"], ["sturdy.s.01", "powerful.s.01"], "weak.a.01"),
    syn("powerful.s.01", ["powerful", "mighty"]),
    syn("sturdy.s.01", ["sturdy", "robust"]),
    syn("weak.a.01", ["weak", "feeble"], ["frail.s.01"], "strong.a.01"),
    syn("frail.s.01", ["frail", "fragile", "run_down"]),
    syn("loud.a.01", ["loud"], [], "quiet.a.01"),
    syn("quiet.a.01", ["quiet", "silent", "hushed"], [], "loud.a.01"),
    syn("red.s.01", ["red", "crimson"]),
    syn("blue.s.01", ["blue", "azure"]),
    syn("bright.a.01", ["bright", "vivid", "brilliant"], [], "dim.a.99"),
]

TOY_VOCAB = """good fine superb nice pleasant bad awful terrible poor
hot warm tepid spicy peppery cold cool chilly lukewarm
big large huge xxl small tiny wee sm
happy glad joyful sad gloomy
light airy weightless heavy hefty weighty massive
run walk
old aged ancient antique young youthful juvenile immature
strong powerful mighty sturdy weak feeble frail fragile run_down
loud quiet silent""".split()


def lexicon_fixtures():
    d = HERE / "lexicon"
    d.mkdir(exist_ok=True)
    assert len(TOY_DB) == 40, len(TOY_DB)
    assert len(TOY_VOCAB) == 60 and len(set(TOY_VOCAB)) == 60, len(TOY_VOCAB)
    jsonl(d / "toy_db.jsonl", TOY_DB)
    (d / "toy_vocab.txt").write_text("\n".join(TOY_VOCAB) + "\n")
    jsonl(d / "expand12.jsonl", TOY_DB[:12])


# --- toy pipeline ------------------------------------------------------------------------

# Axes the toy lexicon yields (traced by hand; see the lexicon test).
TOY_AXES = [
    ("bad.a.01__good.a.01", ["bad", "awful", "terrible", "poor"],
     ["good", "fine", "superb", "nice", "pleasant"]),
    ("big.a.01__small.a.01", ["big", "large", "huge"], ["small", "tiny", "wee"]),
    ("cold.a.01__hot.a.01", ["cold", "cool", "chilly", "lukewarm"],
     ["hot", "warm", "spicy", "peppery"]),
    ("heavy.a.01__light.a.01", ["heavy", "hefty", "weighty", "massive"],
     ["light", "airy", "weightless"]),
    ("old.a.01__young.a.01", ["old", "aged", "ancient", "antique"],
     ["young", "youthful", "juvenile", "immature"]),
    ("strong.a.01__weak.a.01", ["strong", "powerful", "mighty", "sturdy"],
     ["weak", "feeble", "frail", "fragile", "run_down"]),
]

DIM = 8
FILLER = ("the a this that it was really quite very so and but then we they you "
          "saw felt found thought said seemed looked day night room food weather "
          "story place time").split()

FEMININE_TERMS = ["women", "woman", "girls", "girl", "ladies", "lady", "wife", "wives",
                  "nurse", "nurses", "single mom", "mom", "moms", "queen"]
OTHER_TERMS = ["men", "man", "guys", "people", "teacher", "teachers", "doctor", "boss",
               "karen", "driver"]
MONTHS = ["2019-%02d" % m for m in range(1, 13)] + ["2020-%02d" % m for m in range(1, 13)]


def unit(rng, dim):
    v = [rng.gauss(0, 1) for _ in range(dim)]
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def sentence(rng, word, n):
    toks = [rng.choice(FILLER) for _ in range(n)]
    idx = rng.randrange(n)
    toks[idx] = word
    return toks, idx


def month_start(m):
    y, mo = int(m[:4]), int(m[5:])
    # days from epoch to the first of the month (proleptic Gregorian)
    def days(y, mo, d):
        a = (14 - mo) // 12
        yy = y + 4800 - a
        mm = mo + 12 * a - 3
        jdn = d + (153 * mm + 2) // 5 + 365 * yy + yy // 4 - yy // 100 + yy // 400 - 32045
        return jdn - 2440588
    return days(y, mo, 1) * 86400


def pipeline_fixtures():
    d = HERE / "toy"
    d.mkdir(exist_ok=True)
    rng = random.Random(20231001)

    # Single-wordpiece vocabulary: every pole word except the heavy side, so
    # that axis backs off to bert-default under bert-prob.
    heavy = set(TOY_AXES[3][1])
    wp = sorted(w for w in TOY_VOCAB if w not in heavy and "_" not in w)
    (d / "wordpiece_vocab.txt").write_text("\n".join(wp) + "\n")

    contexts, embeddings = [], []
    directions = {}
    cid = 0
    for axis_id, left, right in TOY_AXES:
        direction = unit(rng, DIM)
        directions[axis_id] = direction
        for side, words, others in ((1, left, right), (-1, right, left)):
            for w in words:
                for c in range(5):
                    cid += 1
                    n = 8 if c == 4 and w in ("bad", "hot") else rng.randint(11, 20)
                    toks, idx = sentence(rng, w, n)
                    ctx = "c%04d" % cid
                    syn_words = [x for x in words if x != w and x in wp][:3]
                    ant_words = [x for x in others if x in wp][:3]
                    syn_p = {x: round(rng.uniform(0.01, 0.3), 4) for x in syn_words}
                    ant_p = {x: round(rng.uniform(0.0, 0.2), 4) for x in ant_words}
                    contexts.append({"context_id": ctx, "adjective": w, "tokens": toks,
                                     "target_index": idx, "syn_probs": syn_p,
                                     "ant_probs": ant_p})
                    strength = rng.uniform(0.5, 1.5)
                    vec = [f32(side * strength * di + rng.gauss(0, 0.6) + 0.3)
                           for di in direction]
                    embeddings.append((w + "|" + ctx, vec))
    jsonl(d / "contexts.jsonl", contexts)
    write_saxe(d / "embeddings.saxe", embeddings, DIM)

    terms = FEMININE_TERMS + OTHER_TERMS
    # Family terms lean toward the "bad" pole so the contrast stage has
    # something to find.
    family = {"wife", "wives", "mom", "moms", "single mom"}
    bad_good = directions["bad.a.01__good.a.01"]
    targets = [(t, [f32(rng.gauss(0, 1) + (2.5 * bad_good[i] if t in family else 0.0))
                    for i in range(DIM)]) for t in terms]
    write_saxe(d / "targets.saxe", targets, DIM)
    (d / "categories.tsv").write_text(
        "".join("%s\t%s\n" % (t, c) for t, c in [
            ("nurse", "profession"), ("nurses", "profession"), ("teacher", "profession"),
            ("teachers", "profession"), ("doctor", "profession"), ("boss", "profession"),
            ("driver", "profession"), ("wife", "family"), ("wives", "family"),
            ("mom", "family"), ("moms", "family"), ("single mom", "family")]))
    (d / "terms.txt").write_text("\n".join(sorted(terms)) + "\n")
    (d / "pronouns.tsv").write_text(
        "term\tfem\tmasc\n"
        "nurse\t40\t5\n"
        "teacher\t12\t10\n"
        "doctor\t4\t30\n"
        "karen\t25\t1\n"
        "boss\t3\t3\n"
        "driver\t2\t20\n")
    (d / "ideology.tsv").write_text("forum_a\tleft\nforum_b\tright\nforum_c\tleft\n")

    # Corpus: each feminine-ish term peaks in one of a few phases.
    docs = []
    doc_id = 0
    peaks = {t: (i % 4) * 6 + 2 for i, t in enumerate(terms)}
    authors = ["u%02d" % i for i in range(20)]
    for mi, month in enumerate(MONTHS):
        base = month_start(month)
        for j in range(30):
            doc_id += 1
            words = [rng.choice(FILLER) for _ in range(rng.randint(6, 14))]
            for t in terms:
                rate = 0.08 + 0.5 * math.exp(-((mi - peaks[t]) ** 2) / 8.0)
                if rng.random() < rate:
                    pos = rng.randrange(len(words) + 1)
                    words[pos:pos] = t.split()
            text = " ".join(words).capitalize() + ". " + " ".join(
                rng.choice(FILLER) for _ in range(5)) + "!"
            platform = "reddit" if j % 3 else "forum"
            community = ["forum_a", "forum_b", "forum_c"][j % 3]
            docs.append({"id": "d%05d" % doc_id, "created_utc": base + j * 3600,
                         "platform": platform, "community": community,
                         "author": rng.choice(authors), "text": text})
        # an exact duplicate and a spammy bot
        docs.append(dict(docs[-1], id="d%05d_dup" % doc_id))
        for r in range(3):
            docs.append({"id": "bot%03d_%d" % (mi, r), "created_utc": base + 100000 + r,
                         "platform": "reddit", "community": "forum_a", "author": "spambot",
                         "text": "buy the best cheap pills online now from our trusted shop today "
                                 "women girls %d" % (mi * 3 + r)})
    jsonl(d / "corpus.jsonl", docs)

    # Per-occurrence embeddings keyed month|id and variant|id.
    occ = []
    for mi, month in enumerate(MONTHS):
        for k in range(6):
            occ.append(("%s|o%03d" % (month, k),
                        [f32(rng.gauss(0.02 * mi, 1)) for _ in range(DIM)]))
    write_saxe(d / "occurrence_embeddings.saxe", occ, DIM)
    var = []
    for variant, shift in (("females", 0.4), ("foids", 0.9), ("women", 0.0), ("ladies", -0.1)):
        for k in range(12):
            var.append(("%s|v%03d" % (variant, k),
                        [f32(rng.gauss(shift, 1)) for _ in range(DIM)]))
    write_saxe(d / "variant_embeddings.saxe", var, DIM)

    (d / "toy.conf").write_text("""# toy end-to-end configuration; paths relative to this file
db = ../lexicon/toy_db.jsonl
vocab = ../lexicon/toy_vocab.txt
wordpiece_vocab = wordpiece_vocab.txt
contexts = contexts.jsonl
embeddings = embeddings.saxe
targets = targets.saxe
categories = categories.tsv
corpus = corpus.jsonl
terms = terms.txt
pronouns = pronouns.tsv
ideology = ideology.tsv
occurrence_embeddings = occurrence_embeddings.saxe
variant_embeddings = variant_embeddings.saxe
group_a = females,foids
group_b = women,ladies
out = out

method = bert-prob
zscored = true
seed = 7

min_pole = 3
context_k = 10
pool_cap = 1000
bootstrap = 200
alpha = 0.05
k = 3
smoothing = 3
fem_threshold = 0.75
vocab_min = 20
min_clusters = 10
top_k = 4
restarts = 5
sample_cap = 20
reservoir_k = 5
bot_max_repeats = 5
""")


if __name__ == "__main__":
    store_fixtures()
    lexicon_fixtures()
    pipeline_fixtures()
