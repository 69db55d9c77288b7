"""Generate the bundled mini-corpus under src/cssm/data/mini/.

Synthetic and seeded. Each query pairs two concepts; each concept has two
surface forms with nearby vectors. Per query the generator writes:

  3 relevant docs (grade 2): both concepts within a few tokens of each other
  1 relevant doc  (grade 1): same, but only through the non-query synonyms
  3 non-relevant: both query terms, repeated, but always > 30 tokens apart
  2 non-relevant: a single query concept repeated
  1 non-relevant: filler only

The scattered distractors get the higher BM25 scores, so the fixture
exercises window clustering. Qrels follow from the construction.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "cssm" / "data" / "mini"

CONCEPTS = {
    "robotics": ("robot", "machine"),
    "tech": ("technology", "engineering"),
    "sea": ("ocean", "sea"),
    "energy": ("energy", "power"),
    "commerce": ("market", "trade"),
}
# query id -> (first concept, surface index), (second concept, surface index)
QUERIES = {
    "q1": (("robotics", 0), ("tech", 0)),
    "q2": (("sea", 0), ("energy", 0)),
    "q3": (("commerce", 0), ("tech", 0)),
    "q4": (("sea", 1), ("commerce", 1)),
    "q5": (("energy", 1), ("robotics", 1)),
}
FILLER = """the a of and to in for on with was were is are by from at as this that
report year city people local group said new after during over under early late
plan week month public council school river road village family member
history music film art game team season club street house garden winter summer
night morning story book paper note letter office station field church""".split()

AXES = list(CONCEPTS)
NORMS = {"robot": 1.3, "machine": 1.1, "technology": 1.0, "engineering": 0.9,
         "ocean": 1.2, "sea": 1.15, "energy": 1.05, "power": 0.95,
         "market": 1.1, "trade": 1.25}


def vectors():
    rows = []
    for ci, (concept, forms) in enumerate(CONCEPTS.items()):
        for fi, word in enumerate(forms):
            v = [0.0] * 6
            v[ci] = 1.0
            v[(ci + 1) % 5] = 0.15 if fi == 0 else -0.1
            v[5] = 0.2 if fi == 0 else 0.3
            scale = NORMS[word] / sum(x * x for x in v) ** 0.5
            rows.append((word, [round(x * scale, 6) for x in v]))
    return rows


def filler(rng, n):
    return [rng.choice(FILLER) for _ in range(n)]


def place(tokens, pos, word):
    tokens[pos] = word


def make_docs(rng):
    docs, qrels = [], []
    n = 0

    def new_id():
        nonlocal n
        n += 1
        return f"d{n:03d}"

    for qid, ((c1, i1), (c2, i2)) in QUERIES.items():
        w1, w2 = CONCEPTS[c1][i1], CONCEPTS[c2][i2]
        s1, s2 = CONCEPTS[c1][1 - i1], CONCEPTS[c2][1 - i2]
        for j in range(3):
            length = rng.randint(70, 110)
            toks = filler(rng, length)
            start = rng.randint(0, length - 20)
            place(toks, start, w1)
            place(toks, start + rng.randint(2, 6), w2)
            place(toks, start + rng.randint(8, 12), [s1, s2, w1][j])
            docs.append((new_id(), toks))
            qrels.append((qid, docs[-1][0], 2))
        length = rng.randint(70, 110)
        toks = filler(rng, length)
        start = rng.randint(0, length - 20)
        place(toks, start, s1)
        place(toks, start + rng.randint(2, 5), s2)
        place(toks, start + rng.randint(7, 10), s1)
        docs.append((new_id(), toks))
        qrels.append((qid, docs[-1][0], 1))
        for j in range(3):
            length = rng.randint(90, 120)
            toks = filler(rng, length)
            # w1 in the first third, w2 in the last third; gap > 30
            for p in rng.sample(range(0, 25), 2):
                place(toks, p, w1)
            for p in rng.sample(range(length - 25, length), 2 + (j == 0)):
                place(toks, p, w2)
            docs.append((new_id(), toks))
            qrels.append((qid, docs[-1][0], 0))
        for word in (w1, w2):
            length = rng.randint(60, 90)
            toks = filler(rng, length)
            for p in rng.sample(range(length), 4):
                place(toks, p, word)
            docs.append((new_id(), toks))
            qrels.append((qid, docs[-1][0], 0))
        docs.append((new_id(), filler(rng, rng.randint(60, 90))))
        qrels.append((qid, docs[-1][0], 0))
    return docs, qrels


def main():
    rng = random.Random(20240611)
    OUT.mkdir(parents=True, exist_ok=True)
    docs, qrels = make_docs(rng)
    order = list(range(len(docs)))
    rng.shuffle(order)
    with open(OUT / "corpus.jsonl", "w", newline="") as f:
        for i in order:
            doc_id, toks = docs[i]
            text = " ".join(toks).capitalize() + "."
            f.write(json.dumps({"id": doc_id, "text": text}) + "\n")
    with open(OUT / "queries.tsv", "w", newline="") as f:
        for qid, ((c1, i1), (c2, i2)) in QUERIES.items():
            f.write(f"{qid}\t{CONCEPTS[c1][i1].capitalize()} {CONCEPTS[c2][i2]}\n")
    with open(OUT / "qrels.txt", "w", newline="") as f:
        for qid, doc_id, rel in qrels:
            f.write(f"{qid} 0 {doc_id} {rel}\n")
    with open(OUT / "vectors.txt", "w", newline="") as f:
        for word, vec in vectors():
            f.write(word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")


if __name__ == "__main__":
    main()
