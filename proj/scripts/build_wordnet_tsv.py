#!/usr/bin/env python3
"""Build hypernymy closure TSVs from WordNet 3.0 database files.

Reads the raw WordNet ``dict`` directory (data.noun / index.noun) and writes
edge lists in the repository's TSV format: one ``ancestor<TAB>descendant``
line per transitive hypernym pair.

Outputs:
  mammal_closure.tsv  - closure of the mammal.n.01 subtree, root removed
                        (1,179 nodes / 5,361 edges)
  noun_closure.tsv    - closure of the full noun hierarchy, root removed
                        (with --nouns; large, used by the overnight check)

The dict directory can come from any WordNet 3.0 distribution, e.g.
``npm install wndb-with-exceptions`` provides it under
``node_modules/wndb-with-exceptions/dict``.

Usage:
  python3 scripts/build_wordnet_tsv.py --dict DICT_DIR --out data/ [--nouns]
"""

import argparse
import collections
import os
import sys


def parse_data_noun(path):
    synsets = {}
    with open(path, encoding="latin-1") as f:
        for line in f:
            if line.startswith("  "):
                continue  # license header
            head = line.split("|")[0].split()
            off = head[0]
            w_cnt = int(head[3], 16)
            words = []
            i = 4
            for _ in range(w_cnt):
                words.append(head[i])
                i += 2
            p_cnt = int(head[i])
            i += 1
            hyper, inst_hyper = [], []
            for _ in range(p_cnt):
                sym, tgt, pos = head[i], head[i + 1], head[i + 2]
                i += 4
                if pos == "n":
                    if sym == "@":
                        hyper.append(tgt)
                    elif sym == "@i":
                        inst_hyper.append(tgt)
            synsets[off] = (words, hyper, inst_hyper)
    return synsets


def parse_index_noun(path):
    sense = {}
    with open(path, encoding="latin-1") as f:
        for line in f:
            if line.startswith("  "):
                continue
            parts = line.split()
            lemma = parts[0]
            p_cnt = int(parts[3])
            for idx, off in enumerate(parts[4 + p_cnt + 2:], 1):
                sense[(lemma, off)] = idx
    return sense


def closure_from(start, rel):
    seen, out, stack = set(), [], list(rel(start))
    while stack:
        o = stack.pop()
        if o in seen:
            continue
        seen.add(o)
        out.append(o)
        stack.extend(rel(o))
    return out


def build_edges(synsets):
    """(descendant, ancestor) pairs: hypernym closure per synset, plus the
    instance closure through instance hypernyms."""
    edges = set()
    for off, (_, hyper, _) in synsets.items():
        for anc in closure_from(off, lambda o: synsets[o][1]):
            edges.add((off, anc))
    inst_hypo = collections.defaultdict(list)
    for off, (_, _, ih) in synsets.items():
        for h in ih:
            inst_hypo[h].append(off)
    for off in synsets:
        for inst in inst_hypo.get(off, []):
            for anc in closure_from(inst, lambda o: synsets[o][2] + synsets[o][1]):
                edges.add((inst, anc))
    return edges


def write_tsv(path, edges, names):
    rows = sorted((names[a], names[d]) for d, a in edges)
    with open(path, "w") as f:
        f.write("# WordNet 3.0 hypernym transitive closure, ancestor<TAB>descendant\n")
        for a, d in rows:
            f.write(f"{a}\t{d}\n")
    print(f"wrote {path}: {len(rows)} edges, "
          f"{len(set(x for r in rows for x in r))} nodes")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dict", required=True, help="WordNet 3.0 dict directory")
    ap.add_argument("--out", default="data", help="output directory")
    ap.add_argument("--nouns", action="store_true", help="also write the full noun closure")
    args = ap.parse_args()

    synsets = parse_data_noun(os.path.join(args.dict, "data.noun"))
    sense = parse_index_noun(os.path.join(args.dict, "index.noun"))
    if len(synsets) != 82115:
        print(f"warning: {len(synsets)} noun synsets, expected 82115 (WordNet 3.0)",
              file=sys.stderr)

    names = {}
    for off, (words, _, _) in synsets.items():
        w0 = words[0].lower()
        names[off] = "%s.n.%02d" % (w0, sense.get((w0, off), 1))

    edges = build_edges(synsets)
    os.makedirs(args.out, exist_ok=True)

    mammal = next(o for o in synsets if names[o] == "mammal.n.01")
    mset = set(d for d, a in edges if a == mammal)
    mset.add(mammal)
    mammal_edges = set((d, a) for d, a in edges
                       if d in mset and a in mset and d != mammal and a != mammal)
    write_tsv(os.path.join(args.out, "mammal_closure.tsv"), mammal_edges, names)

    if args.nouns:
        root = next(o for o in synsets if names[o] == "entity.n.01")
        noun_edges = set((d, a) for d, a in edges if d != root and a != root)
        write_tsv(os.path.join(args.out, "noun_closure.tsv"), noun_edges, names)


if __name__ == "__main__":
    main()
