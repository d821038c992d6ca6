"""The whole pipeline through the command line.

Everything the other demos do in-process is also scriptable via the
`margin-mine` console command. This demo materializes a small corpus
on disk, then drives preprocess -> mine -> hist -> eval exactly as a
shell script would. Each step prints the equivalent shell command; the
call goes through cli.main so the demo runs without PATH assumptions.

Run:  python3 demos/07_cli_pipeline.py
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from marginmine import Side, cli, write_embeddings

root = Path(tempfile.mkdtemp(prefix="marginmine_demo_"))
rng = np.random.default_rng(11)
dim, per_doc, docs = 16, 6, 3


def unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def run(argv):
    print("$ margin-mine " + " ".join(argv))
    code = cli.main(argv)
    assert code == 0, f"exit code {code}"


# --- materialize a corpus: metadata JSONL + EMB1 embeddings + links --------

src_meta, tgt_meta = [], []
src_vecs, tgt_vecs, links = [], [], []
gold = []
for d in range(docs):
    center = unit(rng.standard_normal(dim))
    block = unit(center + 0.8 * unit(rng.standard_normal((per_doc, dim))))
    noisy = unit(block + 0.3 * unit(rng.standard_normal((per_doc, dim))))
    links.append(f"link{d}\tdoc{d}.en\tdoc{d}.xx")
    for i in range(per_doc):
        sid, tid = f"s{d}{i}", f"t{d}{i}"
        # one noise sentence per doc that should be dropped up front
        text = "http://junk.example" if i == per_doc - 1 else f"sentence {d}-{i} text body"
        src_meta.append({"id": sid, "doc": f"doc{d}.en", "lang": "en", "text": text})
        tgt_meta.append({"id": tid, "doc": f"doc{d}.xx", "lang": "xx", "text": f"satz {d}-{i} inhalt"})
        gold.append(f"{sid}\t{tid}")
    src_vecs.append(block)
    tgt_vecs.append(noisy)

(root / "src_meta.jsonl").write_text(
    "".join(json.dumps(r) + "\n" for r in src_meta), encoding="utf-8"
)
(root / "tgt_meta.jsonl").write_text(
    "".join(json.dumps(r) + "\n" for r in tgt_meta), encoding="utf-8"
)
(root / "links.tsv").write_text("\n".join(links) + "\n", encoding="utf-8")
(root / "gold.tsv").write_text("\n".join(gold) + "\n", encoding="utf-8")

print(f"corpus in {root}\n")

# --- step 1: preprocess ------------------------------------------------------

run([
    "preprocess",
    "--src-meta", str(root / "src_meta.jsonl"),
    "--tgt-meta", str(root / "tgt_meta.jsonl"),
    "--links", str(root / "links.tsv"),
    "--out-dir", str(root / "clean"),
])

# The URL-only sentences were cleaned to nothing and dropped, so the
# embedding files are written for the *cleaned* metadata.
from marginmine.io import read_metadata  # noqa: E402

kept_src = read_metadata(root / "clean" / "src_meta.jsonl", Side.SOURCE)
kept_tgt = read_metadata(root / "clean" / "tgt_meta.jsonl", Side.TARGET)
all_src = np.vstack(src_vecs).astype(np.float32)
all_tgt = np.vstack(tgt_vecs).astype(np.float32)
src_row = {r["id"]: i for i, r in enumerate(src_meta)}
tgt_row = {r["id"]: i for i, r in enumerate(tgt_meta)}
write_embeddings(
    all_src[[src_row[x.id.key] for x in kept_src.sentences]], root / "src.emb1"
)
write_embeddings(
    all_tgt[[tgt_row[x.id.key] for x in kept_tgt.sentences]], root / "tgt.emb1"
)
print(f"embedded {len(kept_src.sentences)} src / {len(kept_tgt.sentences)} tgt sentences\n")

# --- step 2: mine, with the options captured in a manifest -------------------

manifest = root / "mine.ini"
manifest.write_text(
    "\n".join([
        "# replayable mining run",
        f"src-meta = {root / 'clean' / 'src_meta.jsonl'}",
        f"tgt-meta = {root / 'clean' / 'tgt_meta.jsonl'}",
        f"src-emb = {root / 'src.emb1'}",
        f"tgt-emb = {root / 'tgt.emb1'}",
        f"links = {root / 'clean' / 'links.tsv'}",
        f"out = {root / 'pairs.tsv'}",
        "k = 4",
        "join = intersect",
    ]) + "\n",
    encoding="utf-8",
)
run(["mine", "--manifest", str(manifest)])
print()

# --- step 3: score distribution ---------------------------------------------

run(["hist", "--pairs", str(root / "pairs.tsv"), "--bins", "6"])
print()

# --- step 4: evaluate against gold -------------------------------------------

run([
    "eval",
    "--pairs", str(root / "pairs.tsv"),
    "--gold", str(root / "gold.tsv"),
])
