"""Command-line surface: batch workflows over the library modules.

Subcommands:
  preprocess  clean sentence text and drop short document pairs
  mine        margin-based bidirectional mining to a pairs TSV
  combine     vote three channel pair sets down to one
  eval        precision/recall/F1 of a pairs TSV against gold
  hist        score histogram of a pairs TSV (CSV, optional SVG)
  filter      rule-based metric windows over a pairs TSV

Every option can also come from a --manifest file of `key = value`
lines (flags win), so runs are replayable. Exit codes: 0 success,
2 input/format error, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import filters as filters_mod
from . import io as io_mod
from .channels import ChannelInputs, CombineMode, combine, mine_channel
from .core import Channel, Join, MiningConfig, Scope, Side
from .errors import ConfigError, FormatError, InputError, MiningError, MissingChannel
from .evaluation import evaluate, histogram, histogram_csv, histogram_svg
from .mining import THRESHOLD_PRESETS, mine
from .preprocess import (
    CleanupConfig,
    DocLengthFilter,
    LengthFilterMode,
    clean_sentence,
    document_stats,
    filter_documents,
)

log = logging.getLogger("marginmine.cli")

THREADS_ENV = "MARGIN_MINE_THREADS"

_SCOPES = {"doc": Scope.DOCUMENT, "global": Scope.GLOBAL}


class _Parser(argparse.ArgumentParser):
    # Usage mistakes are configuration errors (exit 3), not exit 2.
    def error(self, message):
        raise ConfigError(message)


def _parse_scalar(token: str):
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in ("'", '"'):
        return token[1:-1]
    low = token.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    if low in ("none", "null"):
        return None
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def parse_manifest(path: str | Path) -> dict:
    """Parse a `key = value` manifest file.

    Keys may use hyphens or underscores. Values: quoted strings, bare
    strings, integers, floats, true/false, none, and comma-separated
    lists of those. Lines starting with # are comments.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(io_mod._read_text(path).split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError("expected `key = value`", path=str(path), line=lineno)
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise FormatError("empty key", path=str(path), line=lineno)
        value = value.strip()
        if "," in value and not (value.startswith(("'", '"')) and value.endswith(("'", '"'))):
            values[key] = [_parse_scalar(tok) for tok in value.split(",")]
        else:
            values[key] = _parse_scalar(value)
    return values


def _merge_manifest(args: argparse.Namespace) -> None:
    """Fill in unset options from the manifest; flags always win."""
    if getattr(args, "manifest", None) is None:
        return
    for key, value in parse_manifest(args.manifest).items():
        if key in ("manifest", "command"):
            continue
        if not hasattr(args, key):
            log.warning("manifest key %r does not apply to this command; ignored", key)
            continue
        if getattr(args, key) is None:
            setattr(args, key, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise ConfigError(f"missing required option(s): {flags}")


def _resolve_threads(args: argparse.Namespace) -> int:
    value = getattr(args, "threads", None)
    if value is None:
        env = os.environ.get(THREADS_ENV)
        if env is None:
            return 1
        value = env
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"thread count must be an integer, got {value!r}") from None
    if threads < 1:
        raise ConfigError(f"thread count must be >= 1, got {threads}")
    return threads


def _mining_config(args: argparse.Namespace) -> MiningConfig:
    join = args.join if args.join is not None else "intersect"
    scope = args.scope if args.scope is not None else "doc"
    if join not in (j.value for j in Join):
        raise ConfigError(f"join must be one of intersect/union/max-score, got {join!r}")
    if scope not in _SCOPES:
        raise ConfigError(f"scope must be doc or global, got {scope!r}")
    threshold = args.threshold
    if threshold is not None:
        try:
            threshold = float(threshold)
        except (TypeError, ValueError):
            raise ConfigError(f"threshold must be a number, got {threshold!r}") from None
    return MiningConfig(
        k=args.k if args.k is not None else 4,
        join=Join(join),
        threshold=threshold,
        scope=_SCOPES[scope],
        strict_topk_mean=bool(args.strict_topk_mean),
    )


def _out_path(raw: str | Path) -> Path:
    path = Path(raw)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_or_stdout(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _out_path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------- commands


def cmd_preprocess(args: argparse.Namespace) -> int:
    _require(args, "src_meta", "tgt_meta", "out_dir")
    cleanup = CleanupConfig(
        strip_urls=not bool(args.keep_urls),
        strip_nonstandard_chars=not bool(args.keep_nonstandard_chars),
        collapse_whitespace=not bool(args.keep_whitespace),
        noise_tokens=tuple(args.noise_token or ()),
    )
    src = io_mod.read_metadata(args.src_meta, Side.SOURCE, allow_empty_text=True)
    tgt = io_mod.read_metadata(args.tgt_meta, Side.TARGET, allow_empty_text=True)
    pairing = io_mod.read_doc_links(args.links) if args.links is not None else None

    cleaned_sides = {}
    dropped_empty = {}
    for name, side in (("src", src), ("tgt", tgt)):
        kept = []
        dropped_ids = []
        for s in side.sentences:
            text = clean_sentence(s.text, cleanup)
            if text:
                kept.append(
                    type(s)(id=s.id, text=text, doc_id=s.doc_id, lang=s.lang)
                )
            else:
                dropped_ids.append(s.id.key)
        if dropped_ids:
            log.info(
                "%s: dropped %d empty-after-cleanup sentence(s): %s",
                name,
                len(dropped_ids),
                ", ".join(dropped_ids),
            )
        cleaned_sides[name] = kept
        dropped_empty[name] = len(dropped_ids)

    use_absolute = args.min_src_words is not None or args.min_tgt_words is not None
    use_percentile = args.bottom_percentile is not None
    if use_absolute and use_percentile:
        raise ConfigError("choose either absolute word minimums or a bottom percentile, not both")
    doc_filter = None
    if use_absolute:
        doc_filter = DocLengthFilter(
            mode=LengthFilterMode.ABSOLUTE_WORDS,
            src_min=float(args.min_src_words or 0),
            tgt_min=float(args.min_tgt_words or 0),
        )
    elif use_percentile:
        doc_filter = DocLengthFilter(
            mode=LengthFilterMode.BOTTOM_PERCENTILE,
            percentile=float(args.bottom_percentile),
        )

    kept_links = pairing
    dropped_pairs = 0
    realized = None
    if doc_filter is not None:
        if pairing is None:
            raise ConfigError("document-length filtering needs a --links file")
        from .core import CorpusSide, DocumentPairing

        side_src = CorpusSide(Side.SOURCE, cleaned_sides["src"])
        side_tgt = CorpusSide(Side.TARGET, cleaned_sides["tgt"])
        stats = document_stats(side_src, side_tgt, pairing)
        result = filter_documents(stats, doc_filter)
        dropped_pairs = len(result.dropped)
        realized = result.realized
        kept_links = DocumentPairing([p.link for p in result.kept])
        kept_src_docs = {link.src_doc for link in kept_links}
        kept_tgt_docs = {link.tgt_doc for link in kept_links}
        cleaned_sides["src"] = [s for s in cleaned_sides["src"] if s.doc_id in kept_src_docs]
        cleaned_sides["tgt"] = [s for s in cleaned_sides["tgt"] if s.doc_id in kept_tgt_docs]

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    io_mod.write_metadata(cleaned_sides["src"], out_dir / "src_meta.jsonl")
    io_mod.write_metadata(cleaned_sides["tgt"], out_dir / "tgt_meta.jsonl")
    if kept_links is not None:
        io_mod.write_doc_links(kept_links, out_dir / "links.tsv")

    print(f"src: kept {len(cleaned_sides['src'])} sentences, dropped {dropped_empty['src']} empty")
    print(f"tgt: kept {len(cleaned_sides['tgt'])} sentences, dropped {dropped_empty['tgt']} empty")
    if doc_filter is not None:
        print(f"document pairs: kept {len(kept_links)}, dropped {dropped_pairs}")
        print(
            "realized cutoffs: "
            f"src >= {realized.src_sentences} sentences / {realized.src_words} words, "
            f"tgt >= {realized.tgt_sentences} sentences / {realized.tgt_words} words"
        )
    return 0


def cmd_mine(args: argparse.Namespace) -> int:
    _require(args, "src_meta", "tgt_meta", "src_emb", "tgt_emb", "out")
    cfg = _mining_config(args)
    threads = _resolve_threads(args)
    job = io_mod.load_job(args.src_meta, args.tgt_meta, args.src_emb, args.tgt_emb, args.links)
    pairs = mine(job, cfg, threads=threads)
    io_mod.write_pairs(pairs, _out_path(args.out))
    log.info("mined %d pair(s) -> %s", len(pairs), args.out)
    return 0


def cmd_combine(args: argparse.Namespace) -> int:
    _require(args, "mode", "out")
    if args.mode not in (m.value for m in CombineMode):
        raise ConfigError(f"mode must be strict or pairwise, got {args.mode!r}")
    mode = CombineMode(args.mode)

    tsv_mode = any(
        getattr(args, name) is not None for name in ("original", "en_xx", "xx_en")
    )
    if tsv_mode:
        for name in ("original", "en_xx", "xx_en"):
            if getattr(args, name) is None:
                raise MissingChannel(f"combine needs --{name.replace('_', '-')}")
        p_orig = io_mod.read_pairs(args.original)
        p_en_xx = io_mod.read_pairs(args.en_xx)
        p_xx_en = io_mod.read_pairs(args.xx_en)
    else:
        _require(args, "src_meta", "tgt_meta", "src_emb", "tgt_emb")
        if args.src_emb_trans is None or args.tgt_emb_trans is None:
            raise MissingChannel(
                "in-process combine needs --src-emb-trans and --tgt-emb-trans"
            )
        cfg = _mining_config(args)
        threads = _resolve_threads(args)
        job = io_mod.load_job(
            args.src_meta, args.tgt_meta, args.src_emb, args.tgt_emb, args.links
        )
        x_trans = io_mod.read_embeddings(args.src_emb_trans, job.src.ids())
        y_trans = io_mod.read_embeddings(args.tgt_emb_trans, job.tgt.ids())
        inputs = ChannelInputs.from_embeddings(job, x_trans, y_trans)
        p_orig = mine_channel(inputs, Channel.ORIGINAL, cfg, threads=threads)
        p_en_xx = mine_channel(inputs, Channel.EN_TO_XX, cfg, threads=threads)
        p_xx_en = mine_channel(inputs, Channel.XX_TO_EN, cfg, threads=threads)

    voted = combine(p_orig, p_en_xx, p_xx_en, mode)
    io_mod.write_pairs(voted, _out_path(args.out))
    log.info("combined %d pair(s) -> %s", len(voted), args.out)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    _require(args, "pairs", "gold")
    pred = io_mod.read_pairs(args.pairs)
    gold = io_mod.read_gold(args.gold)
    report = evaluate(pred, gold)
    _write_or_stdout(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_hist(args: argparse.Namespace) -> int:
    _require(args, "pairs")
    if (args.lo is None) != (args.hi is None):
        raise ConfigError("--lo and --hi must be given together")
    pairs = io_mod.read_pairs(args.pairs)
    rng = (args.lo, args.hi) if args.lo is not None else None
    hist = histogram(pairs, bins=args.bins if args.bins is not None else 20, range=rng)
    _write_or_stdout(histogram_csv(hist), args.out)
    if args.svg is not None:
        _out_path(args.svg).write_text(histogram_svg(hist), encoding="utf-8")
    return 0


def _load_filter_specs(path: str | Path) -> list[filters_mod.FilterSpec]:
    try:
        raw = json.loads(io_mod._read_text(path))
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e.msg}", path=str(path)) from e
    if not isinstance(raw, list):
        raise ConfigError(f"{path}: filter specs must be a JSON list")
    specs = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "kind" not in item:
            raise ConfigError(f"{path}: spec #{i} must be an object with a 'kind'")
        try:
            kind = filters_mod.FilterKind(item["kind"])
        except ValueError:
            raise ConfigError(f"{path}: unknown filter kind {item['kind']!r}") from None
        stopwords = item.get("stopwords")
        if isinstance(stopwords, str):
            stopwords = io_mod.read_stopwords(stopwords)
        elif isinstance(stopwords, list):
            stopwords = frozenset(w.lower() for w in stopwords)
        elif stopwords is not None:
            raise ConfigError(f"{path}: spec #{i} stopwords must be a path or a list")
        if "min" not in item:
            raise ConfigError(f"{path}: spec #{i} needs a 'min'")
        specs.append(
            filters_mod.FilterSpec(
                kind=kind,
                min=float(item["min"]),
                max=float(item["max"]) if item.get("max") is not None else None,
                stopwords=stopwords,
                bleu_n=int(item.get("bleu_n", 4)),
            )
        )
    return specs


def cmd_filter(args: argparse.Namespace) -> int:
    _require(args, "pairs", "specs", "src_meta", "tgt_meta", "out")
    pairs = io_mod.read_pairs(args.pairs)
    specs = _load_filter_specs(args.specs)
    src = io_mod.read_metadata(args.src_meta, Side.SOURCE)
    tgt = io_mod.read_metadata(args.tgt_meta, Side.TARGET)
    texts = src.texts()
    texts.update(tgt.texts())
    translations: dict = {}
    if args.src_translations is not None:
        translations.update(io_mod.read_translations(args.src_translations, src.ids()))
    if args.tgt_translations is not None:
        translations.update(io_mod.read_translations(args.tgt_translations, tgt.ids()))
    outcome = filters_mod.apply_filters(pairs, specs, texts, translations or None)
    io_mod.write_pairs(outcome.pairs, _out_path(args.out))
    for spec, count in zip(specs, outcome.drop_counts):
        print(f"{spec.kind.value}: dropped {count}")
    print(f"kept {len(outcome.pairs)} of {len(pairs)} pairs")
    return 0


# ------------------------------------------------------------------ parser


def _add_common_mining_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=None, help="neighbors per query (default 4)")
    p.add_argument(
        "--join",
        choices=[j.value for j in Join],
        default=None,
        help="forward/backward merge rule (default intersect)",
    )
    p.add_argument(
        "--threshold",
        type=float,
        default=None,
        help=(
            "keep pairs with score strictly above this; presets that "
            "work at increasing strictness: "
            + "/".join(str(t) for t in THRESHOLD_PRESETS)
        ),
    )
    p.add_argument(
        "--scope",
        choices=sorted(_SCOPES),
        default=None,
        help="search within linked documents (doc) or whole sides (global)",
    )
    p.add_argument(
        "--threads",
        default=None,
        help=f"worker threads (default: ${THREADS_ENV} or 1); output is identical for any value",
    )
    p.add_argument(
        "--strict-topk-mean",
        action="store_const",
        const=True,
        default=None,
        help="divide neighbor-cosine sums by k even when fewer neighbors exist",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="margin-mine", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--manifest", default=None, help="key = value option file; flags win")
        return p

    p = add("preprocess", "clean text and drop short document pairs")
    p.add_argument("--src-meta", default=None)
    p.add_argument("--tgt-meta", default=None)
    p.add_argument("--links", default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--noise-token", action="append", default=None,
                   help="literal substring to delete; repeatable")
    p.add_argument("--keep-urls", action="store_const", const=True, default=None)
    p.add_argument("--keep-nonstandard-chars", action="store_const", const=True, default=None)
    p.add_argument("--keep-whitespace", action="store_const", const=True, default=None)
    p.add_argument("--min-src-words", type=float, default=None,
                   help="drop pairs whose source doc has fewer words")
    p.add_argument("--min-tgt-words", type=float, default=None,
                   help="drop pairs whose target doc has fewer words")
    p.add_argument("--bottom-percentile", type=float, default=None,
                   help="drop this fraction of the shortest document pairs")
    p.set_defaults(func=cmd_preprocess)

    p = add("mine", "margin-based bidirectional mining")
    p.add_argument("--src-meta", default=None)
    p.add_argument("--tgt-meta", default=None)
    p.add_argument("--src-emb", default=None)
    p.add_argument("--tgt-emb", default=None)
    p.add_argument("--links", default=None)
    p.add_argument("--out", default=None, help="output pairs TSV")
    _add_common_mining_flags(p)
    p.set_defaults(func=cmd_mine)

    p = add("combine", "vote three channel pair sets down to one")
    p.add_argument("--mode", choices=[m.value for m in CombineMode], default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--original", default=None, help="pairs TSV of the original channel")
    p.add_argument("--en-xx", default=None, help="pairs TSV of the translated-source channel")
    p.add_argument("--xx-en", default=None, help="pairs TSV of the translated-target channel")
    p.add_argument("--src-meta", default=None)
    p.add_argument("--tgt-meta", default=None)
    p.add_argument("--src-emb", default=None)
    p.add_argument("--tgt-emb", default=None)
    p.add_argument("--src-emb-trans", default=None,
                   help="embeddings of the translated source text")
    p.add_argument("--tgt-emb-trans", default=None,
                   help="embeddings of the translated target text")
    p.add_argument("--links", default=None)
    _add_common_mining_flags(p)
    p.set_defaults(func=cmd_combine)

    p = add("eval", "precision/recall/F1 against a gold alignment")
    p.add_argument("--pairs", default=None)
    p.add_argument("--gold", default=None)
    p.add_argument("--out", default=None, help="report JSON (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = add("hist", "margin-score histogram")
    p.add_argument("--pairs", default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--out", default=None, help="CSV output (default: stdout)")
    p.add_argument("--svg", default=None, help="also write an SVG bar chart here")
    p.set_defaults(func=cmd_hist)

    p = add("filter", "apply rule-based metric windows to mined pairs")
    p.add_argument("--pairs", default=None)
    p.add_argument("--specs", default=None, help="JSON list of filter specs")
    p.add_argument("--src-meta", default=None)
    p.add_argument("--tgt-meta", default=None)
    p.add_argument("--src-translations", default=None,
                   help="line-aligned translations of the source sentences")
    p.add_argument("--tgt-translations", default=None,
                   help="line-aligned translations of the target sentences")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_filter)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _merge_manifest(args)
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except MiningError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
