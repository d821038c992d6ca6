"""Command line front end.

Two subcommands:

* ``embed-export embed`` embeds a metadata file into an embedding file.
* ``embed-export translate`` writes a line-aligned translation of a
  metadata file, optionally embedding the translated lines too.

Exit codes: 0 success, 2 input or model trouble, 3 bad configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys

from embed_export.errors import (
    ConfigError,
    EncodingError,
    ExportError,
    InputError,
    ModelLoadError,
    UnsupportedDirection,
)
from embed_export.export import ExportSpec, export_embeddings, export_translations


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; config problems are exit 3 here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(3)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="embed-export", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", parents=[], help="embed a metadata file")
    embed.add_argument("--meta", required=True, help="metadata JSONL path")
    embed.add_argument("--encoder", required=True,
                       help="encoder model id (hash:<dim> or a sentence-transformers id)")
    embed.add_argument("--out", required=True, help="output embedding file")
    embed.add_argument("--batch", type=int, default=32, help="model batch size (default 32)")

    trans = sub.add_parser("translate", help="translate a metadata file line by line")
    trans.add_argument("--meta", required=True, help="metadata JSONL path")
    trans.add_argument("--translator", required=True,
                       help="translation model id (identity, upper, or hf:<model-id>)")
    trans.add_argument("--direction", default=None, help="translation direction, e.g. xx-en")
    trans.add_argument("--out-text", required=True, help="output translation text file")
    trans.add_argument("--encoder", default=None,
                       help="encoder for --out-emb (required with --out-emb)")
    trans.add_argument("--out-emb", default=None,
                       help="also embed the translated lines to this file")
    trans.add_argument("--batch", type=int, default=32, help="model batch size (default 32)")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "embed":
            spec = ExportSpec(
                metadata_path=args.meta,
                encoder=args.encoder,
                out_embeddings=args.out,
                batch_size=args.batch,
            )
            result = export_embeddings(spec)
            print(f"wrote {result.count} vectors of dim {result.dim} to {result.path}")
        else:
            if args.out_emb is not None and args.encoder is None:
                raise ConfigError("--out-emb requires --encoder")
            spec = ExportSpec(
                metadata_path=args.meta,
                encoder=args.encoder,
                translator=args.translator,
                direction=args.direction,
                out_translations=args.out_text,
                out_translated_embeddings=args.out_emb,
                batch_size=args.batch,
            )
            result = export_translations(spec)
            note = f", {len(result.failed_lines)} lines kept original text" \
                if result.failed_lines else ""
            print(f"wrote {result.line_count} translated lines to {result.text_path}{note}")
            if result.embeddings is not None:
                emb = result.embeddings
                print(f"wrote {emb.count} vectors of dim {emb.dim} to {emb.path}")
    except (ConfigError, UnsupportedDirection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InputError, ModelLoadError, EncodingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
