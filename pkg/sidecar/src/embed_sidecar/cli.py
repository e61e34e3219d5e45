"""embed-pairs: read sentence-pair JSONL, write a vector exchange file.

Two records are written per pair, source line then target line, in input
order, so downstream consumers can rely on file position. Malformed input
lines are skipped and reported on stderr; only a missing input file or a
backend failure aborts the run.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .embedder import DEFAULT_MODEL, EmbedderError, load_embedder


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-pairs",
        description="Embed sentence pairs into the vector exchange format.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--in", dest="in_path", required=True, metavar="PAIRS",
                        help="pairs JSONL file to read")
    parser.add_argument("--out", dest="out_path", required=True, metavar="VECTORS",
                        help="vector file to write")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="sentence-transformers model name, or hash-ngram[:dim] "
                             f"for the offline backend (default: {DEFAULT_MODEL})")
    parser.add_argument("--batch-size", type=int, default=32,
                        help="encoding batch size for model backends")
    return parser


def _extract(line: str) -> tuple[str, int, str, str]:
    """Pull (documentary, position, source text, target text) from one record."""
    data = json.loads(line)
    if not isinstance(data, dict):
        raise ValueError("record is not a JSON object")
    documentary = data["documentary"]
    position = data["position"]
    source = data["source"]["text"]
    target = data["target"]["text"]
    if not isinstance(documentary, str) or not documentary:
        raise ValueError("documentary must be a non-empty string")
    # tabs or newlines in the key would corrupt the tab-separated output
    if any(ch in documentary for ch in "\t\n\r"):
        raise ValueError("documentary contains tab or newline")
    if not isinstance(position, int) or isinstance(position, bool) or position < 1:
        raise ValueError(f"position must be a positive integer, got {position!r}")
    if not isinstance(source, str) or not isinstance(target, str):
        raise ValueError("pair texts must be strings")
    return documentary, position, source, target


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    keys: list[tuple[str, int, str]] = []
    texts: list[str] = []
    seen: set[tuple[str, int]] = set()
    skipped = 0
    try:
        with open(args.in_path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, 1):
                if not line.strip():
                    continue
                try:
                    documentary, position, source, target = _extract(line)
                except (KeyError, TypeError, ValueError) as exc:
                    skipped += 1
                    reason = f"missing key {exc}" if isinstance(exc, KeyError) else exc
                    print(f"embed-pairs: {args.in_path}:{line_no}: skipped ({reason})",
                          file=sys.stderr)
                    continue
                if (documentary, position) in seen:
                    skipped += 1
                    print(f"embed-pairs: {args.in_path}:{line_no}: skipped "
                          f"(duplicate pair {documentary!r} position {position})",
                          file=sys.stderr)
                    continue
                seen.add((documentary, position))
                keys.append((documentary, position, "source"))
                texts.append(source)
                keys.append((documentary, position, "target"))
                texts.append(target)
    except OSError as exc:
        print(f"embed-pairs: {exc}", file=sys.stderr)
        return 1

    try:
        embedder = load_embedder(args.model, batch_size=args.batch_size)
    except EmbedderError as exc:
        print(f"embed-pairs: {exc}", file=sys.stderr)
        return 1

    lines = [f"dim={embedder.dim}"]
    if texts:
        vectors = embedder.embed(texts)
        for (documentary, position, language), vec in zip(keys, vectors):
            blob = " ".join(f"{x:.9g}" for x in vec)
            lines.append(f"{documentary}\t{position}\t{language}\t{blob}")
    try:
        with open(args.out_path, "w", encoding="utf-8") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        print(f"embed-pairs: {exc}", file=sys.stderr)
        return 1

    summary = f"embed-pairs: wrote {len(keys)} records for {len(keys) // 2} pairs"
    if skipped:
        summary += f", skipped {skipped} lines"
    print(summary, file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
